#include "wcl/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "wcl/error.hpp"

namespace wcl {

namespace {

// Strictly increasing sequence of `count` values ending exactly at `final_v`,
// close to a linear ramp. Requires count <= final_v + 1.
std::vector<std::int64_t> strict_ramp(std::size_t count, std::int64_t final_v) {
  std::vector<std::int64_t> t(count);
  for (std::size_t i = 0; i < count; ++i) {
    t[i] = static_cast<std::int64_t>(
        std::llround(static_cast<double>(i + 1) * static_cast<double>(final_v) /
                     static_cast<double>(count)));
  }
  t[count - 1] = final_v;
  for (std::size_t i = count - 1; i-- > 0;) t[i] = std::min(t[i], t[i + 1] - 1);
  for (std::size_t i = 1; i < count; ++i) t[i] = std::max(t[i], t[i - 1] + 1);
  return t;
}

std::vector<std::size_t> index_range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  out.reserve(hi - lo + 1);
  for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
  return out;
}

}  // namespace

SpacePtr make_discrete_space(std::size_t count) {
  if (count == 0)
    throw Error(ErrorCode::InvalidSpec, "discrete space needs a sample");
  auto s = std::make_shared<Space>();
  s->dim = 1;
  s->mesh = 1.0;
  s->is_compact_model = true;
  for (std::size_t i = 0; i < count; ++i)
    s->points.push_back({static_cast<double>(i), 0.0});
  if (count >= 2) s->exhaustion.push_back(index_range(0, count - 2));
  s->exhaustion.push_back(index_range(0, count - 1));
  validate(*s);
  return s;
}

SpacePtr make_interval_space(double a, double b, std::size_t n, TailSpec tails,
                             std::size_t levels) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidSpec, "interval endpoints must satisfy a < b",
                {{"a", a}, {"b", b}});
  if (n < 8)
    throw Error(ErrorCode::InvalidSpec, "interval grid needs n >= 8 cells",
                {{"n", n}});
  if (levels < 2)
    throw Error(ErrorCode::InvalidSpec, "exhaustion needs at least 2 levels",
                {{"levels", levels}});

  auto s = std::make_shared<Space>();
  s->dim = 1;
  s->mesh = (b - a) / static_cast<double>(n);
  s->points.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    s->points[i] = {a + (b - a) * static_cast<double>(i) / static_cast<double>(n),
                    0.0};
  s->is_compact_model = !tails.any();

  const bool central = tails.plus == tails.minus;  // both tails or compact
  if (central) {
    const std::size_t half = n / 2;
    const std::size_t clo = (n - (n % 2)) / 2;
    const std::size_t chi = (n + (n % 2)) / 2;
    const std::size_t L = std::min(levels, half + 1);
    auto h = strict_ramp(L, static_cast<std::int64_t>(half));
    for (std::size_t i = 0; i < L; ++i) {
      const auto w = static_cast<std::size_t>(std::max<std::int64_t>(h[i], 0));
      s->exhaustion.push_back(
          index_range(clo >= w ? clo - w : 0, std::min(chi + w, n)));
    }
  } else {
    const std::size_t L = std::min(levels, n + 1);
    auto m = strict_ramp(L, static_cast<std::int64_t>(n));
    for (std::size_t i = 0; i < L; ++i) {
      const auto w = static_cast<std::size_t>(std::max<std::int64_t>(m[i], 0));
      if (tails.plus)
        s->exhaustion.push_back(index_range(0, w));
      else
        s->exhaustion.push_back(index_range(n - w, n));
    }
  }

  const auto& k1 = s->exhaustion.front();
  if (tails.plus) {
    Tail t;
    t.label = "+inf";
    t.direction = +1;
    for (std::size_t j = k1.back() + 1; j <= n; ++j) t.indices.push_back(j);
    s->tails.push_back(std::move(t));
  }
  if (tails.minus) {
    Tail t;
    t.label = "-inf";
    t.direction = -1;
    for (std::size_t j = k1.front(); j-- > 0;) t.indices.push_back(j);
    s->tails.push_back(std::move(t));
  }

  validate(*s);
  return s;
}

SpacePtr make_extended_line_space(double radius, std::size_t n,
                                  std::size_t levels) {
  if (!(radius > 0.0))
    throw Error(ErrorCode::InvalidSpec, "extended line needs radius > 0",
                {{"radius", radius}});
  // Compact: the extreme samples play the roles of -inf and +inf.
  return make_interval_space(-radius, radius, n, TailSpec::none(), levels);
}

SpacePtr make_line_with_strip_space(double radius, std::size_t cells_per_unit,
                                    std::size_t levels) {
  if (!(radius > 0.0) || cells_per_unit < 2)
    throw Error(ErrorCode::InvalidSpec,
                "line-with-strip needs radius > 0 and cells_per_unit >= 2",
                {{"radius", radius}, {"cells_per_unit", cells_per_unit}});
  const double rc_real = radius * static_cast<double>(cells_per_unit);
  const auto rc = static_cast<std::int64_t>(std::llround(rc_real));
  if (std::abs(rc_real - static_cast<double>(rc)) > 1e-9 || rc < 4)
    throw Error(ErrorCode::InvalidSpec,
                "radius must be a multiple of the mesh and span >= 4 cells",
                {{"radius", radius}, {"cells_per_unit", cells_per_unit}});
  if (levels < 2)
    throw Error(ErrorCode::InvalidSpec, "exhaustion needs at least 2 levels",
                {{"levels", levels}});

  auto s = std::make_shared<Space>();
  s->dim = 2;
  const double mesh = 1.0 / static_cast<double>(cells_per_unit);
  s->mesh = mesh;
  s->is_compact_model = false;

  // Line samples first (x ascending), then strip columns (x-major, y ascending).
  const auto nrc = static_cast<std::size_t>(rc);
  for (std::int64_t i = -rc; i <= rc; ++i)
    s->points.push_back({static_cast<double>(i) * mesh, 0.0});
  for (std::int64_t i = 0; i <= rc; ++i)
    for (std::size_t j = 1; j <= cells_per_unit; ++j)
      s->points.push_back({static_cast<double>(i) * mesh,
                           static_cast<double>(j) * mesh});

  const std::size_t L = std::min(levels, nrc + 1);
  auto h = strict_ramp(L, rc);
  for (std::size_t lev = 0; lev < L; ++lev) {
    const double cut = (static_cast<double>(h[lev]) + 0.5) * mesh;
    std::vector<std::size_t> window;
    for (std::size_t p = 0; p < s->points.size(); ++p)
      if (std::abs(s->points[p].x) <= cut) window.push_back(p);
    s->exhaustion.push_back(std::move(window));
  }

  const double cut1 = (static_cast<double>(h[0]) + 0.5) * mesh;
  Tail plus;
  plus.label = "+inf";
  plus.direction = +1;
  Tail minus;
  minus.label = "-inf";
  minus.direction = -1;
  std::vector<std::size_t> order(s->points.size());
  for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
  std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
    if (s->points[u].x != s->points[v].x) return s->points[u].x < s->points[v].x;
    return s->points[u].y < s->points[v].y;
  });
  for (std::size_t p : order)
    if (s->points[p].x > cut1) plus.indices.push_back(p);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (s->points[*it].x < -cut1) minus.indices.push_back(*it);
  s->tails.push_back(std::move(plus));
  s->tails.push_back(std::move(minus));

  validate(*s);
  return s;
}

void validate(const Space& s) {
  const std::size_t n = s.points.size();
  if (n == 0 || !(s.mesh > 0.0) || (s.dim != 1 && s.dim != 2))
    throw Error(ErrorCode::InvalidSpec, "space needs points, mesh > 0, dim 1 or 2",
                {{"size", n}, {"mesh", s.mesh}, {"dim", s.dim}});
  if (s.dim == 1)
    for (const auto& p : s.points)
      if (p.y != 0.0)
        throw Error(ErrorCode::InvalidSpec, "1-d space has nonzero y coordinate");

  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
      if (s.points[u].x != s.points[v].x) return s.points[u].x < s.points[v].x;
      return s.points[u].y < s.points[v].y;
    });
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto& p = s.points[order[i]];
      const auto& q = s.points[order[i + 1]];
      if (p.x == q.x && p.y == q.y)
        throw Error(ErrorCode::InvalidSpec, "duplicate sample coordinates",
                    {{"index_a", order[i]}, {"index_b", order[i + 1]}});
    }
  }

  if (s.exhaustion.empty())
    throw Error(ErrorCode::InvalidSpec, "exhaustion must be nonempty");
  for (std::size_t lev = 0; lev < s.exhaustion.size(); ++lev) {
    const auto& k = s.exhaustion[lev];
    if (k.empty() || !std::is_sorted(k.begin(), k.end()) ||
        std::adjacent_find(k.begin(), k.end()) != k.end() || k.back() >= n)
      throw Error(ErrorCode::InvalidSpec,
                  "exhaustion window must be sorted, unique, in range",
                  {{"level", lev + 1}});
    if (lev > 0) {
      const auto& prev = s.exhaustion[lev - 1];
      if (prev.size() >= k.size() ||
          !std::includes(k.begin(), k.end(), prev.begin(), prev.end()))
        throw Error(ErrorCode::InvalidSpec,
                    "exhaustion windows must be strictly nested",
                    {{"level", lev + 1}});
    }
  }
  if (s.exhaustion.back().size() != n)
    throw Error(ErrorCode::InvalidSpec,
                "final exhaustion window must cover all samples",
                {{"covered", s.exhaustion.back().size()}, {"size", n}});

  if (s.is_compact_model && !s.tails.empty())
    throw Error(ErrorCode::InvalidSpec, "compact model must not declare tails");
  if (!s.is_compact_model && s.tails.empty())
    throw Error(ErrorCode::InvalidSpec, "noncompact model needs tail directions");

  std::vector<int> tail_of(n, -1);
  for (std::size_t t = 0; t < s.tails.size(); ++t) {
    const auto& tail = s.tails[t];
    if (tail.label.empty() || (tail.direction != 1 && tail.direction != -1) ||
        tail.indices.empty())
      throw Error(ErrorCode::InvalidSpec, "tail needs label, direction, indices",
                  {{"tail", t}});
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t j : tail.indices) {
      if (j >= n)
        throw Error(ErrorCode::InvalidSpec, "tail index out of range",
                    {{"tail", t}, {"index", j}});
      if (tail_of[j] != -1)
        throw Error(ErrorCode::InvalidSpec, "tails must be pairwise disjoint",
                    {{"index", j}});
      tail_of[j] = static_cast<int>(t);
      const double esc = tail.direction * s.points[j].x;
      if (have_prev) {
        if (esc < prev - 1e-12 * std::max(1.0, std::abs(prev)))
          throw Error(ErrorCode::InvalidSpec,
                      "tail indices must escape monotonically",
                      {{"tail", t}, {"index", j}});
        if (esc > prev && esc - prev > 3.0 * s.mesh * (1.0 + 1e-9))
          throw Error(ErrorCode::InvalidSpec,
                      "tail escape steps must stay within 3 mesh",
                      {{"tail", t}, {"index", j}, {"gap", esc - prev}});
        prev = std::max(prev, esc);
      } else {
        prev = esc;
        have_prev = true;
      }
    }
  }

  // Every point outside K_L lies in exactly one tail (K_L covers everything,
  // so this holds vacuously; kept literal for deserialized data).
  std::vector<char> in_final(n, 0);
  for (std::size_t j : s.exhaustion.back()) in_final[j] = 1;
  for (std::size_t j = 0; j < n; ++j)
    if (!in_final[j] && tail_of[j] == -1)
      throw Error(ErrorCode::InvalidSpec,
                  "point outside final window belongs to no tail", {{"index", j}});
}

double distance(const Space& s, std::size_t i, std::size_t j) {
  const double dx = s.points[i].x - s.points[j].x;
  const double dy = s.points[i].y - s.points[j].y;
  return std::sqrt(dx * dx + dy * dy);
}

std::vector<std::size_t> tail_points(const Space& s, std::size_t level) {
  if (level < 1 || level > s.levels())
    throw Error(ErrorCode::InvalidSpec, "exhaustion level out of range",
                {{"level", level}, {"levels", s.levels()}});
  std::vector<char> in(s.size(), 0);
  for (std::size_t j : s.exhaustion[level - 1]) in[j] = 1;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (!in[j]) out.push_back(j);
  return out;
}

std::vector<std::size_t> neighbors(const Space& s, std::size_t i, double radius) {
  if (i >= s.size())
    throw Error(ErrorCode::InvalidSpec, "sample index out of range",
                {{"index", i}, {"size", s.size()}});
  if (radius < s.mesh * (1.0 - 1e-12))
    throw Error(ErrorCode::InvalidSpec, "neighbor radius must be >= mesh",
                {{"radius", radius}, {"mesh", s.mesh}});
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (distance(s, i, j) <= radius * (1.0 + 1e-12)) out.push_back(j);
  return out;
}

bool same_space(const Space& a, const Space& b) {
  if (&a == &b) return true;
  if (a.dim != b.dim || a.size() != b.size() || a.mesh != b.mesh) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y)
      return false;
  return true;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NotContinuous: return "NotContinuous";
    case ErrorCode::NotProper: return "NotProper";
    case ErrorCode::OutputNotC0: return "OutputNotC0";
    case ErrorCode::TooLargeForDefinitionalCheck:
      return "TooLargeForDefinitionalCheck";
    case ErrorCode::UnboundedWeight: return "UnboundedWeight";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::EmptyPeakSet: return "EmptyPeakSet";
    case ErrorCode::NotDP: return "NotDP";
    case ErrorCode::BlowupAmbiguous: return "BlowupAmbiguous";
    case ErrorCode::NotBijective: return "NotBijective";
    case ErrorCode::ModeCheckFailed: return "ModeCheckFailed";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace wcl
