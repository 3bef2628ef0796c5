#include "wcl/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <utility>

#include "wcl/error.hpp"
#include "wcl/rng.hpp"

namespace wcl {

namespace {

void require_function(const ScalarFunction& f) {
  if (!f.space || f.values.size() != f.space->size())
    throw Error(ErrorCode::InvalidSpec, "function values must match space size");
}

void require_same_space(const ScalarFunction& f, const ScalarFunction& g) {
  require_function(f);
  require_function(g);
  if (!same_space(*f.space, *g.space))
    throw Error(ErrorCode::SpaceMismatch, "functions live on different spaces");
}

// Levels whose complement is genuine tail region; empty for compact models,
// where no decay is required of anything.
std::vector<std::size_t> meaningful_levels(const Space& s) {
  std::vector<std::size_t> out;
  if (s.is_compact_model) return out;
  for (std::size_t lev = 1; lev <= s.levels(); ++lev)
    if (s.exhaustion[lev - 1].size() < s.size()) out.push_back(lev);
  return out;
}

double dist_to(const Space& s, std::size_t i, double cx, double cy) {
  const double dx = s.points[i].x - cx;
  const double dy = s.points[i].y - cy;
  return std::sqrt(dx * dx + dy * dy);
}

bool is_half_line_model(const Space& s) {
  return s.dim == 1 && s.tails.size() == 1 && s.tails[0].direction == +1;
}

}  // namespace

double sup_norm(const ScalarFunction& f) {
  require_function(f);
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::size_t> cozero(const ScalarFunction& f, const C0Tolerance& tol) {
  require_function(f);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (std::abs(f.values[i]) > tol.eps_zero) out.push_back(i);
  return out;
}

Support support(const ScalarFunction& f, const C0Tolerance& tol) {
  require_function(f);
  const Space& s = *f.space;
  const auto coz = cozero(f, tol);
  std::vector<char> in(s.size(), 0);
  for (std::size_t i : coz) in[i] = 1;
  const double step = 1.1 * s.mesh;
  std::vector<char> dilated = in;
  for (std::size_t i : coz)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (!dilated[j] && distance(s, i, j) <= step) dilated[j] = 1;

  Support out;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (dilated[j]) out.indices.push_back(j);

  const auto levels = meaningful_levels(s);
  if (!levels.empty()) {
    out.includes_infinity = true;
    for (std::size_t lev : levels) {
      bool hit = false;
      for (std::size_t j : tail_points(s, lev))
        if (in[j]) {
          hit = true;
          break;
        }
      if (!hit) {
        out.includes_infinity = false;
        break;
      }
    }
  }
  return out;
}

DecayProfile c0_profile(const ScalarFunction& f, const C0Tolerance& tol) {
  require_function(f);
  const Space& s = *f.space;
  DecayProfile out;
  out.tail_max.resize(s.levels(), 0.0);
  for (std::size_t lev = 1; lev <= s.levels(); ++lev) {
    double m = 0.0;
    for (std::size_t j : tail_points(s, lev))
      m = std::max(m, std::abs(f.values[j]));
    out.tail_max[lev - 1] = m;
  }
  const auto levels = meaningful_levels(s);
  out.certified =
      levels.empty() || out.tail_max[levels.back() - 1] <= tol.eps_tail;
  return out;
}

bool is_c0_certified(const ScalarFunction& f, const C0Tolerance& tol) {
  return c0_profile(f, tol).certified;
}

bool are_disjoint(const ScalarFunction& f, const ScalarFunction& g,
                  const C0Tolerance& tol) {
  require_same_space(f, g);
  double prod = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    prod = std::max(prod, std::abs(f.values[i] * g.values[i]));
  return prod <= tol.eps_zero * std::max(sup_norm(f), sup_norm(g));
}

std::vector<ScalarFunction> peak_family(const SpacePtr& space,
                                        std::size_t center,
                                        const std::vector<double>& widths) {
  if (!space || center >= space->size())
    throw Error(ErrorCode::InvalidSpec, "peak center out of range");
  if (widths.empty())
    throw Error(ErrorCode::InvalidSpec, "peak family needs at least one width");
  std::vector<ScalarFunction> out;
  const double cx = space->points[center].x;
  const double cy = space->points[center].y;
  for (double w : widths) {
    if (!(w > 0.0))
      throw Error(ErrorCode::InvalidSpec, "peak width must be positive",
                  {{"width", w}});
    ScalarFunction f{space, std::vector<double>(space->size(), 0.0)};
    for (std::size_t i = 0; i < space->size(); ++i)
      f.values[i] = std::max(0.0, 1.0 - dist_to(*space, i, cx, cy) / w);
    out.push_back(std::move(f));
  }
  return out;
}

ScalarFunction tent(const SpacePtr& space, double n) {
  if (!space || !is_half_line_model(*space))
    throw Error(ErrorCode::InvalidSpec,
                "ramp family needs a 1-d model of [0, +inf)");
  if (!(n > 0.0))
    throw Error(ErrorCode::InvalidSpec, "ramp parameter must be positive",
                {{"n", n}});
  const double x_max = space->points.back().x;
  if (2.0 * n > x_max * (1.0 + 1e-12))
    throw Error(ErrorCode::TruncationTooSmall,
                "ramp support exceeds the truncated grid",
                {{"n", n}, {"x_max", x_max}});
  ScalarFunction f{space, std::vector<double>(space->size(), 0.0)};
  for (std::size_t i = 0; i < space->size(); ++i) {
    const double x = space->points[i].x;
    if (x <= n)
      f.values[i] = 1.0;
    else if (x < 2.0 * n)
      f.values[i] = (2.0 * n - x) / n;
  }
  return f;
}

ScalarFunction bump(const SpacePtr& space, const std::vector<std::size_t>& region) {
  if (!space) throw Error(ErrorCode::InvalidSpec, "bump needs a space");
  if (region.empty())
    throw Error(ErrorCode::EmptyRegion, "bump region must be nonempty");
  const Space& s = *space;
  std::vector<char> in(s.size(), 0);
  for (std::size_t i : region) {
    if (i >= s.size())
      throw Error(ErrorCode::InvalidSpec, "bump region index out of range",
                  {{"index", i}});
    in[i] = 1;
  }

  // Connectivity within one mesh step, via mesh-cell hashing.
  {
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> cell;
    for (std::size_t i : region)
      cell[{static_cast<std::int64_t>(std::llround(s.points[i].x / s.mesh)),
            static_cast<std::int64_t>(std::llround(s.points[i].y / s.mesh))}] = i;
    std::vector<char> seen(s.size(), 0);
    std::queue<std::size_t> q;
    q.push(region.front());
    seen[region.front()] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      const auto cx = static_cast<std::int64_t>(std::llround(s.points[i].x / s.mesh));
      const auto cy = static_cast<std::int64_t>(std::llround(s.points[i].y / s.mesh));
      const std::pair<std::int64_t, std::int64_t> steps[4] = {
          {cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}};
      for (const auto& st : steps) {
        auto it = cell.find(st);
        if (it != cell.end() && !seen[it->second]) {
          seen[it->second] = 1;
          ++reached;
          q.push(it->second);
        }
      }
    }
    if (reached != region.size())
      throw Error(ErrorCode::InvalidSpec,
                  "bump region must be connected within one mesh step",
                  {{"reached", reached}, {"region", region.size()}});
  }

  std::vector<std::size_t> complement;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (!in[j]) complement.push_back(j);

  ScalarFunction f{space, std::vector<double>(s.size(), 0.0)};
  if (complement.empty()) {
    std::fill(f.values.begin(), f.values.end(), 1.0);
    return f;
  }
  std::vector<double> depth(region.size(), 0.0);
  double inradius = 0.0;
  for (std::size_t k = 0; k < region.size(); ++k) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j : complement)
      d = std::min(d, distance(s, region[k], j));
    depth[k] = d;
    inradius = std::max(inradius, d);
  }
  const double ramp = std::min(inradius, 4.0 * s.mesh);
  for (std::size_t k = 0; k < region.size(); ++k)
    f.values[region[k]] = std::min(1.0, depth[k] / ramp);
  return f;
}

ScalarFunction indicator(const SpacePtr& space, std::size_t i) {
  if (!space || i >= space->size())
    throw Error(ErrorCode::InvalidSpec, "indicator index out of range");
  ScalarFunction f{space, std::vector<double>(space->size(), 0.0)};
  f.values[i] = 1.0;
  return f;
}

ScalarFunction constant(const SpacePtr& space, double value) {
  if (!space) throw Error(ErrorCode::InvalidSpec, "constant needs a space");
  return {space, std::vector<double>(space->size(), value)};
}

ProbeCorpus make_probe_corpus(const SpacePtr& space, const C0Tolerance& tol,
                              std::uint64_t seed, std::size_t random_count) {
  if (!space) throw Error(ErrorCode::InvalidSpec, "corpus needs a space");
  const Space& s = *space;
  ProbeCorpus out;
  auto add = [&](ScalarFunction f, std::string name) {
    out.functions.push_back(std::move(f));
    out.names.push_back(std::move(name));
  };

  const auto levels = meaningful_levels(s);
  const std::size_t bump_top = levels.empty() ? s.levels() : levels.back();
  for (std::size_t lev = 1; lev <= bump_top; ++lev)
    add(bump(space, s.exhaustion[lev - 1]), "bump_window_" + std::to_string(lev));

  if (is_half_line_model(s)) {
    for (double n = 1.0;; n *= 2.0) {
      ScalarFunction f;
      try {
        f = tent(space, n);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::TruncationTooSmall) break;
        throw;
      }
      if (!is_c0_certified(f, tol)) break;
      add(std::move(f), "tent_" + std::to_string(static_cast<long long>(n)));
    }
  }

  // Slow-decay probes: these give the output-vanishing check its teeth
  // against weights that grow toward a tail.
  {
    const auto& k1 = s.exhaustion.front();
    const std::size_t anchor = k1[k1.size() / 2];
    const double ax = s.points[anchor].x;
    const double ay = s.points[anchor].y;
    for (double lambda : {2.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}) {
      ScalarFunction f{space, std::vector<double>(s.size(), 0.0)};
      for (std::size_t i = 0; i < s.size(); ++i)
        f.values[i] = std::exp(-lambda * dist_to(s, i, ax, ay));
      if (is_c0_certified(f, tol)) {
        char name[32];
        std::snprintf(name, sizeof(name), "decay_%g", lambda);
        add(std::move(f), name);
      }
    }
  }

  {
    Rng rng(seed);
    const std::size_t inner_level = s.levels() >= 3 ? s.levels() - 2 : 1;
    const auto& inner = s.exhaustion[inner_level - 1];
    std::size_t added = 0;
    std::size_t draws = 0;
    while (added < random_count && draws < random_count * 20 + 20) {
      ++draws;
      ScalarFunction f{space, std::vector<double>(s.size(), 0.0)};
      for (int hat = 0; hat < 3; ++hat) {
        const std::size_t c = inner[rng.index(inner.size())];
        const double w = rng.uniform(1.0, 4.0) * s.mesh;
        double height = rng.uniform(0.2, 1.0) * rng.sign();
        const double cx = s.points[c].x;
        const double cy = s.points[c].y;
        for (std::size_t i = 0; i < s.size(); ++i)
          f.values[i] +=
              height * std::max(0.0, 1.0 - dist_to(s, i, cx, cy) / w);
      }
      if (!is_c0_certified(f, tol)) continue;
      add(std::move(f), "random_" + std::to_string(added));
      ++added;
    }
  }

  return out;
}

}  // namespace wcl
