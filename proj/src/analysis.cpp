#include "wcl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "wcl/error.hpp"

namespace wcl {
namespace {

using nlohmann::ordered_json;

// Nonzero coefficients the row applies to the domain samples.
std::vector<std::pair<std::size_t, double>> sparse_row(const LinearOperator& op,
                                                       std::size_t y) {
  std::vector<std::pair<std::size_t, double>> out;
  if (op.is_matrix()) {
    const Matrix& m = op.matrix();
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double v = m.at(y, c);
      if (v != 0.0) out.emplace_back(c, v);
    }
  } else {
    const Symbol& s = op.symbol();
    if (s.phi[y].is_interior() && s.h[y] != 0.0)
      out.emplace_back(s.phi[y].index, s.h[y]);
  }
  return out;
}

// Dual norm of each row functional (sum of absolute coefficients).
std::vector<double> op_row_norms(const LinearOperator& op) {
  std::vector<double> out(op.codomain->size(), 0.0);
  if (op.is_matrix()) {
    const Matrix& m = op.matrix();
    for (std::size_t r = 0; r < m.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) s += std::abs(m.at(r, c));
      out[r] = s;
    }
  } else {
    const Symbol& s = op.symbol();
    for (std::size_t r = 0; r < s.size(); ++r)
      out[r] = s.phi[r].is_interior() ? std::abs(s.h[r]) : 0.0;
  }
  return out;
}

// Deepest exhaustion level whose complement is nonempty; 0 for compact
// models (every window is the whole sample set there).
std::size_t last_shell_level(const Space& s) {
  if (s.is_compact_model) return 0;
  for (std::size_t lev = s.levels(); lev >= 1; --lev)
    if (s.exhaustion[lev - 1].size() < s.size()) return lev;
  return 0;
}

double hat_value(const Space& s, std::size_t p, std::size_t center,
                 double width) {
  return std::max(0.0, 1.0 - distance(s, p, center) / width);
}

// Escape data reused by the infinity probes: depth of every sample from the
// innermost-window anchor, per-level window radii and membership. Cached per
// space because support probing runs once per codomain row.
struct EscapeProfile {
  SpacePtr keepalive;
  std::vector<double> depth;
  std::vector<double> radius;
  std::vector<std::vector<char>> inside;
};

const EscapeProfile& escape_profile(const SpacePtr& sp) {
  static std::map<const Space*, EscapeProfile> cache;
  auto it = cache.find(sp.get());
  if (it != cache.end()) return it->second;
  if (cache.size() > 64) cache.clear();

  const Space& s = *sp;
  EscapeProfile prof;
  prof.keepalive = sp;
  const auto& k1 = s.exhaustion.front();
  const std::size_t anchor = k1[k1.size() / 2];
  prof.depth.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    prof.depth[i] = distance(s, i, anchor);
  prof.radius.assign(s.levels(), 0.0);
  prof.inside.assign(s.levels(), std::vector<char>(s.size(), 0));
  for (std::size_t lev = 0; lev < s.levels(); ++lev)
    for (std::size_t j : s.exhaustion[lev]) {
      prof.inside[lev][j] = 1;
      prof.radius[lev] = std::max(prof.radius[lev], prof.depth[j]);
    }
  return cache.emplace(sp.get(), std::move(prof)).first->second;
}

// Probe value of the level-`lev` escape ramp at sample c: zero on the
// window, grading up to 1 with escape depth outside it. The floor keeps
// every sample outside the window visible to the probe.
double escape_ramp(const EscapeProfile& prof, double mesh, std::size_t lev,
                   std::size_t c) {
  if (prof.inside[lev - 1][c]) return 0.0;
  const double t =
      0.25 + (prof.depth[c] - prof.radius[lev - 1]) / (4.0 * mesh);
  return std::clamp(t, 0.25, 1.0);
}

// Samples on the outermost proper shell of a noncompact model. Support
// probes for targets here cannot rule out escape to infinity, and openness
// scans must not read the truncation boundary as topology.
std::vector<char> deepest_shell_mask(const Space& s) {
  std::vector<char> mask(s.size(), 0);
  const std::size_t top = last_shell_level(s);
  if (top >= 1)
    for (std::size_t i : tail_points(s, top)) mask[i] = 1;
  return mask;
}

// True when the candidate list is exactly {x}, up to an infinity marker
// that the truncation cannot exclude for deep-shell targets.
bool supports_exactly(const FunctionalSupport& fs, std::size_t x,
                      const std::vector<char>& shell) {
  std::size_t interiors = 0;
  bool match = false;
  bool has_inf = false;
  for (const PointRef& c : fs.candidates) {
    if (c.is_interior()) {
      ++interiors;
      if (c.index == x) match = true;
    } else if (c.is_infinity()) {
      has_inf = true;
    }
  }
  if (interiors != 1 || !match) return false;
  return !has_inf || shell[x];
}

double ls_slope(const std::vector<double>& s) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k] > 0.0) {
      lx.push_back(std::log(static_cast<double>(k + 1)));
      ly.push_back(std::log(s[k]));
    }
  const std::size_t n = lx.size();
  if (n < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

// Nearest-sample lookup within one space; binary search over x for sorted
// one-dimensional grids, linear scan otherwise.
struct NearestIndex {
  const Space* s = nullptr;
  std::vector<std::pair<double, std::size_t>> byx;
  bool use_byx = false;

  explicit NearestIndex(const Space& space) : s(&space) {
    if (space.dim == 1) {
      byx.reserve(space.size());
      for (std::size_t i = 0; i < space.size(); ++i)
        byx.emplace_back(space.points[i].x, i);
      std::sort(byx.begin(), byx.end());
      use_byx = true;
    }
  }

  std::size_t nearest(const Point& p) const {
    if (use_byx) {
      auto it = std::lower_bound(byx.begin(), byx.end(),
                                 std::make_pair(p.x, std::size_t{0}));
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (auto cand = (it == byx.begin() ? it : std::prev(it));
           cand != byx.end() && cand <= it; ++cand) {
        const double d = std::abs(cand->first - p.x);
        if (d < bd) {
          bd = d;
          best = cand->second;
        }
        if (cand == it) break;
      }
      return best;
    }
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s->size(); ++i) {
      const double dx = s->points[i].x - p.x;
      const double dy = s->points[i].y - p.y;
      const double d = dx * dx + dy * dy;
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }
};

// One-point compactification surrogate: the same samples plus one extra
// standing for infinity, placed beyond the largest coordinate (structural
// checks on the compactified operator do not read distances to it).
SpacePtr append_infinity(const Space& s) {
  Space t;
  t.dim = s.dim;
  t.points = s.points;
  double maxx = t.points.front().x;
  for (const auto& p : t.points) maxx = std::max(maxx, p.x);
  t.points.push_back({maxx + 2.0 * s.mesh, 0.0});
  t.mesh = s.mesh;
  std::vector<std::size_t> base(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) base[i] = i;
  std::vector<std::size_t> all = base;
  all.push_back(s.size());
  t.exhaustion = {std::move(base), std::move(all)};
  t.is_compact_model = true;
  validate(t);
  return std::make_shared<const Space>(std::move(t));
}

// Pointwise limit data of T applied to an increasing plateau family rising
// to the constant one: ramp functions on a half-line model, window bumps
// otherwise. A row is determined once its image stopped moving AND its
// target sits on the stabilized plateau (deep-tail targets that fell off
// every ramp are indistinguishable from settled ones by value alone).
struct ForcedUnit {
  std::vector<double> value;
  std::vector<char> determined;
};

ForcedUnit forced_unit(const LinearOperator& op, const C0Tolerance& tol) {
  const SpacePtr& domain = op.domain;
  const Symbol& sym = op.symbol();
  std::vector<ScalarFunction> ladder;
  const bool half_line = !domain->is_compact_model && domain->dim == 1 &&
                         domain->tails.size() == 1 &&
                         domain->tails[0].direction == 1;
  if (half_line) {
    for (double plateau = 1.0;; plateau *= 2.0) {
      try {
        ladder.push_back(tent(domain, plateau));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::TruncationTooSmall) break;
        throw;
      }
    }
  } else {
    const std::size_t top = last_shell_level(*domain);
    for (std::size_t lev = 1; lev <= top; ++lev)
      ladder.push_back(bump(domain, domain->exhaustion[lev - 1]));
  }
  if (ladder.size() < 2)
    throw Error(ErrorCode::GridTooCoarse,
                "truncation cannot host an increasing plateau family",
                {{"members", ladder.size()}});

  const ScalarFunction& prev = ladder[ladder.size() - 2];
  const ScalarFunction prev_im = apply(op, prev);
  const ScalarFunction last_im = apply(op, ladder.back());

  ForcedUnit out;
  const std::size_t ny = op.codomain->size();
  out.value.resize(ny, 0.0);
  out.determined.assign(ny, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    out.value[y] = last_im.values[y];
    if (!sym.phi[y].is_interior()) continue;
    const bool settled =
        std::abs(last_im.values[y] - prev_im.values[y]) < tol.eps_eq / 10.0;
    const bool on_plateau = prev.values[sym.phi[y].index] >= 1.0 - 1e-9;
    out.determined[y] = settled && on_plateau;
  }
  return out;
}

struct TailEstimate {
  double value = 0.0;
  double spread = 0.0;
};

// Limit estimate along one tail from the outer half of the usable samples,
// in escape order.
TailEstimate tail_estimate(const Tail& tail, const std::vector<double>& value,
                           const std::vector<char>& usable) {
  std::vector<std::size_t> kept;
  for (std::size_t i : tail.indices)
    if (usable[i]) kept.push_back(i);
  if (kept.empty())
    throw Error(ErrorCode::GridTooCoarse,
                "no stabilized forced value along a tail",
                {{"tail", tail.label}});
  TailEstimate est;
  double lo = 0.0, hi = 0.0, sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = kept.size() / 2; k < kept.size(); ++k) {
    const double v = value[kept[k]];
    if (count == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sum += v;
    ++count;
  }
  est.value = sum / static_cast<double>(count);
  est.spread = hi - lo;
  return est;
}

}  // namespace

FunctionalSupport functional_support(const LinearOperator& op, std::size_t y,
                                     const C0Tolerance& tol) {
  if (y >= op.codomain->size())
    throw Error(ErrorCode::InvalidSpec, "row index out of range",
                {{"y", y}, {"rows", op.codomain->size()}});
  FunctionalSupport out;
  out.y = y;
  const auto row = sparse_row(op, y);
  if (row.empty()) return out;

  const Space& dom = *op.domain;
  const double mesh = dom.mesh;
  const double widths[3] = {4.0 * mesh, 2.0 * mesh, mesh};

  // Only domain samples within reach of a row coefficient can survive the
  // shrinking-neighborhood probes; everything else maps every probe to 0.
  std::vector<char> cand(dom.size(), 0);
  for (const auto& [c, v] : row) {
    (void)v;
    for (std::size_t x : neighbors(dom, c, 4.04 * mesh)) cand[x] = 1;
  }
  for (std::size_t x = 0; x < dom.size(); ++x) {
    if (!cand[x]) continue;
    bool ok = true;
    for (double w : widths) {
      double val = 0.0;
      for (const auto& [c, v] : row) val += v * hat_value(dom, c, x, w);
      if (std::abs(val) <= tol.eps_zero) {
        ok = false;
        break;
      }
    }
    if (ok) out.candidates.push_back(PointRef::interior(x));
  }

  const std::size_t top = last_shell_level(dom);
  if (top >= 1) {
    const EscapeProfile& prof = escape_profile(op.domain);
    bool okinf = true;
    for (std::size_t lev = 1; lev <= top && okinf; ++lev) {
      double val = 0.0;
      for (const auto& [c, v] : row) val += v * escape_ramp(prof, mesh, lev, c);
      if (std::abs(val) <= tol.eps_zero) okinf = false;
    }
    if (okinf) out.candidates.push_back(PointRef::infinity());
  }
  return out;
}

IsometryRecovery recover_isometry(const LinearOperator& op,
                                  const C0Tolerance& tol,
                                  const AnalysisOptions& opts) {
  const IsometryReport rep = check_isometry(op, tol);
  if (!rep.isometry) {
    ordered_json detail = {{"note", rep.note}};
    if (rep.bad_row) detail["bad_row"] = *rep.bad_row;
    if (rep.uncovered_column) detail["uncovered_column"] = *rep.uncovered_column;
    throw Error(ErrorCode::NotIsometry,
                "structural norm-preservation check failed", detail);
  }

  const std::size_t nx = op.domain->size();
  const std::size_t ny = op.codomain->size();
  IsometryRecovery out;
  out.peaks.q.resize(nx);
  std::vector<int> owner(ny, -1);
  std::vector<double> hval(ny, 0.0);

  auto claim = [&](std::size_t yy, std::size_t x) {
    if (owner[yy] != -1 && owner[yy] != static_cast<int>(x))
      throw Error(ErrorCode::EmptyPeakSet, "peak sets overlap",
                  {{"y", yy},
                   {"x_a", owner[yy]},
                   {"x_b", x}});
    owner[yy] = static_cast<int>(x);
  };

  if (op.is_matrix()) {
    // Peak probing collapses to a vertex test: the row must report full
    // norm both on the basis peak at x and on the adversarial vertex that
    // aligns every other coordinate with the row's signs.
    const Matrix& m = op.matrix();
    std::vector<double> rowsum(ny, 0.0);
    for (std::size_t r = 0; r < ny; ++r) rowsum[r] = row_one_norm(m, r);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t r = 0; r < ny; ++r) {
        const double t = m.at(r, x);
        if (std::abs(std::abs(t) - 1.0) > tol.eps_eq) continue;
        const double adversarial = t + (rowsum[r] - std::abs(t));
        if (std::abs(std::abs(adversarial) - 1.0) > tol.eps_eq) continue;
        claim(r, x);
        out.peaks.q[x].push_back(r);
        hval[r] = t;
      }
  } else {
    const double mesh = op.domain->mesh;
    for (std::size_t x = 0; x < nx; ++x) {
      const auto family =
          peak_family(op.domain, x, {4.0 * mesh, 2.0 * mesh, mesh});
      const ScalarFunction im0 = apply(op, family[0]);
      const ScalarFunction im1 = apply(op, family[1]);
      const ScalarFunction im2 = apply(op, family[2]);
      for (std::size_t r = 0; r < ny; ++r) {
        const double lo = std::min(
            {std::abs(im0.values[r]), std::abs(im1.values[r]),
             std::abs(im2.values[r])});
        if (lo < 1.0 - tol.eps_eq) continue;
        claim(r, x);
        out.peaks.q[x].push_back(r);
        hval[r] = im0.values[r];
      }
    }
  }

  for (std::size_t x = 0; x < nx; ++x)
    if (out.peaks.q[x].empty())
      throw Error(ErrorCode::EmptyPeakSet,
                  "no codomain sample witnesses the peak at a domain sample",
                  {{"x", x}});

  out.symbol.phi.assign(ny, PointRef::undefined());
  out.symbol.h.assign(ny, 0.0);
  const std::vector<char> dom_shell = deepest_shell_mask(*op.domain);
  for (std::size_t r = 0; r < ny; ++r) {
    if (owner[r] < 0) continue;
    out.y1.push_back(r);
    const std::size_t x = static_cast<std::size_t>(owner[r]);
    const FunctionalSupport fs = functional_support(op, r, tol);
    if (!supports_exactly(fs, x, dom_shell))
      throw Error(ErrorCode::EmptyPeakSet,
                  "support probe disagrees with the peak set",
                  {{"y", r}, {"x", x}, {"candidates", fs.candidates.size()}});
    if (std::abs(std::abs(hval[r]) - 1.0) > tol.eps_eq)
      throw Error(ErrorCode::NotIsometry, "recovered weight is not unimodular",
                  {{"y", r}, {"h", hval[r]}});
    out.symbol.phi[r] = PointRef::interior(x);
    out.symbol.h[r] = hval[r];
  }

  const ProbeCorpus corpus =
      make_probe_corpus(op.domain, tol, opts.corpus_seed, opts.corpus_random);
  double resid = 0.0;
  double leak = 0.0;
  std::vector<char> mask(nx, 0);
  for (std::size_t k = 0; k < corpus.functions.size(); ++k) {
    const ScalarFunction& f = corpus.functions[k];
    const ScalarFunction image = apply(op, f);
    std::fill(mask.begin(), mask.end(), 0);
    const Support supp = support(f, tol);
    for (std::size_t i : supp.indices) mask[i] = 1;
    for (std::size_t r : out.y1) {
      const std::size_t x = out.symbol.phi[r].index;
      resid = std::max(
          resid, std::abs(image.values[r] - out.symbol.h[r] * f.values[x]));
      if (!mask[x]) leak = std::max(leak, std::abs(image.values[r]));
    }
  }
  if (resid > tol.eps_eq)
    throw Error(ErrorCode::NotIsometry,
                "corpus reconstruction residual too large",
                {{"residual", resid}});
  if (leak > tol.eps_zero)
    throw Error(ErrorCode::NotIsometry,
                "output leaks off the support of its input", {{"leak", leak}});
  out.max_residual = resid;
  out.support_violation = leak;
  return out;
}

QuotientReport check_quotient(const Symbol& sym, const Space& domain,
                              const Space& codomain, double lipschitz) {
  if (sym.size() != codomain.size())
    throw Error(ErrorCode::InvalidSpec, "symbol size must match the codomain",
                {{"symbol", sym.size()}, {"codomain", codomain.size()}});
  QuotientReport r;
  std::vector<char> hit(domain.size(), 0);
  for (std::size_t y = 0; y < sym.size(); ++y)
    if (sym.phi[y].is_interior()) {
      if (sym.phi[y].index >= domain.size())
        throw Error(ErrorCode::InvalidSpec, "symbol target out of range",
                    {{"y", y}, {"target", sym.phi[y].index}});
      hit[sym.phi[y].index] = 1;
    }
  r.surjective = true;
  for (std::size_t x = 0; x < domain.size(); ++x)
    if (!hit[x]) {
      r.surjective = false;
      r.missing_index = x;
      break;
    }
  r.continuous = check_continuity(sym, domain, codomain, lipschitz).continuous;
  r.proper = check_proper(sym, domain, codomain).proper;
  r.quotient = r.surjective && r.continuous && r.proper;
  return r;
}

OpenMapReport check_open_map(const Symbol& sym, const Space& domain,
                             const Space& codomain) {
  if (sym.size() != codomain.size())
    throw Error(ErrorCode::InvalidSpec, "symbol size must match the codomain",
                {{"symbol", sym.size()}, {"codomain", codomain.size()}});
  OpenMapReport rep;
  const double ball = 2.0 * codomain.mesh * 1.0001;
  const double ystep = 1.1 * codomain.mesh;
  const double xstep = 1.1 * domain.mesh;
  std::vector<char> in_region(codomain.size(), 0);
  std::vector<char> in_image(domain.size(), 0);
  const std::vector<char> shell = deepest_shell_mask(codomain);

  for (std::size_t center = 0; center < codomain.size(); ++center) {
    if (!sym.phi[center].is_interior()) continue;
    std::vector<std::size_t> region;
    bool touches_shell = false;
    for (std::size_t q : neighbors(codomain, center, ball)) {
      if (shell[q]) touches_shell = true;
      if (sym.phi[q].is_interior()) region.push_back(q);
    }
    // Balls meeting the truncation shell read grid edges, not topology.
    if (touches_shell) continue;
    std::fill(in_region.begin(), in_region.end(), 0);
    std::fill(in_image.begin(), in_image.end(), 0);
    for (std::size_t q : region) {
      in_region[q] = 1;
      in_image[sym.phi[q].index] = 1;
    }
    for (std::size_t q : region) {
      bool interior_sample = true;
      for (std::size_t nb : neighbors(codomain, q, ystep))
        if (!in_region[nb]) {
          interior_sample = false;
          break;
        }
      if (!interior_sample) continue;
      for (std::size_t x2 : neighbors(domain, sym.phi[q].index, xstep))
        if (!in_image[x2]) {
          rep.open = false;
          OpenMapReport::Witness w;
          w.center = center;
          w.radius = ball;
          w.region = region;
          w.p = q;
          w.image = sym.phi[q].index;
          w.missing = x2;
          rep.witness = w;
          return rep;
        }
    }
  }
  return rep;
}

Decomposition decompose_dp(const std::vector<LinearOperator>& family,
                           const C0Tolerance& tol,
                           const AnalysisOptions& opts) {
  if (family.empty())
    throw Error(ErrorCode::InvalidSpec,
                "refinement family must contain at least one level");
  for (std::size_t k = 0; k < family.size(); ++k) {
    const DPReport rep = check_disjointness_preserving(family[k], tol);
    if (!rep.preserving)
      throw Error(ErrorCode::NotDP,
                  "a refinement level reads two domain regions in one row",
                  {{"level", k + 1},
                   {"row", rep.witness->row},
                   {"col_a", rep.witness->col_a},
                   {"col_b", rep.witness->col_b}});
  }

  const LinearOperator& fine = family.back();
  const Space& cod = *fine.codomain;
  const Space& dom = *fine.domain;
  const std::size_t ny = cod.size();
  const std::size_t depth = family.size();

  std::vector<std::vector<double>> norms(depth);
  for (std::size_t k = 0; k < depth; ++k) norms[k] = op_row_norms(family[k]);
  const std::vector<double>& finest = norms.back();

  Decomposition out;
  std::vector<int> cls(ny, 1);
  for (std::size_t y = 0; y < ny; ++y)
    if (finest[y] <= tol.eps_zero) cls[y] = 3;

  std::vector<double> act;
  for (std::size_t y = 0; y < ny; ++y)
    if (cls[y] != 3) act.push_back(finest[y]);
  double median = 0.0;
  if (!act.empty()) {
    std::sort(act.begin(), act.end());
    const std::size_t m = act.size() / 2;
    median = (act.size() % 2) ? act[m] : 0.5 * (act[m - 1] + act[m]);
  }

  if (depth >= 2) {
    std::vector<NearestIndex> lookup;
    lookup.reserve(depth - 1);
    for (std::size_t k = 0; k + 1 < depth; ++k)
      lookup.emplace_back(*family[k].codomain);
    for (std::size_t y = 0; y < ny; ++y) {
      if (cls[y] == 3) continue;
      std::vector<double> series(depth);
      for (std::size_t k = 0; k + 1 < depth; ++k)
        series[k] = norms[k][lookup[k].nearest(cod.points[y])];
      series[depth - 1] = finest[y];
      if (series.back() <= opts.blowup_factor * median) continue;
      const double slope = ls_slope(series);
      if (slope >= opts.blowup_alpha) {
        cls[y] = 2;
        out.blowup_evidence.push_back({y, series, slope});
      } else if (slope >= opts.blowup_alpha_low) {
        throw Error(ErrorCode::BlowupAmbiguous,
                    "norm growth sits between the bounded and blow-up bands",
                    {{"y", y},
                     {"slope", slope},
                     {"final", series.back()},
                     {"baseline_median", median}});
      }
    }
  }

  for (std::size_t y = 0; y < ny; ++y) {
    if (cls[y] == 1)
      out.y1.push_back(y);
    else if (cls[y] == 2)
      out.y2.push_back(y);
    else
      out.y3.push_back(y);
  }

  out.symbol.phi.assign(ny, PointRef::undefined());
  out.symbol.h.assign(ny, 0.0);
  const std::vector<char> dom_shell = deepest_shell_mask(dom);
  for (std::size_t y = 0; y < ny; ++y) {
    if (cls[y] == 3) continue;
    const FunctionalSupport fs = functional_support(fine, y, tol);
    std::size_t x = 0;
    std::size_t interiors = 0;
    for (const PointRef& c : fs.candidates)
      if (c.is_interior()) {
        x = c.index;
        ++interiors;
      }
    if (interiors != 1 || !supports_exactly(fs, x, dom_shell))
      throw Error(ErrorCode::NotDP,
                  "active row needs exactly one finite support candidate",
                  {{"y", y}, {"candidates", fs.candidates.size()}});
    out.symbol.phi[y] = PointRef::interior(x);
    double hv = 0.0;
    for (const auto& [c, v] : sparse_row(fine, y))
      hv += v * hat_value(dom, c, x, 4.0 * dom.mesh);
    out.symbol.h[y] = hv;
  }

  const ProbeCorpus corpus =
      make_probe_corpus(fine.domain, tol, opts.corpus_seed, opts.corpus_random);
  double resid = 0.0, leak = 0.0, y3max = 0.0;
  std::vector<char> mask(dom.size(), 0);
  for (const ScalarFunction& f : corpus.functions) {
    const ScalarFunction image = apply(fine, f);
    std::fill(mask.begin(), mask.end(), 0);
    for (std::size_t i : support(f, tol).indices) mask[i] = 1;
    for (std::size_t y = 0; y < ny; ++y) {
      if (cls[y] == 1) {
        const std::size_t x = out.symbol.phi[y].index;
        resid = std::max(
            resid, std::abs(image.values[y] - out.symbol.h[y] * f.values[x]));
        if (!mask[x]) leak = std::max(leak, std::abs(image.values[y]));
      } else if (cls[y] == 3) {
        y3max = std::max(y3max, std::abs(image.values[y]));
      }
    }
  }
  if (resid > tol.eps_eq)
    throw Error(ErrorCode::NotDP,
                "representation residual exceeded on the corpus",
                {{"residual", resid}});
  if (leak > tol.eps_zero)
    throw Error(ErrorCode::NotDP, "output leaks off the support of its input",
                {{"leak", leak}});
  if (y3max > tol.eps_zero * (1.0 + 1e-7))
    throw Error(ErrorCode::NotDP, "annihilated rows still move corpus mass",
                {{"max", y3max}});
  out.max_residual = resid;
  out.y3_max = y3max;

  if (!out.y2.empty()) {
    std::vector<std::pair<Point, std::size_t>> images;
    for (std::size_t y : out.y2)
      images.emplace_back(dom.points[out.symbol.phi[y].index],
                          out.symbol.phi[y].index);
    std::sort(images.begin(), images.end(),
              [](const auto& a, const auto& b) {
                if (a.first.x != b.first.x) return a.first.x < b.first.x;
                return a.first.y < b.first.y;
              });
    const double radius = family.front().domain->mesh * 1.0001;
    Point rep_point = images.front().first;
    out.f_set.push_back(PointRef::interior(images.front().second));
    for (const auto& [p, idx] : images) {
      const double d = std::hypot(p.x - rep_point.x, p.y - rep_point.y);
      if (d > radius) {
        rep_point = p;
        out.f_set.push_back(PointRef::interior(idx));
      }
    }
    if (out.f_set.size() > depth)
      throw Error(ErrorCode::BlowupAmbiguous,
                  "blow-up images exceed the refinement depth",
                  {{"images", out.f_set.size()}, {"levels", depth}});
  }
  return out;
}

Decomposition decompose_dp(const LinearOperator& op, const C0Tolerance& tol,
                           const AnalysisOptions& opts) {
  return decompose_dp(std::vector<LinearOperator>{op}, tol, opts);
}

BijectiveRecovery recover_bijective_dp(const LinearOperator& op,
                                       const C0Tolerance& tol) {
  if (!op.is_matrix())
    throw Error(ErrorCode::InvalidSpec,
                "bijective recovery expects an explicit matrix");
  const Matrix& m = op.matrix();
  if (m.rows != m.cols)
    throw Error(ErrorCode::NotBijective, "matrix is not square",
                {{"rows", m.rows}, {"cols", m.cols}});
  const DPReport rep = check_disjointness_preserving(op, tol);
  if (!rep.preserving)
    throw Error(ErrorCode::NotDP, "a row reads two domain regions",
                {{"row", rep.witness->row},
                 {"col_a", rep.witness->col_a},
                 {"col_b", rep.witness->col_b}});

  const std::size_t n = m.rows;
  std::vector<std::size_t> col_of(n, 0);
  std::vector<double> weight(n, 0.0);
  std::vector<int> row_of(n, -1);
  for (std::size_t r = 0; r < n; ++r) {
    bool found = false;
    for (std::size_t c = 0; c < n; ++c) {
      const double v = m.at(r, c);
      if (std::abs(v) > tol.eps_zero) {
        col_of[r] = c;
        weight[r] = v;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(ErrorCode::NotBijective, "a row annihilates every input",
                  {{"row", r}});
    if (row_of[col_of[r]] != -1)
      throw Error(ErrorCode::NotBijective,
                  "two rows read the same domain sample",
                  {{"col", col_of[r]},
                   {"row_a", row_of[col_of[r]]},
                   {"row_b", r}});
    row_of[col_of[r]] = static_cast<int>(r);
  }
  for (std::size_t c = 0; c < n; ++c)
    if (row_of[c] == -1)
      throw Error(ErrorCode::NotBijective, "a domain sample is never read",
                  {{"col", c}});

  BijectiveRecovery out;
  out.symbol.phi.resize(n);
  out.symbol.h.resize(n);
  out.inverse.phi.resize(n);
  out.inverse.h.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.symbol.phi[r] = PointRef::interior(col_of[r]);
    out.symbol.h[r] = weight[r];
  }
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t r = static_cast<std::size_t>(row_of[c]);
    out.inverse.phi[c] = PointRef::interior(r);
    out.inverse.h[c] = 1.0 / weight[r];
  }
  return out;
}

ExtensionReport attempt_extension(const LinearOperator& op,
                                  const std::string& mode,
                                  const C0Tolerance& tol,
                                  const AnalysisOptions& opts) {
  if (mode != "isometric" && mode != "dp")
    throw Error(ErrorCode::InvalidSpec,
                "mode must be \"isometric\" or \"dp\"", {{"mode", mode}});
  if (op.is_matrix())
    throw Error(ErrorCode::InvalidSpec,
                "extension needs a weighted-composition symbol");
  const Symbol& sym = op.symbol();
  const SpacePtr& domain = op.domain;
  const SpacePtr& codomain = op.codomain;
  if (domain->is_compact_model || codomain->is_compact_model)
    throw Error(ErrorCode::InvalidSpec,
                "extension applies to noncompact models on both sides");

  const PropernessReport pr = check_proper(sym, *domain, *codomain);
  if (!pr.proper)
    throw Error(ErrorCode::NotProper,
                "symbol is not proper; infinity cannot absorb the escape",
                {{"x_level", pr.witness->x_level},
                 {"tail", pr.witness->tail_label},
                 {"escaping_count", pr.witness->escaping.size()}});

  const ForcedUnit fu = forced_unit(op, tol);
  const std::size_t ny = codomain->size();
  std::vector<char> active(ny, 0);
  double gb = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    if (!fu.determined[y]) continue;
    if (!sym.phi[y].is_interior()) continue;
    const double ah = std::abs(sym.h[y]);
    if (mode == "dp") {
      if (ah > tol.eps_zero) active[y] = 1;
    } else {
      const double slack = 1.0 - ah;
      if (slack <= tol.eps_eq) {
        active[y] = 1;
        gb = std::max(gb, std::max(0.0, slack));
      }
    }
  }

  ExtensionReport rep;
  rep.mode = mode;
  rep.g_bound = gb;
  for (const Tail& tail : codomain->tails) {
    const TailEstimate est = tail_estimate(tail, fu.value, active);
    if (est.spread > opts.limit_gap_tol)
      throw Error(ErrorCode::GridTooCoarse,
                  "forced values do not settle along the tail",
                  {{"tail", tail.label}, {"spread", est.spread}});
    rep.h_tail_limits.push_back({tail.label, est.value, est.spread});
  }
  double gap = 0.0;
  for (std::size_t a = 0; a < rep.h_tail_limits.size(); ++a)
    for (std::size_t b = a + 1; b < rep.h_tail_limits.size(); ++b)
      gap = std::max(gap, std::abs(rep.h_tail_limits[a].value -
                                   rep.h_tail_limits[b].value));
  rep.limit_gap = gap;

  if (gap > opts.limit_gap_tol) {
    rep.extendable = false;
    rep.note = "tail limits disagree; no continuous value at infinity exists";
    return rep;
  }

  double linf = 0.0;
  for (const TailLimit& t : rep.h_tail_limits) linf += t.value;
  if (!rep.h_tail_limits.empty())
    linf /= static_cast<double>(rep.h_tail_limits.size());

  const SpacePtr domain_ext = append_infinity(*domain);
  const SpacePtr codomain_ext = append_infinity(*codomain);
  Symbol ext;
  ext.phi = sym.phi;
  ext.h = sym.h;
  ext.phi.push_back(PointRef::interior(domain->size()));
  ext.h.push_back(linf);
  const LinearOperator eop{domain_ext, codomain_ext, ext};
  if (mode == "dp") {
    if (!check_disjointness_preserving(eop, tol).preserving)
      throw Error(ErrorCode::ModeCheckFailed,
                  "compactified operator fails the disjointness row check");
  } else {
    const IsometryReport iso = check_isometry(eop, tol);
    if (!iso.isometry) {
      ordered_json detail = {{"note", iso.note}};
      if (iso.bad_row) detail["bad_row"] = *iso.bad_row;
      if (iso.uncovered_column) detail["uncovered_column"] = *iso.uncovered_column;
      throw Error(ErrorCode::ModeCheckFailed,
                  "compactified operator fails the norm-preservation check",
                  detail);
    }
  }
  rep.extendable = true;
  rep.extension = std::move(ext);
  rep.domain_ext = domain_ext;
  rep.codomain_ext = codomain_ext;
  rep.note = "extends continuously by the common tail limit";
  return rep;
}

ObstructionReport reproduce_example9_numerics(const std::string& variant,
                                              double radius, std::size_t cells,
                                              const C0Tolerance& tol,
                                              const AnalysisOptions& opts) {
  if (variant != "flip" && variant != "symmetric" && variant != "zero")
    throw Error(ErrorCode::InvalidSpec,
                "variant must be \"flip\", \"symmetric\", or \"zero\"",
                {{"variant", variant}});
  if (radius < 50.0 || cells < 2000)
    throw Error(ErrorCode::GridTooCoarse,
                "obstruction numerics need radius >= 50 and cells >= 2000",
                {{"radius", radius}, {"cells", cells}});
  if (cells % 2 != 0)
    throw Error(ErrorCode::InvalidSpec, "cell count must be even",
                {{"cells", cells}});

  const SpacePtr domain =
      make_interval_space(0.0, radius, cells / 2, TailSpec::plus_only());
  const SpacePtr codomain =
      make_interval_space(-radius, radius, cells, TailSpec::both());
  const std::size_t ny = codomain->size();
  const std::size_t center = cells / 2;

  Symbol sym;
  sym.phi.resize(ny);
  sym.h.resize(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    const double yc = codomain->points[j].x;
    sym.phi[j] = PointRef::interior(j >= center ? j - center : center - j);
    if (variant == "flip")
      sym.h[j] = yc > 2.0 ? 1.0 : (yc < 0.0 ? -1.0 : yc - 1.0);
    else if (variant == "symmetric")
      sym.h[j] = std::abs(yc) > 2.0 ? 1.0 : std::abs(yc) - 1.0;
    else
      sym.h[j] = 0.0;
  }
  const LinearOperator op =
      build_weighted_composition(domain, codomain, sym, tol);

  const ForcedUnit fu = forced_unit(op, tol);
  ObstructionReport rep;
  rep.variant = variant;
  rep.radius = radius;
  rep.cells = cells;
  for (std::size_t y = 0; y < ny; ++y)
    if (fu.determined[y])
      rep.determined_radius =
          std::max(rep.determined_radius, std::abs(codomain->points[y].x));

  for (const Tail& tail : codomain->tails) {
    const TailEstimate est = tail_estimate(tail, fu.value, fu.determined);
    if (tail.direction > 0)
      rep.t1_limit_pos = est.value;
    else
      rep.t1_limit_neg = est.value;
  }
  rep.limit_gap = std::abs(rep.t1_limit_pos - rep.t1_limit_neg);

  // Inferred bound on the mass the limit functional may place at infinity:
  // a norm-one functional with |h(y)| close to 1 has at most 1 - |h(y)|
  // left for the ideal point.
  for (std::size_t y = 0; y < ny; ++y) {
    if (!fu.determined[y]) continue;
    const double yc = codomain->points[y].x;
    const double slack = std::max(0.0, 1.0 - std::abs(sym.h[y]));
    if (yc > 2.5) rep.g_bound_pos = std::max(rep.g_bound_pos, slack);
    if (yc < -2.5) rep.g_bound_neg = std::max(rep.g_bound_neg, slack);
  }
  rep.g_bound = std::max(rep.g_bound_pos, rep.g_bound_neg);

  for (std::size_t y = 0; y < ny; ++y) {
    if (!fu.determined[y]) continue;
    const double yc = codomain->points[y].x;
    if (yc <= 2.5) continue;
    const std::size_t mirror = cells - y;  // sample at -yc on the even grid
    if (!fu.determined[mirror]) continue;
    const double a = std::max(0.0, 1.0 - std::abs(sym.h[y]));
    const double b = std::max(0.0, 1.0 - std::abs(sym.h[mirror]));
    rep.mirror_product_max = std::max(rep.mirror_product_max, a * b);
  }

  rep.l_bar = 0.5 * (rep.t1_limit_pos + rep.t1_limit_neg);
  rep.contradiction = rep.limit_gap > opts.limit_gap_tol;
  rep.margin = rep.contradiction ? std::abs(rep.l_bar * rep.l_bar - 1.0) : 0.0;
  return rep;
}

}  // namespace wcl
