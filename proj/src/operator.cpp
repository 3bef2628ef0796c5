#include "wcl/operator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wcl/error.hpp"

namespace wcl {

namespace {

void require_spaces(const SpacePtr& domain, const SpacePtr& codomain) {
  if (!domain || !codomain)
    throw Error(ErrorCode::InvalidSpec, "operator needs both spaces");
}

Matrix materialize(const LinearOperator& op) {
  if (op.is_matrix()) return op.matrix();
  const Symbol& sym = op.symbol();
  Matrix m(op.codomain->size(), op.domain->size());
  for (std::size_t r = 0; r < sym.size(); ++r)
    if (sym.phi[r].is_interior()) m.at(r, sym.phi[r].index) = sym.h[r];
  return m;
}

// Largest exhaustion level of a noncompact model whose complement is
// nonempty; 0 when no level carries tail region (compact models).
std::size_t last_tail_level(const Space& s) {
  if (s.is_compact_model) return 0;
  std::size_t last = 0;
  for (std::size_t lev = 1; lev <= s.levels(); ++lev)
    if (s.exhaustion[lev - 1].size() < s.size()) last = lev;
  return last;
}

std::string joined_tail_labels(const Space& s,
                               const std::vector<std::size_t>& indices) {
  std::vector<int> tail_of(s.size(), -1);
  for (std::size_t t = 0; t < s.tails.size(); ++t)
    for (std::size_t j : s.tails[t].indices) tail_of[j] = static_cast<int>(t);
  std::set<int> seen;
  for (std::size_t j : indices)
    if (tail_of[j] >= 0) seen.insert(tail_of[j]);
  std::string out;
  for (int t : seen) {
    if (!out.empty()) out += ",";
    out += s.tails[t].label;
  }
  return out;
}

}  // namespace

WeightBounds weight_bounds(const Symbol& sym) {
  WeightBounds wb;
  bool first = true;
  for (std::size_t r = 0; r < sym.size(); ++r) {
    if (!sym.phi[r].is_interior()) continue;
    const double w = std::abs(sym.h[r]);
    if (first) {
      wb.lower = wb.upper = w;
      first = false;
    } else {
      wb.lower = std::min(wb.lower, w);
      wb.upper = std::max(wb.upper, w);
    }
  }
  return wb;
}

LinearOperator make_matrix_operator(const SpacePtr& domain,
                                    const SpacePtr& codomain, Matrix m) {
  require_spaces(domain, codomain);
  if (m.rows != codomain->size() || m.cols != domain->size() ||
      m.a.size() != m.rows * m.cols)
    throw Error(ErrorCode::InvalidSpec, "matrix shape must match the spaces",
                {{"rows", m.rows},
                 {"cols", m.cols},
                 {"codomain", codomain->size()},
                 {"domain", domain->size()}});
  for (double v : m.a)
    if (!std::isfinite(v))
      throw Error(ErrorCode::InvalidSpec, "matrix entries must be finite");
  return LinearOperator{domain, codomain, std::move(m)};
}

ScalarFunction apply(const LinearOperator& op, const ScalarFunction& f) {
  require_spaces(op.domain, op.codomain);
  if (!f.space || f.values.size() != f.space->size())
    throw Error(ErrorCode::InvalidSpec, "function values must match space size");
  if (!same_space(*f.space, *op.domain))
    throw Error(ErrorCode::SpaceMismatch,
                "function lives on a different space than the domain");
  ScalarFunction out;
  out.space = op.codomain;
  out.values.assign(op.codomain->size(), 0.0);
  if (op.is_matrix()) {
    const Matrix& m = op.matrix();
    for (std::size_t r = 0; r < m.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) s += m.at(r, c) * f.values[c];
      out.values[r] = s;
    }
  } else {
    const Symbol& sym = op.symbol();
    for (std::size_t r = 0; r < sym.size(); ++r)
      if (sym.phi[r].is_interior())
        out.values[r] = sym.h[r] * f.values[sym.phi[r].index];
  }
  return out;
}

LinearOperator to_matrix(const LinearOperator& op) {
  require_spaces(op.domain, op.codomain);
  return LinearOperator{op.domain, op.codomain, materialize(op)};
}

ContinuityReport check_continuity(const Symbol& sym, const Space& domain,
                                  const Space& codomain, double lipschitz) {
  ContinuityReport rep;
  const double reach = 3.0 * codomain.mesh * (1.0 + 1e-9);
  for (std::size_t i = 0; i + 1 < codomain.size(); ++i) {
    if (!sym.phi[i].is_interior()) continue;
    for (std::size_t j = i + 1; j < codomain.size(); ++j) {
      if (!sym.phi[j].is_interior()) continue;
      const double dy = distance(codomain, i, j);
      if (dy > reach) continue;
      const double dx = distance(domain, sym.phi[i].index, sym.phi[j].index);
      if (dx > lipschitz * dy + 1e-12 * (1.0 + dy)) {
        rep.continuous = false;
        rep.witness = ContinuityReport::Witness{i, j, dy, dx};
        return rep;
      }
    }
  }
  return rep;
}

PropernessReport check_proper(const Symbol& sym, const Space& domain,
                              const Space& codomain) {
  PropernessReport rep;
  const std::size_t shell_level = last_tail_level(codomain);
  if (shell_level == 0) return rep;  // compact codomain: nothing escapes
  std::vector<char> in_shell(codomain.size(), 0);
  for (std::size_t j : tail_points(codomain, shell_level)) in_shell[j] = 1;

  // Every window with compact meaning must pull back clear of the deepest
  // codomain shell. For a compact domain the full window counts too.
  const std::size_t top =
      domain.is_compact_model ? domain.levels() : last_tail_level(domain);
  for (std::size_t lev = 1; lev <= top; ++lev) {
    std::vector<char> in_window(domain.size(), 0);
    for (std::size_t c : domain.exhaustion[lev - 1]) in_window[c] = 1;
    std::vector<std::size_t> escaping;
    for (std::size_t r = 0; r < codomain.size(); ++r)
      if (in_shell[r] && sym.phi[r].is_interior() &&
          in_window[sym.phi[r].index])
        escaping.push_back(r);
    if (!escaping.empty()) {
      rep.proper = false;
      rep.witness = PropernessReport::Witness{
          lev, escaping, joined_tail_labels(codomain, escaping)};
      return rep;
    }
  }
  return rep;
}

double row_one_norm(const Matrix& m, std::size_t r) {
  double s = 0.0;
  for (std::size_t c = 0; c < m.cols; ++c) s += std::abs(m.at(r, c));
  return s;
}

IsometryReport check_isometry(const LinearOperator& op, const C0Tolerance& tol) {
  require_spaces(op.domain, op.codomain);
  const Matrix m = materialize(op);
  IsometryReport rep;

  rep.rows_contractive = true;
  for (std::size_t r = 0; r < m.rows; ++r)
    if (row_one_norm(m, r) > 1.0 + tol.eps_eq) {
      rep.rows_contractive = false;
      rep.bad_row = r;
      break;
    }

  // A covering row reads one sample with modulus 1 and nothing else.
  std::vector<char> covered(m.cols, 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::size_t nonzero = 0;
    std::size_t col = 0;
    double top = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double v = std::abs(m.at(r, c));
      if (v > tol.eps_zero) {
        ++nonzero;
        col = c;
        top = v;
      }
    }
    if (nonzero == 1 && std::abs(top - 1.0) <= tol.eps_eq) covered[col] = 1;
  }
  rep.columns_covered = true;
  for (std::size_t c = 0; c < m.cols; ++c)
    if (!covered[c]) {
      rep.columns_covered = false;
      rep.uncovered_column = c;
      break;
    }

  rep.isometry = rep.rows_contractive && rep.columns_covered;

  if (m.cols <= 12) {
    rep.definitional = definitional_isometry(m, tol.eps_eq);
    rep.note = (*rep.definitional == rep.isometry)
                   ? "agrees with the sign-vertex corpus"
                   : "structural and definitional verdicts disagree";
  } else {
    rep.note =
        "TooLargeForDefinitionalCheck: sign-vertex corpus capped at 12 "
        "domain samples, structural verdict only";
  }
  return rep;
}

DPReport check_disjointness_preserving(const LinearOperator& op,
                                       const C0Tolerance& tol) {
  require_spaces(op.domain, op.codomain);
  DPReport rep;
  rep.preserving = true;
  // A symbol row reads exactly one domain sample, so the row criterion
  // holds without materializing.
  if (!op.is_matrix()) return rep;
  const Matrix& m = op.matrix();
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::size_t first = 0;
    bool have_first = false;
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (std::abs(m.at(r, c)) <= tol.eps_zero) continue;
      if (!have_first) {
        first = c;
        have_first = true;
      } else {
        rep.preserving = false;
        rep.witness = DPReport::Witness{r, first, c};
        return rep;
      }
    }
  }
  return rep;
}

InjectionReport check_injection(const LinearOperator& op, const C0Tolerance& tol,
                                const BuildOptions& opts) {
  require_spaces(op.domain, op.codomain);
  InjectionReport rep;
  if (op.is_matrix()) {
    rep.route = "vertex";
    const Matrix& m = op.matrix();
    if (m.cols > 20)
      throw Error(ErrorCode::TooLargeForDefinitionalCheck,
                  "sign-vertex scan capped at 20 columns",
                  {{"cols", m.cols}});
    const VertexScan scan = vertex_norm_scan(m);
    rep.lower_gain = scan.min_norm;
    rep.upper_gain = scan.max_norm;
    rep.injective = scan.min_norm > tol.eps_zero;
    rep.reason = rep.injective
                     ? "gain bounded below over the sign-vertex corpus"
                     : "a sign vertex is flattened below the zero threshold";
    return rep;
  }

  rep.route = "symbol";
  const Symbol& sym = op.symbol();
  const WeightBounds wb = weight_bounds(sym);
  rep.lower_gain = wb.lower;
  rep.upper_gain = wb.upper;

  std::vector<char> read(op.domain->size(), 0);
  for (std::size_t r = 0; r < sym.size(); ++r)
    if (sym.phi[r].is_interior()) read[sym.phi[r].index] = 1;
  for (std::size_t c = 0; c < op.domain->size(); ++c)
    if (!read[c]) {
      rep.injective = false;
      rep.witness_index = c;
      rep.reason = "a domain sample is never read; its indicator maps to zero";
      return rep;
    }

  if (!(wb.lower > opts.weight_floor)) {
    rep.injective = false;
    rep.reason = "weight vanishes somewhere, flattening local data";
    return rep;
  }
  if (wb.upper > opts.weight_cap) {
    rep.injective = false;
    rep.reason = "weight exceeds the admissible cap";
    return rep;
  }
  if (!check_continuity(sym, *op.domain, *op.codomain, opts.lipschitz)
           .continuous) {
    rep.injective = false;
    rep.reason = "symbol map breaks the mesh-scale modulus bound";
    return rep;
  }
  if (!check_proper(sym, *op.domain, *op.codomain).proper) {
    rep.injective = false;
    rep.reason = "symbol map is not proper";
    return rep;
  }
  rep.injective = true;
  rep.reason =
      "classical criteria hold: continuous, proper, onto, weight bounded "
      "above and below";
  return rep;
}

VertexScan vertex_norm_scan(const Matrix& m) {
  if (m.cols == 0 || m.cols > 20)
    throw Error(ErrorCode::TooLargeForDefinitionalCheck,
                "sign-vertex scan needs 1..20 columns", {{"cols", m.cols}});
  VertexScan scan;
  std::vector<double> v(m.cols, 1.0);
  bool first = true;
  const std::size_t total = std::size_t{1} << m.cols;
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t c = 0; c < m.cols; ++c)
      v[c] = (mask >> c) & 1 ? -1.0 : 1.0;
    double norm = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) s += m.at(r, c) * v[c];
      norm = std::max(norm, std::abs(s));
    }
    if (first || norm > scan.max_norm) scan.max_norm = norm;
    if (first || norm < scan.min_norm) {
      scan.min_norm = norm;
      scan.argmin = v;
    }
    first = false;
  }
  return scan;
}

bool definitional_isometry(const Matrix& m, double eps) {
  if (m.cols == 0 || m.cols > 20)
    throw Error(ErrorCode::TooLargeForDefinitionalCheck,
                "sign-vertex corpus needs 1..20 columns", {{"cols", m.cols}});
  std::vector<double> v(m.cols, 1.0);
  const std::size_t total = std::size_t{1} << m.cols;
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t c = 0; c < m.cols; ++c)
      v[c] = (mask >> c) & 1 ? -1.0 : 1.0;
    double norm = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) s += m.at(r, c) * v[c];
      norm = std::max(norm, std::abs(s));
    }
    if (std::abs(norm - 1.0) > eps) return false;
  }
  for (std::size_t c = 0; c < m.cols; ++c) {
    double norm = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r)
      norm = std::max(norm, std::abs(m.at(r, c)));
    if (std::abs(norm - 1.0) > eps) return false;
  }
  return true;
}

bool definitional_disjointness(const Matrix& m, const C0Tolerance& tol) {
  // Columns are the images of the one-sample indicators; test every
  // disjoint pair with the same normalization are_disjoint uses.
  std::vector<double> colmax(m.cols, 0.0);
  for (std::size_t c = 0; c < m.cols; ++c)
    for (std::size_t r = 0; r < m.rows; ++r)
      colmax[c] = std::max(colmax[c], std::abs(m.at(r, c)));
  for (std::size_t a = 0; a < m.cols; ++a)
    for (std::size_t b = a + 1; b < m.cols; ++b) {
      double prod = 0.0;
      for (std::size_t r = 0; r < m.rows; ++r)
        prod = std::max(prod, std::abs(m.at(r, a) * m.at(r, b)));
      const double scale = std::max(colmax[a], colmax[b]);
      if (scale > 0.0 && prod > tol.eps_zero * scale) return false;
    }
  return true;
}

LinearOperator build_weighted_composition(const SpacePtr& domain,
                                          const SpacePtr& codomain,
                                          Symbol sym, const C0Tolerance& tol,
                                          const BuildOptions& opts) {
  require_spaces(domain, codomain);
  if (sym.phi.size() != codomain->size() || sym.h.size() != codomain->size())
    throw Error(ErrorCode::InvalidSpec,
                "symbol must assign one target and weight per codomain sample",
                {{"phi", sym.phi.size()},
                 {"h", sym.h.size()},
                 {"codomain", codomain->size()}});
  for (std::size_t r = 0; r < sym.size(); ++r) {
    if (!sym.phi[r].is_interior() || sym.phi[r].index >= domain->size())
      throw Error(ErrorCode::InvalidSpec,
                  "symbol must read interior domain samples", {{"row", r}});
    if (!std::isfinite(sym.h[r]))
      throw Error(ErrorCode::InvalidSpec, "weights must be finite",
                  {{"row", r}});
  }

  const WeightBounds wb = weight_bounds(sym);
  if (wb.upper > opts.weight_cap)
    throw Error(ErrorCode::UnboundedWeight, "weight exceeds the cap",
                {{"max_weight", wb.upper}, {"cap", opts.weight_cap}});

  // With the weight bounded away from zero, the classical equivalence makes
  // continuity and properness of the map necessary; demand them up front.
  if (wb.lower > opts.weight_floor) {
    const ContinuityReport cont =
        check_continuity(sym, *domain, *codomain, opts.lipschitz);
    if (!cont.continuous) {
      const auto& w = *cont.witness;
      throw Error(ErrorCode::NotContinuous,
                  "symbol map breaks the mesh-scale modulus bound",
                  {{"y_a", w.y_a},
                   {"y_b", w.y_b},
                   {"dist_y", w.dist_y},
                   {"dist_x", w.dist_x},
                   {"lipschitz", opts.lipschitz}});
    }
    const PropernessReport prop = check_proper(sym, *domain, *codomain);
    if (!prop.proper) {
      const auto& w = *prop.witness;
      std::vector<std::size_t> sample(
          w.escaping.begin(),
          w.escaping.begin() + std::min<std::size_t>(w.escaping.size(), 16));
      throw Error(ErrorCode::NotProper,
                  "preimage of a proper window escapes along a tail",
                  {{"x_level", w.x_level},
                   {"tail", w.tail_label},
                   {"escaping_count", w.escaping.size()},
                   {"escaping_sample", sample}});
    }
  }

  LinearOperator op{domain, codomain, std::move(sym)};

  // Whatever the weight profile, certified inputs must land in certified
  // outputs; the slow-decay probes are what catch weights that amplify
  // faster than any admissible input decays.
  const std::size_t shell = last_tail_level(*codomain);
  if (shell != 0) {
    const ProbeCorpus corpus =
        make_probe_corpus(domain, tol, opts.corpus_seed, opts.corpus_random);
    for (std::size_t i = 0; i < corpus.functions.size(); ++i) {
      const ScalarFunction g = apply(op, corpus.functions[i]);
      const DecayProfile profile = c0_profile(g, tol);
      const double tail = profile.tail_max[shell - 1];
      if (tail > tol.eps_tail)
        throw Error(ErrorCode::OutputNotC0,
                    "a vanishing probe maps to mass stuck on the tail shell",
                    {{"probe", corpus.names[i]},
                     {"probe_values", corpus.functions[i].values},
                     {"tail_level", shell},
                     {"tail_max", tail},
                     {"threshold", tol.eps_tail}});
    }
  }
  return op;
}

}  // namespace wcl
