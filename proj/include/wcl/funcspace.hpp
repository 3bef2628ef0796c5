#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wcl/space.hpp"

namespace wcl {

/// Numerical thresholds for treating sampled functions as elements of C0(X).
/// eps_tail bounds what may survive on the outermost exhaustion shell,
/// eps_zero separates zero from nonzero values, eps_eq is the equality slack.
struct C0Tolerance {
  double eps_tail = 1e-3;
  double eps_zero = 1e-6;
  double eps_eq = 1e-6;

  /// For exact small matrices and hand-built discrete fixtures.
  static C0Tolerance discrete() { return {1e-3, 1e-9, 1e-9}; }
  /// For sampled continuum models.
  static C0Tolerance continuum() { return {1e-3, 1e-6, 1e-6}; }
};

/// Scalar-valued sample vector over a space, real scalars throughout.
struct ScalarFunction {
  SpacePtr space;
  std::vector<double> values;
};

/// Cozero set together with the marker for mass that survives at every
/// exhaustion level (the sampled stand-in for "support reaches infinity").
struct Support {
  std::vector<std::size_t> indices;
  bool includes_infinity = false;
};

/// Tail maxima per exhaustion level plus the vanishing verdict: a function
/// is certified when it is below eps_tail on the outermost proper shell.
struct DecayProfile {
  std::vector<double> tail_max;
  bool certified = false;
};

double sup_norm(const ScalarFunction& f);

/// Indices where |f| exceeds eps_zero.
std::vector<std::size_t> cozero(const ScalarFunction& f, const C0Tolerance& tol);

/// Cozero set dilated by one mesh step; includes_infinity is set when the
/// cozero set meets every proper tail shell of a noncompact model.
Support support(const ScalarFunction& f, const C0Tolerance& tol);

DecayProfile c0_profile(const ScalarFunction& f, const C0Tolerance& tol);
bool is_c0_certified(const ScalarFunction& f, const C0Tolerance& tol);

/// max |f g| <= eps_zero * max(sup f, sup g); two zero functions count as
/// disjoint. Throws SpaceMismatch for functions over different spaces.
bool are_disjoint(const ScalarFunction& f, const ScalarFunction& g,
                  const C0Tolerance& tol);

/// Hat profiles of height exactly 1 at the given sample, one per width:
/// f(p) = max(0, 1 - dist(p, center) / width).
std::vector<ScalarFunction> peak_family(const SpacePtr& space,
                                        std::size_t center,
                                        const std::vector<double>& widths);

/// The classical ramp family on a model of [0, +inf): 1 on [0, n], linear
/// down to 0 on (n, 2n), 0 beyond. Throws TruncationTooSmall when 2n
/// exceeds the grid, InvalidSpec when the space is not a half-line model.
ScalarFunction tent(const SpacePtr& space, double n);

/// Height-1 function with cozero exactly the given region: distance-to-
/// complement profile with ramp width min(inradius, 4 mesh), so larger
/// regions carry an interior plateau at 1. The region must be nonempty
/// (EmptyRegion) and connected within one mesh step (InvalidSpec).
ScalarFunction bump(const SpacePtr& space, const std::vector<std::size_t>& region);

/// Indicator of a single sample.
ScalarFunction indicator(const SpacePtr& space, std::size_t i);

ScalarFunction constant(const SpacePtr& space, double value);

/// Deterministic corpus of certified probe functions: window bumps at each
/// proper exhaustion level, ramp family when the space models [0, +inf),
/// slow-decay exponential profiles at every certifiable rate, and seeded
/// random hat sums. Every member passes is_c0_certified.
struct ProbeCorpus {
  std::vector<ScalarFunction> functions;
  std::vector<std::string> names;
};

ProbeCorpus make_probe_corpus(const SpacePtr& space, const C0Tolerance& tol,
                              std::uint64_t seed, std::size_t random_count);

}  // namespace wcl
