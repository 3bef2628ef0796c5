#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wcl/funcspace.hpp"
#include "wcl/space.hpp"

namespace wcl {

/// Pointwise data of a weighted composition: for each codomain sample y the
/// operator reads the value at phi[y] and scales it by h[y]. Partial maps
/// (recovery output) mark rows outside their domain as Undefined.
struct Symbol {
  std::vector<PointRef> phi;
  std::vector<double> h;

  std::size_t size() const { return phi.size(); }
};

/// min |h| and max |h| over the codomain samples.
struct WeightBounds {
  double lower = 0.0;
  double upper = 0.0;
};

WeightBounds weight_bounds(const Symbol& sym);

/// Dense row-major matrix, rows indexed by codomain samples.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

/// Linear map between the function spaces of two sample models. Backed
/// either by an explicit matrix or by a weighted-composition symbol.
struct LinearOperator {
  SpacePtr domain;
  SpacePtr codomain;
  std::variant<Matrix, Symbol> backing;

  bool is_matrix() const { return std::holds_alternative<Matrix>(backing); }
  const Matrix& matrix() const { return std::get<Matrix>(backing); }
  const Symbol& symbol() const { return std::get<Symbol>(backing); }
};

/// Wraps a matrix after shape validation.
LinearOperator make_matrix_operator(const SpacePtr& domain,
                                    const SpacePtr& codomain, Matrix m);

/// Evaluates T at a sampled function. Throws SpaceMismatch when f does not
/// live on the domain model.
ScalarFunction apply(const LinearOperator& op, const ScalarFunction& f);

/// Materializes any backing as an explicit matrix operator.
LinearOperator to_matrix(const LinearOperator& op);

struct BuildOptions {
  double lipschitz = 1.5;       // mesh-scale modulus bound for phi
  double weight_floor = 1e-8;   // below this, |h| counts as vanishing
  double weight_cap = 1e30;     // above this, reject as unbounded weight
  std::uint64_t corpus_seed = 1729;
  std::size_t corpus_random = 32;
};

/// Validated weighted-composition constructor. When min |h| stays above the
/// floor, the symbol must pass the continuity and properness checks (the
/// classical sufficient conditions); in every case the probe corpus of
/// certified inputs must map to functions passing the vanishing check.
/// Throws InvalidSpec, UnboundedWeight, NotContinuous, NotProper, or
/// OutputNotC0.
LinearOperator build_weighted_composition(const SpacePtr& domain,
                                          const SpacePtr& codomain,
                                          Symbol sym, const C0Tolerance& tol,
                                          const BuildOptions& opts = {});

struct ContinuityReport {
  bool continuous = true;
  struct Witness {
    std::size_t y_a = 0;
    std::size_t y_b = 0;
    double dist_y = 0.0;
    double dist_x = 0.0;
  };
  std::optional<Witness> witness;
};

/// Mesh-scale modulus check: over every codomain pair within 3 mesh, the
/// symbol may move images by at most `lipschitz` times the pair distance.
ContinuityReport check_continuity(const Symbol& sym, const Space& domain,
                                  const Space& codomain, double lipschitz);

struct PropernessReport {
  bool proper = true;
  struct Witness {
    std::size_t x_level = 0;            // domain window whose preimage escapes
    std::vector<std::size_t> escaping;  // codomain samples deep in a tail
    std::string tail_label;
  };
  std::optional<Witness> witness;
};

/// Window surrogate for properness: the preimage of every proper domain
/// window must stay clear of the outermost codomain shell. The witness
/// lists an escaping preimage sequence.
PropernessReport check_proper(const Symbol& sym, const Space& domain,
                              const Space& codomain);

struct IsometryReport {
  bool isometry = false;
  bool rows_contractive = false;
  bool columns_covered = false;
  std::optional<std::size_t> bad_row;
  std::optional<std::size_t> uncovered_column;
  /// Set when the cube corpus was enumerated (cols <= 12); explains itself
  /// otherwise.
  std::optional<bool> definitional;
  std::string note;
};

/// Structural norm-preservation check: every row 1-norm at most 1 and every
/// column carrying a pure unit row. Cross-checked definitionally against
/// the sign-vertex and basis corpus when the domain is small enough.
IsometryReport check_isometry(const LinearOperator& op, const C0Tolerance& tol);

struct DPReport {
  bool preserving = false;
  struct Witness {
    std::size_t row = 0;
    std::size_t col_a = 0;
    std::size_t col_b = 0;
  };
  std::optional<Witness> witness;
};

/// Structural disjointness-preservation check: at most one entry above the
/// zero threshold per row. The witness row yields the indicator pair that
/// breaks the definitional property.
DPReport check_disjointness_preserving(const LinearOperator& op,
                                       const C0Tolerance& tol);

struct InjectionReport {
  bool injective = false;
  double lower_gain = 0.0;
  double upper_gain = 0.0;
  std::string route;  // "symbol" or "vertex"
  std::string reason;
  std::optional<std::size_t> witness_index;  // domain sample with Te_x == 0
};

/// Symbol route: continuity + properness + surjectivity + weight bounds.
/// Matrix route: sign-vertex scan of the gain (throws
/// TooLargeForDefinitionalCheck beyond 20 columns).
InjectionReport check_injection(const LinearOperator& op, const C0Tolerance& tol,
                                const BuildOptions& opts = {});

/// min and max of ||Tf|| over all +-1 sign vertices f.
struct VertexScan {
  double min_norm = 0.0;
  double max_norm = 0.0;
  std::vector<double> argmin;
};

VertexScan vertex_norm_scan(const Matrix& m);

/// Norm preservation over the sign-vertex corpus extended by the basis
/// vectors: the definitional side of the finite isometry equivalence.
bool definitional_isometry(const Matrix& m, double eps);

/// Definitional disjointness preservation over all indicator pairs.
bool definitional_disjointness(const Matrix& m, const C0Tolerance& tol);

double row_one_norm(const Matrix& m, std::size_t r);

}  // namespace wcl
