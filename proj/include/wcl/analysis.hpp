#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcl/funcspace.hpp"
#include "wcl/operator.hpp"
#include "wcl/space.hpp"

namespace wcl {

/// Knobs for the recovery and classification pipeline. The growth
/// thresholds decide when a norm sequence across refinement levels counts
/// as blowing up; the gap tolerance decides when two tail limits agree.
struct AnalysisOptions {
  std::uint64_t corpus_seed = 1729;
  std::size_t corpus_random = 32;
  double blowup_alpha = 0.5;       // least-squares exponent for blow-up
  double blowup_alpha_low = 0.25;  // below alpha but above this: ambiguous
  double blowup_factor = 10.0;     // final value vs baseline median
  double limit_gap_tol = 1e-3;     // tail limits closer than this agree
};

/// Where mass supported near a single domain point can still influence the
/// output at y: the sampled stand-in for the support of the functional
/// f -> Tf(y), probed with shrinking one-point neighborhoods.
struct FunctionalSupport {
  std::size_t y = 0;
  std::vector<PointRef> candidates;  // interior refs ascending, then infinity
};

FunctionalSupport functional_support(const LinearOperator& op, std::size_t y,
                                     const C0Tolerance& tol);

/// Per domain sample x, the codomain samples where every norm-one function
/// peaking at x keeps witnessing full norm after the operator.
struct PeakSets {
  std::vector<std::vector<std::size_t>> q;
};

struct IsometryRecovery {
  PeakSets peaks;
  std::vector<std::size_t> y1;  // ascending
  Symbol symbol;                // Undefined off y1
  double max_residual = 0.0;    // reconstruction residual over the corpus
  double support_violation = 0.0;  // worst |Tf(y)| with phi(y) off supp(f)
};

/// Constructive symbol recovery for into-isometries: peak sets, the
/// recovered region y1, and the unimodular weight. Throws NotIsometry when
/// the structural check fails or the recovered data misses its contracts,
/// EmptyPeakSet on numerical failure of a peak-set probe.
IsometryRecovery recover_isometry(const LinearOperator& op,
                                  const C0Tolerance& tol,
                                  const AnalysisOptions& opts = {});

struct QuotientReport {
  bool quotient = false;
  bool surjective = false;
  bool continuous = false;
  bool proper = false;
  std::optional<std::size_t> missing_index;  // unread domain sample
};

/// The classical route to "X is a quotient of Y1": surjectivity plus the
/// mesh-scale continuity and window properness checks, applied to the
/// defined rows of a (possibly partial) symbol.
QuotientReport check_quotient(const Symbol& sym, const Space& domain,
                              const Space& codomain, double lipschitz = 1.5);

struct OpenMapReport {
  bool open = true;
  struct Witness {
    std::size_t center = 0;          // ball defining the open region O
    double radius = 0.0;
    std::vector<std::size_t> region; // O as codomain indices
    std::size_t p = 0;               // interior sample of O
    std::size_t image = 0;           // phi(p)
    std::size_t missing = 0;         // domain neighbor of phi(p) off phi(O)
  };
  std::optional<Witness> witness;
};

/// Scans mesh-ball open sets: the map is open when the image of every such
/// ball covers the existing domain neighbors of every interior sample's
/// image. The witness exhibits a ball whose image is not open.
OpenMapReport check_open_map(const Symbol& sym, const Space& domain,
                             const Space& codomain);

/// Norm-growth record of one codomain sample across refinement levels.
struct BlowupSeries {
  std::size_t y = 0;           // index at the finest level
  std::vector<double> norms;   // one entry per refinement level
  double slope = 0.0;          // log-log least-squares exponent
};

struct Decomposition {
  std::vector<std::size_t> y1, y2, y3;  // ascending, partition the codomain
  Symbol symbol;                        // defined on y1 and y2
  std::vector<BlowupSeries> blowup_evidence;  // per y2 member
  std::vector<PointRef> f_set;          // clustered images of y2
  double max_residual = 0.0;            // y1 representation residual
  double y3_max = 0.0;                  // worst |Tf(y)| over y3 and corpus
};

/// Splits the codomain of a disjointness-preserving operator into the
/// weighted-composition region y1, the blow-up region y2 (only with a
/// refinement family), and the annihilated region y3. Throws NotDP when a
/// level fails the row check, BlowupAmbiguous when growth lands between
/// the thresholds.
Decomposition decompose_dp(const std::vector<LinearOperator>& family,
                           const C0Tolerance& tol,
                           const AnalysisOptions& opts = {});

Decomposition decompose_dp(const LinearOperator& op, const C0Tolerance& tol,
                           const AnalysisOptions& opts = {});

struct BijectiveRecovery {
  Symbol symbol;   // T as a weighted permutation
  Symbol inverse;  // T^{-1} as a weighted permutation
};

/// Normal form of a bijective disjointness-preserving matrix: the weighted
/// permutation symbol and its explicit inverse. Throws NotDP and
/// NotBijective.
BijectiveRecovery recover_bijective_dp(const LinearOperator& op,
                                       const C0Tolerance& tol);

struct TailLimit {
  std::string label;
  double value = 0.0;   // estimated limit of the forced unit image
  double spread = 0.0;  // max minus min over the estimation window
};

struct ExtensionReport {
  std::string mode;  // "isometric" or "dp"
  bool extendable = false;
  std::vector<TailLimit> h_tail_limits;
  double g_bound = 0.0;    // worst inferred atom at infinity where |h| ~ 1
  double limit_gap = 0.0;  // disagreement between the tail limits
  Symbol extension;        // over the compactified models when extendable
  SpacePtr domain_ext;
  SpacePtr codomain_ext;
  std::string note;
};

/// Decides whether the operator extends to the one-point compactifications
/// in the given mode. Computes the forced values of the extended image of
/// the constant one via an increasing-plateau limit, reads the per-tail
/// limits, and either certifies the obstruction (tail limits disagree) or
/// returns the compactified symbol after re-running the mode's check.
/// Throws NotProper, GridTooCoarse, ModeCheckFailed.
ExtensionReport attempt_extension(const LinearOperator& op,
                                  const std::string& mode,
                                  const C0Tolerance& tol,
                                  const AnalysisOptions& opts = {});

struct ObstructionReport {
  std::string variant;  // "flip", "symmetric", or "zero"
  double radius = 0.0;
  std::size_t cells = 0;
  double determined_radius = 0.0;  // |y| below which the limit stabilized
  double t1_limit_pos = 0.0;       // forced unit-image limit along +inf
  double t1_limit_neg = 0.0;
  double limit_gap = 0.0;
  double g_bound_pos = 0.0;        // inferred atom bound on y > 2.5
  double g_bound_neg = 0.0;        // inferred atom bound on y < -2.5
  double g_bound = 0.0;            // max of the two
  double mirror_product_max = 0.0; // sup of the two-sided atom products
  double l_bar = 0.0;              // only consistent common-limit candidate
  double margin = 0.0;             // distance of l_bar^2 from 1 when obstructed
  bool contradiction = false;
};

/// Scripted reproduction of the folded-line obstruction numerics: builds
/// the piecewise-sign weight on [-R, R] against the half-line domain,
/// computes the forced extension values, and reports the sign conditions,
/// the mirror products, and the common-limit contradiction margin.
/// Variants: "flip" (signs +1/-1), "symmetric" (+1/+1), "zero" (h = 0).
/// Throws GridTooCoarse below R = 50 or n = 2000.
ObstructionReport reproduce_example9_numerics(const std::string& variant,
                                              double radius, std::size_t cells,
                                              const C0Tolerance& tol,
                                              const AnalysisOptions& opts = {});

}  // namespace wcl
