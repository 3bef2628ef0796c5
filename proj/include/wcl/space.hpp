#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace wcl {

/// Sample coordinates in R^d, d in {1, 2}. One-dimensional spaces keep y = 0.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Reference to a sample of a space, to the ideal point at infinity, or to
/// nothing (used by partial symbols whose map is only defined on a subset).
struct PointRef {
  enum class Kind { Interior, Infinity, Undefined };

  Kind kind = Kind::Undefined;
  std::size_t index = 0;  // meaningful only when kind == Interior

  static PointRef interior(std::size_t i) { return {Kind::Interior, i}; }
  static PointRef infinity() { return {Kind::Infinity, 0}; }
  static PointRef undefined() { return {Kind::Undefined, 0}; }

  bool is_interior() const { return kind == Kind::Interior; }
  bool is_infinity() const { return kind == Kind::Infinity; }
  bool is_undefined() const { return kind == Kind::Undefined; }

  friend bool operator==(const PointRef& a, const PointRef& b) {
    return a.kind == b.kind && (a.kind != Kind::Interior || a.index == b.index);
  }
};

/// One escape direction of a noncompact model: the indices of the samples
/// lying beyond the first exhaustion window, ordered by escape progression.
struct Tail {
  std::string label;    // "+inf" or "-inf"
  int direction = +1;   // sign of the escape coordinate (x)
  std::vector<std::size_t> indices;
};

/// Finite model of a locally compact Hausdorff space: a sample grid with a
/// mesh scale, a nested exhaustion by compact windows, and labeled tails
/// when the modeled space is noncompact. Immutable after construction.
///
/// Exhaustion invariant: K_1 strictly nested in ... in K_L, and K_L is the
/// full sample set; window levels below L are the "compact" surrogates, so
/// tail behavior is always read from levels 1..L-1.
struct Space {
  int dim = 1;
  std::vector<Point> points;
  double mesh = 0.0;
  std::vector<std::vector<std::size_t>> exhaustion;
  bool is_compact_model = true;
  std::vector<Tail> tails;

  std::size_t size() const { return points.size(); }
  std::size_t levels() const { return exhaustion.size(); }
};

using SpacePtr = std::shared_ptr<const Space>;

/// Which ends of an interval model escape to infinity.
struct TailSpec {
  bool plus = false;
  bool minus = false;

  bool any() const { return plus || minus; }
  static TailSpec none() { return {false, false}; }
  static TailSpec plus_only() { return {true, false}; }
  static TailSpec minus_only() { return {false, true}; }
  static TailSpec both() { return {true, true}; }
};

/// Compact model of a finite discrete space: `count` unit-spaced samples
/// with a minimal nested exhaustion. The fixture space for small explicit
/// matrices. Throws InvalidSpec when count == 0.
SpacePtr make_discrete_space(std::size_t count);

/// Uniform grid on [a, b] with n cells (n + 1 samples). Tails mark which
/// ends are truncations of an unbounded direction; no tails gives a compact
/// model. Exhaustion windows grow from the non-tail anchor (or the center)
/// in `levels` strictly nested steps, clamped when the grid is too small to
/// host that many distinct windows. Throws InvalidSpec on bad input.
SpacePtr make_interval_space(double a, double b, std::size_t n, TailSpec tails,
                             std::size_t levels = 8);

/// Compact model of the extended line [-inf, +inf]: a uniform grid on
/// [-radius, radius] whose two extreme samples stand for the points at
/// -inf and +inf. Compact, so no tails.
SpacePtr make_extended_line_space(double radius, std::size_t n,
                                  std::size_t levels = 8);

/// Two-dimensional model of the x-axis together with the strip
/// {(x, y) : x >= 0, 0 <= y <= 1}: line samples on [-radius, radius] plus a
/// strip grid, sharing mesh 1 / cells_per_unit. Tails escape along +x (line
/// and strip) and -x (line only).
SpacePtr make_line_with_strip_space(double radius, std::size_t cells_per_unit,
                                    std::size_t levels = 8);

/// Checks every structural invariant, throwing InvalidSpec with a witness on
/// the first violation. Builders call this; deserialized spaces must pass it
/// before use.
void validate(const Space& s);

double distance(const Space& s, std::size_t i, std::size_t j);

/// Complement of the exhaustion window K_level (levels are 1-based), sorted.
std::vector<std::size_t> tail_points(const Space& s, std::size_t level);

/// Indices within `radius` of sample i, including i itself. Requires
/// radius >= mesh.
std::vector<std::size_t> neighbors(const Space& s, std::size_t i, double radius);

/// True when both handles refer to the same instance or to structurally
/// identical sample sets.
bool same_space(const Space& a, const Space& b);

}  // namespace wcl
