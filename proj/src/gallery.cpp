#include "wcl/gallery.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "wcl/analysis.hpp"
#include "wcl/error.hpp"
#include "wcl/io.hpp"
#include "wcl/operator.hpp"
#include "wcl/space.hpp"

namespace wcl {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::size_t nearest_index(const Space& s, double x) {
  const double step = s.mesh;
  const double first = s.points.front().x;
  const long long raw = std::llround((x - first) / step);
  if (raw < 0) return 0;
  const std::size_t idx = static_cast<std::size_t>(raw);
  return idx < s.size() ? idx : s.size() - 1;
}

void emit(std::vector<fs::path>& written, const ordered_json& doc,
          const fs::path& path) {
  save_json(doc, path);
  written.push_back(path);
}

// Identity reads on the nonnegative axis, exponentially damped two-sample
// averages below it, zero rows at the compactification stand-ins. The
// recovered norm-one region is exactly the nonnegative interior samples.
void gallery_example5(std::vector<fs::path>& written, const fs::path& dir,
                      const RunConfig& config) {
  const double radius = 20.0;
  const std::size_t n = 400;
  const double mesh = radius / double(n);
  const SpacePtr domain = make_interval_space(0.0, radius - mesh, n - 1,
                                              TailSpec::plus_only());
  const SpacePtr codomain = make_extended_line_space(radius, 2 * n);

  Matrix m(codomain->size(), domain->size());
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const double yc = codomain->points[j].x;
    if (yc >= 0.0) {
      m.at(j, j - n) = 1.0;
    } else {
      const double half = std::exp(yc) / 2.0;
      m.at(j, n - j) += half;
      m.at(j, 0) += half;
    }
  }
  const LinearOperator op = make_matrix_operator(domain, codomain, m);

  emit(written, operator_to_json(op, "domain", "codomain"),
       dir / "operator.json");
  emit(written, space_to_json(*domain), dir / "domain.json");
  emit(written, space_to_json(*codomain), dir / "codomain.json");

  const C0Tolerance tol = config.continuum();
  emit(written, isometry_to_json(check_isometry(op, tol)),
       dir / "isometry.json");

  ordered_json rec =
      isometry_recovery_to_json(recover_isometry(op, tol, config.analysis()));
  rec["note"] =
      "the recovered region is the nonnegative interior axis; whether that "
      "window is closed or open in the codomain is a boundary property the "
      "finite grid reports only qualitatively";
  emit(written, rec, dir / "recovery.json");
}

// Projection of the line-with-strip model onto the line: a quotient map
// (continuous, onto, proper) whose ball images are nevertheless not open.
void gallery_example6(std::vector<fs::path>& written, const fs::path& dir,
                      const RunConfig& config) {
  const double radius = 10.0;
  const std::size_t cells_per_unit = 4;
  const SpacePtr codomain = make_line_with_strip_space(radius, cells_per_unit);
  const SpacePtr domain = make_interval_space(
      -radius, radius, 2 * cells_per_unit * std::size_t(radius),
      TailSpec::both());

  Symbol sym;
  sym.phi.resize(codomain->size());
  sym.h.assign(codomain->size(), 1.0);
  for (std::size_t j = 0; j < codomain->size(); ++j)
    sym.phi[j] =
        PointRef::interior(nearest_index(*domain, codomain->points[j].x));

  const C0Tolerance tol = config.continuum();
  const LinearOperator op =
      build_weighted_composition(domain, codomain, sym, tol, config.build());

  emit(written, operator_to_json(op, "domain", "codomain"),
       dir / "operator.json");
  emit(written, space_to_json(*domain), dir / "domain.json");
  emit(written, space_to_json(*codomain), dir / "codomain.json");
  emit(written, quotient_to_json(check_quotient(op.symbol(), *domain,
                                                *codomain,
                                                config.tolerance.lipschitz)),
       dir / "quotient.json");
  emit(written, open_map_to_json(check_open_map(op.symbol(), *domain,
                                                *codomain)),
       dir / "open_map.json");
  emit(written, isometry_to_json(check_isometry(op, tol)),
       dir / "isometry.json");
}

// Folded line with the piecewise-sign weight: disjointness preserving and
// an into isometry, yet the forced values at infinity disagree between the
// two tails, so no continuous extension to the compactifications exists.
void gallery_example9(std::vector<fs::path>& written, const fs::path& dir,
                      const RunConfig& config) {
  const double radius = config.grid.radius;
  const std::size_t cells = config.grid.cells;
  if (cells % 2 != 0)
    throw Error(ErrorCode::InvalidSpec, "cell count must be even",
                {{"cells", cells}});
  const SpacePtr domain =
      make_interval_space(0.0, radius, cells / 2, TailSpec::plus_only());
  const SpacePtr codomain =
      make_interval_space(-radius, radius, cells, TailSpec::both());

  Symbol sym;
  sym.phi.resize(codomain->size());
  sym.h.resize(codomain->size());
  const std::size_t center = cells / 2;
  for (std::size_t j = 0; j < codomain->size(); ++j) {
    sym.phi[j] =
        PointRef::interior(j >= center ? j - center : center - j);
    const double yc = codomain->points[j].x;
    sym.h[j] = yc > 2.0 ? 1.0 : (yc < 0.0 ? -1.0 : yc - 1.0);
  }

  const C0Tolerance tol = config.continuum();
  const LinearOperator op =
      build_weighted_composition(domain, codomain, sym, tol, config.build());

  emit(written, operator_to_json(op, "domain", "codomain"),
       dir / "operator.json");
  emit(written, space_to_json(*domain), dir / "domain.json");
  emit(written, space_to_json(*codomain), dir / "codomain.json");

  const AnalysisOptions opts = config.analysis();
  emit(written, extension_to_json(attempt_extension(op, "dp", tol, opts)),
       dir / "extension_dp.json");
  emit(written,
       extension_to_json(attempt_extension(op, "isometric", tol, opts)),
       dir / "extension_isometric.json");
  emit(written,
       obstruction_to_json(
           reproduce_example9_numerics("flip", radius, cells, tol, opts)),
       dir / "obstruction.json");
}

// The two boundary cases of the well-definedness criterion: a damped
// bounded-oscillation symbol that builds fine yet is not proper, and the
// exponentially weighted identity that properness alone cannot save.
void gallery_lemma3(std::vector<fs::path>& written, const fs::path& dir,
                    const RunConfig& config) {
  const double radius = config.grid.radius;
  const std::size_t cells = config.grid.cells;
  const SpacePtr line =
      make_interval_space(-radius, radius, cells, TailSpec::both());
  const C0Tolerance tol = config.continuum();

  Symbol damped;
  damped.phi.resize(line->size());
  damped.h.resize(line->size());
  for (std::size_t j = 0; j < line->size(); ++j) {
    const double yc = line->points[j].x;
    if (yc < 0.0) {
      damped.phi[j] = PointRef::interior(nearest_index(*line, std::sin(yc)));
      damped.h[j] = std::exp(yc);
    } else {
      damped.phi[j] = PointRef::interior(j);
      damped.h[j] = 1.0;
    }
  }
  const LinearOperator op =
      build_weighted_composition(line, line, damped, tol, config.build());
  emit(written, operator_to_json(op, "line", "line"),
       dir / "not_proper_operator.json");
  emit(written, space_to_json(*line), dir / "line.json");
  emit(written,
       properness_to_json(check_proper(op.symbol(), *line, *line)),
       dir / "properness.json");

  Symbol exploding;
  exploding.phi.resize(line->size());
  exploding.h.resize(line->size());
  for (std::size_t j = 0; j < line->size(); ++j) {
    exploding.phi[j] = PointRef::interior(j);
    exploding.h[j] = std::exp(line->points[j].x);
  }
  ordered_json rejection;
  try {
    build_weighted_composition(line, line, exploding, tol, config.build());
    throw Error(ErrorCode::InvalidSpec,
                "the exponential-weight identity unexpectedly built", {});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutputNotC0) throw;
    rejection = error_to_json(e);
  }
  rejection["symbol"] = symbol_to_json(exploding);
  emit(written, rejection, dir / "rejected_build.json");
}

}  // namespace

std::vector<fs::path> run_gallery(const std::string& name,
                                  const fs::path& out_dir,
                                  const RunConfig& config) {
  std::vector<fs::path> written;
  const bool all = name == "all";
  bool known = all;
  if (all || name == "example5") {
    gallery_example5(written, out_dir / "example5", config);
    known = true;
  }
  if (all || name == "example6") {
    gallery_example6(written, out_dir / "example6", config);
    known = true;
  }
  if (all || name == "example9") {
    gallery_example9(written, out_dir / "example9", config);
    known = true;
  }
  if (all || name == "lemma3-counterexamples") {
    gallery_lemma3(written, out_dir / "lemma3-counterexamples", config);
    known = true;
  }
  if (!known)
    throw Error(ErrorCode::InvalidSpec, "unknown gallery fixture",
                {{"name", name}});
  return written;
}

}  // namespace wcl
