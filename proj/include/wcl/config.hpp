#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "wcl/analysis.hpp"
#include "wcl/funcspace.hpp"
#include "wcl/operator.hpp"

namespace wcl {

/// Thresholds for the two evaluation tiers: exact small matrices over
/// discrete fixtures, and sampled continuum grids.
struct ToleranceConfig {
  double eps_tail = 1e-3;
  double eps_zero_discrete = 1e-9;
  double eps_zero_continuum = 1e-6;
  double eps_eq_discrete = 1e-9;
  double eps_eq_continuum = 1e-6;
  double lipschitz = 1.5;
  double blowup_alpha = 0.5;
  double blowup_alpha_low = 0.25;
  double blowup_factor = 10.0;
};

/// Default truncation geometry for generated grids.
struct GridConfig {
  double radius = 50.0;
  std::size_t cells = 2000;
  std::size_t levels = 8;
  std::size_t refinements = 5;
};

/// Seeded-random probe settings. `size` counts the random members added on
/// top of the structured probe family (which scales with the exhaustion).
struct CorpusConfig {
  std::uint64_t seed = 1729;
  std::size_t size = 64;
};

struct IoConfig {
  std::string out_dir = "out";
};

struct RunConfig {
  ToleranceConfig tolerance;
  GridConfig grid;
  CorpusConfig corpus;
  IoConfig io;

  C0Tolerance discrete() const;
  C0Tolerance continuum() const;
  AnalysisOptions analysis() const;
  BuildOptions build() const;
};

/// Parses a config document. Absent blocks and fields keep their defaults;
/// malformed fields throw ParseError; non-positive tolerances or inverted
/// blow-up thresholds throw InvalidSpec.
RunConfig config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json config_to_json(const RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace wcl
