#include "wcl/config.hpp"

#include <utility>

#include "wcl/error.hpp"
#include "wcl/io.hpp"

namespace wcl {

namespace {

using nlohmann::ordered_json;

void read_double(const ordered_json& j, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number())
    throw Error(ErrorCode::ParseError,
                std::string("config field '") + key + "' must be a number",
                {{"field", key}});
  out = j.at(key).get<double>();
}

bool nonneg_integer(const ordered_json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<long long>() >= 0);
}

void read_size(const ordered_json& j, const char* key, std::size_t& out) {
  if (!j.contains(key)) return;
  if (!nonneg_integer(j.at(key)))
    throw Error(ErrorCode::ParseError,
                std::string("config field '") + key +
                    "' must be a non-negative integer",
                {{"field", key}});
  out = j.at(key).get<std::size_t>();
}

void read_u64(const ordered_json& j, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  if (!nonneg_integer(j.at(key)))
    throw Error(ErrorCode::ParseError,
                std::string("config field '") + key +
                    "' must be a non-negative integer",
                {{"field", key}});
  out = j.at(key).get<std::uint64_t>();
}

void read_string(const ordered_json& j, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string())
    throw Error(ErrorCode::ParseError,
                std::string("config field '") + key + "' must be a string",
                {{"field", key}});
  out = j.at(key).get<std::string>();
}

const ordered_json& block(const ordered_json& j, const char* key) {
  static const ordered_json empty = ordered_json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object())
    throw Error(ErrorCode::ParseError,
                std::string("config block '") + key + "' must be an object",
                {{"field", key}});
  return j.at(key);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw Error(ErrorCode::InvalidSpec,
                std::string(name) + " must be positive", {{"value", v}});
}

void check(const RunConfig& c) {
  require_positive(c.tolerance.eps_tail, "eps_tail");
  require_positive(c.tolerance.eps_zero_discrete, "eps_zero_discrete");
  require_positive(c.tolerance.eps_zero_continuum, "eps_zero_continuum");
  require_positive(c.tolerance.eps_eq_discrete, "eps_eq_discrete");
  require_positive(c.tolerance.eps_eq_continuum, "eps_eq_continuum");
  require_positive(c.tolerance.lipschitz, "lipschitz");
  require_positive(c.tolerance.blowup_alpha, "blowup_alpha");
  require_positive(c.tolerance.blowup_alpha_low, "blowup_alpha_low");
  require_positive(c.tolerance.blowup_factor, "blowup_factor");
  if (c.tolerance.blowup_alpha_low >= c.tolerance.blowup_alpha)
    throw Error(ErrorCode::InvalidSpec,
                "blowup_alpha_low must sit below blowup_alpha",
                {{"low", c.tolerance.blowup_alpha_low},
                 {"alpha", c.tolerance.blowup_alpha}});
  require_positive(c.grid.radius, "grid radius");
  if (c.grid.cells < 2)
    throw Error(ErrorCode::InvalidSpec, "grid needs at least two cells",
                {{"cells", c.grid.cells}});
  if (c.grid.levels < 2)
    throw Error(ErrorCode::InvalidSpec,
                "exhaustions need at least two levels",
                {{"levels", c.grid.levels}});
  if (c.grid.refinements < 2)
    throw Error(ErrorCode::InvalidSpec,
                "refinement families need at least two levels",
                {{"refinements", c.grid.refinements}});
}

}  // namespace

C0Tolerance RunConfig::discrete() const {
  return {tolerance.eps_tail, tolerance.eps_zero_discrete,
          tolerance.eps_eq_discrete};
}

C0Tolerance RunConfig::continuum() const {
  return {tolerance.eps_tail, tolerance.eps_zero_continuum,
          tolerance.eps_eq_continuum};
}

AnalysisOptions RunConfig::analysis() const {
  AnalysisOptions opts;
  opts.corpus_seed = corpus.seed;
  opts.corpus_random = corpus.size;
  opts.blowup_alpha = tolerance.blowup_alpha;
  opts.blowup_alpha_low = tolerance.blowup_alpha_low;
  opts.blowup_factor = tolerance.blowup_factor;
  opts.limit_gap_tol = tolerance.eps_tail;
  return opts;
}

BuildOptions RunConfig::build() const {
  BuildOptions opts;
  opts.lipschitz = tolerance.lipschitz;
  opts.corpus_seed = corpus.seed;
  // The builder's probing corpus is pinned at 32 random members; the
  // configurable corpus size drives recovery and decomposition probing.
  return opts;
}

RunConfig config_from_json(const ordered_json& j) {
  if (!j.is_object())
    throw Error(ErrorCode::ParseError, "config document must be an object",
                {});
  RunConfig c;
  const ordered_json& tol = block(j, "tolerance");
  read_double(tol, "eps_tail", c.tolerance.eps_tail);
  read_double(tol, "eps_zero_discrete", c.tolerance.eps_zero_discrete);
  read_double(tol, "eps_zero_continuum", c.tolerance.eps_zero_continuum);
  read_double(tol, "eps_eq_discrete", c.tolerance.eps_eq_discrete);
  read_double(tol, "eps_eq_continuum", c.tolerance.eps_eq_continuum);
  read_double(tol, "lipschitz", c.tolerance.lipschitz);
  read_double(tol, "blowup_alpha", c.tolerance.blowup_alpha);
  read_double(tol, "blowup_alpha_low", c.tolerance.blowup_alpha_low);
  read_double(tol, "blowup_factor", c.tolerance.blowup_factor);
  const ordered_json& grid = block(j, "grid");
  read_double(grid, "radius", c.grid.radius);
  read_size(grid, "cells", c.grid.cells);
  read_size(grid, "levels", c.grid.levels);
  read_size(grid, "refinements", c.grid.refinements);
  const ordered_json& corpus = block(j, "corpus");
  read_u64(corpus, "seed", c.corpus.seed);
  read_size(corpus, "size", c.corpus.size);
  const ordered_json& io = block(j, "io");
  read_string(io, "out_dir", c.io.out_dir);
  check(c);
  return c;
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["tolerance"] = {{"eps_tail", c.tolerance.eps_tail},
                    {"eps_zero_discrete", c.tolerance.eps_zero_discrete},
                    {"eps_zero_continuum", c.tolerance.eps_zero_continuum},
                    {"eps_eq_discrete", c.tolerance.eps_eq_discrete},
                    {"eps_eq_continuum", c.tolerance.eps_eq_continuum},
                    {"lipschitz", c.tolerance.lipschitz},
                    {"blowup_alpha", c.tolerance.blowup_alpha},
                    {"blowup_alpha_low", c.tolerance.blowup_alpha_low},
                    {"blowup_factor", c.tolerance.blowup_factor}};
  j["grid"] = {{"radius", c.grid.radius},
               {"cells", c.grid.cells},
               {"levels", c.grid.levels},
               {"refinements", c.grid.refinements}};
  j["corpus"] = {{"seed", c.corpus.seed}, {"size", c.corpus.size}};
  j["io"] = {{"out_dir", c.io.out_dir}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(load_json(path));
}

}  // namespace wcl
