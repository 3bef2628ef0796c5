#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wcl/analysis.hpp"
#include "wcl/config.hpp"
#include "wcl/error.hpp"
#include "wcl/gallery.hpp"
#include "wcl/io.hpp"
#include "wcl/operator.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int log_level() {
  const char* v = std::getenv("WCL_LOG");
  if (!v) return 0;
  const std::string s = v;
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[wcl] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[wcl] %s\n", msg.c_str());
}

/// Prints the report to stdout, saves it when an output path was given, and
/// turns the pass flag into the exit-code contract (0 pass, 2 fail).
int finish(const ordered_json& report, const std::string& out, bool pass) {
  if (!out.empty()) {
    wcl::save_json(report, out);
    log_info("wrote " + out);
  }
  std::printf("%s\n", report.dump(2).c_str());
  return pass ? 0 : 2;
}

wcl::RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return wcl::RunConfig{};
  log_debug("loading config " + path);
  return wcl::load_config(path);
}

int do_build(const std::string& config_path, const std::string& out,
             const std::string& tier, std::optional<std::uint64_t> seed,
             const std::string& domain_path, const std::string& codomain_path,
             const std::string& symbol_path) {
  wcl::RunConfig config = load_run_config(config_path);
  if (seed) config.corpus.seed = *seed;
  const wcl::SpacePtr domain = wcl::load_space(domain_path);
  const wcl::SpacePtr codomain = wcl::load_space(codomain_path);
  log_debug("domain has " + std::to_string(domain->size()) +
            " samples, codomain " + std::to_string(codomain->size()));
  wcl::Symbol sym = wcl::symbol_from_json(wcl::load_json(symbol_path));
  const wcl::C0Tolerance tol =
      tier == "discrete" ? config.discrete() : config.continuum();
  const wcl::LinearOperator op = wcl::build_weighted_composition(
      domain, codomain, std::move(sym), tol, config.build());

  ordered_json report;
  report["verdict"] = "accepted";
  report["witnesses"] = ordered_json::array();
  report["residuals"] = ordered_json::object();
  if (!out.empty()) {
    wcl::save_operator(op, out, fs::path(domain_path).stem().string(),
                       fs::path(codomain_path).stem().string());
    report["out"] = out;
    log_info("wrote " + out);
  }
  std::printf("%s\n", report.dump(2).c_str());
  return 0;
}

int do_check(const std::string& config_path, const std::string& out,
             const std::string& mode, const std::string& operator_path) {
  const wcl::RunConfig config = load_run_config(config_path);
  const wcl::LinearOperator op = wcl::load_operator(operator_path);
  const wcl::C0Tolerance tol = config.continuum();
  log_debug("checking " + mode + " on " + operator_path);
  if (mode == "proper") {
    if (op.is_matrix())
      throw wcl::Error(wcl::ErrorCode::InvalidSpec,
                       "properness reads a symbol; matrix operators have none",
                       {{"operator", operator_path}});
    const wcl::PropernessReport r =
        wcl::check_proper(op.symbol(), *op.domain, *op.codomain);
    return finish(wcl::properness_to_json(r), out, r.proper);
  }
  if (mode == "isometry") {
    const wcl::IsometryReport r = wcl::check_isometry(op, tol);
    return finish(wcl::isometry_to_json(r), out, r.isometry);
  }
  if (mode == "dp") {
    const wcl::DPReport r = wcl::check_disjointness_preserving(op, tol);
    return finish(wcl::dp_to_json(r), out, r.preserving);
  }
  if (mode == "injection") {
    const wcl::InjectionReport r =
        wcl::check_injection(op, tol, config.build());
    return finish(wcl::injection_to_json(r), out, r.injective);
  }
  throw wcl::Error(wcl::ErrorCode::InvalidSpec,
                   "check mode must be proper, isometry, dp, or injection",
                   {{"mode", mode}});
}

int do_recover(const std::string& config_path, const std::string& out,
               const std::string& mode, std::optional<std::uint64_t> seed,
               const std::vector<std::string>& operator_paths) {
  wcl::RunConfig config = load_run_config(config_path);
  if (seed) config.corpus.seed = *seed;
  const wcl::C0Tolerance tol = config.continuum();
  const wcl::AnalysisOptions opts = config.analysis();
  if (mode == "isometry") {
    const wcl::LinearOperator op = wcl::load_operator(operator_paths.front());
    return finish(wcl::isometry_recovery_to_json(
                      wcl::recover_isometry(op, tol, opts)),
                  out, true);
  }
  if (mode == "dp") {
    std::vector<wcl::LinearOperator> family;
    family.reserve(operator_paths.size());
    for (const std::string& p : operator_paths)
      family.push_back(wcl::load_operator(p));
    log_debug("decomposing a family of " + std::to_string(family.size()));
    const wcl::Decomposition dec =
        family.size() == 1 ? wcl::decompose_dp(family.front(), tol, opts)
                           : wcl::decompose_dp(family, tol, opts);
    return finish(wcl::decomposition_to_json(dec), out, true);
  }
  if (mode == "bijective") {
    const wcl::LinearOperator op = wcl::load_operator(operator_paths.front());
    return finish(
        wcl::bijective_to_json(wcl::recover_bijective_dp(op, tol)), out, true);
  }
  throw wcl::Error(wcl::ErrorCode::InvalidSpec,
                   "recover mode must be isometry, dp, or bijective",
                   {{"mode", mode}});
}

int do_extend(const std::string& config_path, const std::string& out,
              const std::string& mode, const std::string& operator_path) {
  const wcl::RunConfig config = load_run_config(config_path);
  const wcl::LinearOperator op = wcl::load_operator(operator_path);
  const wcl::ExtensionReport r =
      wcl::attempt_extension(op, mode, config.continuum(), config.analysis());
  // Both verdicts are completed certificates, so both exit 0; rejections
  // (NotProper, GridTooCoarse, ModeCheckFailed) surface as exceptions.
  return finish(wcl::extension_to_json(r), out, true);
}

int do_gallery(const std::string& config_path, const std::string& out,
               std::optional<std::uint64_t> seed, const std::string& name) {
  wcl::RunConfig config = load_run_config(config_path);
  if (seed) config.corpus.seed = *seed;
  const fs::path dir = out.empty() ? fs::path(config.io.out_dir)
                                   : fs::path(out);
  const std::vector<fs::path> files = wcl::run_gallery(name, dir, config);
  ordered_json report;
  report["verdict"] = "emitted";
  report["witnesses"] = ordered_json::array();
  report["residuals"] = ordered_json::object();
  ordered_json list = ordered_json::array();
  for (const fs::path& f : files) {
    log_info("wrote " + f.string());
    list.push_back(f.string());
  }
  report["files"] = std::move(list);
  std::printf("%s\n", report.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for weighted composition operators"};
  app.require_subcommand(1);

  std::string config_path, out_path, mode;
  std::optional<std::uint64_t> seed;
  std::string domain_path, codomain_path, symbol_path;
  std::vector<std::string> operator_paths;
  std::string gallery_name;
  std::string build_tier = "continuum";

  CLI::App* build = app.add_subcommand(
      "build", "validate a symbol and emit the operator bundle");
  build->add_option("--config", config_path, "run configuration file");
  build->add_option("--out", out_path, "operator file to write");
  build->add_option("--mode", build_tier,
                    "tolerance tier: continuum (default) or discrete");
  build->add_option("--seed", seed, "probe corpus seed");
  build->add_option("domain", domain_path, "domain space file")->required();
  build->add_option("codomain", codomain_path, "codomain space file")
      ->required();
  build->add_option("symbol", symbol_path, "symbol file")->required();

  CLI::App* check = app.add_subcommand(
      "check", "run one verdict check against an operator file");
  check->add_option("--config", config_path, "run configuration file");
  check->add_option("--out", out_path, "report file to write");
  check->add_option("--mode", mode, "proper | isometry | dp | injection")
      ->required();
  check->add_option("operator", operator_paths, "operator file")
      ->required()
      ->expected(1);

  CLI::App* recover = app.add_subcommand(
      "recover", "recover symbol data from operator behavior");
  recover->add_option("--config", config_path, "run configuration file");
  recover->add_option("--out", out_path, "report file to write");
  recover->add_option("--mode", mode, "isometry | dp | bijective")->required();
  recover->add_option("--seed", seed, "probe corpus seed");
  recover
      ->add_option("operator", operator_paths,
                   "operator file(s); a dp family runs coarse to fine")
      ->required();

  CLI::App* extend = app.add_subcommand(
      "extend", "decide extension to the compactified models");
  extend->add_option("--config", config_path, "run configuration file");
  extend->add_option("--out", out_path, "report file to write");
  extend->add_option("--mode", mode, "dp | isometric")->required();
  extend->add_option("operator", operator_paths, "operator file")
      ->required()
      ->expected(1);

  CLI::App* gallery = app.add_subcommand(
      "gallery", "emit the golden fixture directories");
  gallery->add_option("--config", config_path, "run configuration file");
  gallery->add_option("--out", out_path, "output directory");
  gallery->add_option("--seed", seed, "probe corpus seed");
  gallery
      ->add_option("name", gallery_name,
                   "example5 | example6 | example9 | lemma3-counterexamples "
                   "| all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (build->parsed())
      return do_build(config_path, out_path, build_tier, seed, domain_path,
                      codomain_path, symbol_path);
    if (check->parsed())
      return do_check(config_path, out_path, mode, operator_paths.front());
    if (recover->parsed())
      return do_recover(config_path, out_path, mode, seed, operator_paths);
    if (extend->parsed())
      return do_extend(config_path, out_path, mode, operator_paths.front());
    if (gallery->parsed())
      return do_gallery(config_path, out_path, seed, gallery_name);
  } catch (const wcl::Error& e) {
    if (e.code() == wcl::ErrorCode::IoError ||
        e.code() == wcl::ErrorCode::ParseError) {
      std::fprintf(stderr, "[wcl] %s\n", e.what());
      return 1;
    }
    const ordered_json report = wcl::error_to_json(e);
    if (!out_path.empty()) {
      try {
        wcl::save_json(report, out_path);
      } catch (const wcl::Error&) {
        // the rejection itself still reaches stdout
      }
    }
    std::printf("%s\n", report.dump(2).c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[wcl] %s\n", e.what());
    return 1;
  }
  return 1;
}
