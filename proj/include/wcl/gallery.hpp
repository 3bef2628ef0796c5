#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wcl/config.hpp"

namespace wcl {

/// Writes one named fixture directory (or all of them) under out_dir and
/// returns the files written, in emission order. Names: "example5",
/// "example6", "example9", "lemma3-counterexamples", "all". Output is
/// deterministic for a fixed config. Throws InvalidSpec for unknown names.
std::vector<std::filesystem::path> run_gallery(
    const std::string& name, const std::filesystem::path& out_dir,
    const RunConfig& config);

}  // namespace wcl
