#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "wcl/analysis.hpp"
#include "wcl/error.hpp"
#include "wcl/funcspace.hpp"
#include "wcl/operator.hpp"
#include "wcl/space.hpp"

namespace wcl {

using ordered_json = nlohmann::ordered_json;

/// Rounds to 12 significant digits. Certificate numbers (limits, gaps,
/// bounds, residuals) are emitted at this precision; grids, weights, and
/// matrices keep the full round-trip representation.
double sig12(double v);

// ---- value codecs --------------------------------------------------------

/// {points, mesh, exhaustion, is_compact_model, tails}; point entries are
/// coordinate arrays of length dim, all arrays in index order.
ordered_json space_to_json(const Space& s);

/// Parses and validates. Throws ParseError on shape problems, InvalidSpec
/// when the parsed model breaks a structural invariant.
SpacePtr space_from_json(const ordered_json& j);

/// {space_id, values}.
ordered_json function_to_json(const ScalarFunction& f,
                              const std::string& space_id);
ScalarFunction function_from_json(const ordered_json& j, const SpacePtr& space);

/// {phi, h} with phi entries index-or-"inf"-or-null.
ordered_json symbol_to_json(const Symbol& sym);
Symbol symbol_from_json(const ordered_json& j);

/// {domain_id, codomain_id, backing, matrix | symbol}; matrix rows emitted
/// as nested arrays in row-major order.
ordered_json operator_to_json(const LinearOperator& op,
                              const std::string& domain_id,
                              const std::string& codomain_id);
LinearOperator operator_from_json(const ordered_json& j, const SpacePtr& domain,
                                  const SpacePtr& codomain);

// ---- report codecs -------------------------------------------------------
// Every report document carries {verdict, witnesses, residuals}; witness
// entries are objects with a "kind" tag, residual entries are certificate
// numbers at 12 significant digits.

ordered_json continuity_to_json(const ContinuityReport& r);
ordered_json properness_to_json(const PropernessReport& r);
ordered_json isometry_to_json(const IsometryReport& r);
ordered_json dp_to_json(const DPReport& r);
ordered_json injection_to_json(const InjectionReport& r);
ordered_json quotient_to_json(const QuotientReport& r);
ordered_json open_map_to_json(const OpenMapReport& r);
ordered_json isometry_recovery_to_json(const IsometryRecovery& r);
ordered_json decomposition_to_json(const Decomposition& r);
ordered_json bijective_to_json(const BijectiveRecovery& r);
ordered_json extension_to_json(const ExtensionReport& r);
ordered_json obstruction_to_json(const ObstructionReport& r);
ordered_json error_to_json(const Error& e);

// ---- files ---------------------------------------------------------------

/// Reads and parses a document. Throws IoError when the file cannot be
/// read, ParseError when it is not valid JSON.
ordered_json load_json(const std::filesystem::path& path);

/// Writes with two-space indentation and a trailing newline, creating
/// parent directories as needed. Throws IoError.
void save_json(const ordered_json& j, const std::filesystem::path& path);

SpacePtr load_space(const std::filesystem::path& path);
void save_space(const Space& s, const std::filesystem::path& path);

/// Loads an operator file, resolving its domain_id and codomain_id to
/// sibling "<id>.json" space files in the same directory.
LinearOperator load_operator(const std::filesystem::path& path);

/// Writes the operator file plus the two sibling space files named by the
/// ids. Ids double as the space file stems.
void save_operator(const LinearOperator& op, const std::filesystem::path& path,
                   const std::string& domain_id, const std::string& codomain_id);

}  // namespace wcl
