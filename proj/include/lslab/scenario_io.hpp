#pragma once

#include <string>

#include "lslab/scenario.hpp"

namespace lslab {

// Scenario file layout:
// {
//   "name": "...",
//   "domain":    {"interior": {"radius": "<expr in theta>"}, "exterior": {"radius": "..."}},
//   "operator":  {"a11": "...", "a12": "...", "a22": "...", "b1": "...", "b2": "...", "c": "..."},
//   "boundary":  {"interior": "<expr>" | <number>, "exterior": "<expr>" | <number>},
//   "grid":      {"n_theta": 128, "n_s": 64},
//   "tolerances": {...ToleranceSet field names...},
//   "reference": "<closed-form solution>"
// }
// "interior" is omitted for a disk-like domain; "operator" defaults to the
// Laplacian; every coefficient is optional.
//
// Throws SchemaError for structural problems and SyntaxError /
// UnknownIdentifier for bad expressions. Does not validate invariants.
ScenarioSpec parse_scenario(const std::string& text, const std::string& fallback_name = "scenario");

// Throws IoError if the file cannot be read.
ScenarioSpec load_scenario(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lslab
