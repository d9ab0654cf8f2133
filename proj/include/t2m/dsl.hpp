#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "t2m/machine.hpp"

namespace t2m {

/// Parses a `.t2m` document holding exactly one machine and validates it.
/// Throws SyntaxError (with the offending token's position) or
/// ValidationError.
MachineGraph parse_machine(std::string_view text);

/// Parses every machine of a `.t2m` document.
std::vector<MachineGraph> parse_machines(std::string_view text);

/// Canonical text; vertices appear in insertion order and layer tags are
/// emitted as trailing `# layer: k` comments.
std::string print_machine(const MachineGraph& m);

MachineGraph load_machine_file(const std::string& path);

}  // namespace t2m
