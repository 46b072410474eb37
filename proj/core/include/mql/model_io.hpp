#pragma once

#include <string>
#include <variant>

#include "mql/markov.hpp"
#include "mql/quiver.hpp"

namespace mql {

// Model files carry either a Markov model or a bare quiver, discriminated by
// the "kind" field: finite_kernel, map_system, uniform, quiver.
using ParsedInput = std::variant<MarkovModel, Quiver>;

ParsedInput parse_model_text(const std::string& text);
ParsedInput parse_model_file(const std::string& path);

// Canonical JSON form; parsing it back yields an identical value.
std::string serialize_model(const MarkovModel& model);
std::string serialize_quiver(const Quiver& q);

}  // namespace mql
