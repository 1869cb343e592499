#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "simbench/protocol.hpp"

namespace simbench {

struct ScenarioEvent {
  double t = 0.0;
  std::string line;  // command text as written, without the newline
  Command command;
};

/// A timed script of protocol commands.
///
///   # comment
///   DURATION <t_s>
///   AT <t_s> <command>
struct Scenario {
  double duration = 0.0;
  std::vector<ScenarioEvent> events;
};

/// Throws SyntaxError (with the 1-based line number), UnsortedEvents or
/// MissingDuration.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace simbench
