#include "simbench/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "simbench/errors.hpp"

namespace simbench {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_time(std::string_view text, std::size_t line_no) {
  double t = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(t) || t < 0.0) {
    throw SyntaxError(line_no, "bad time '" + std::string(text) + "'");
  }
  return t;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::optional<double> duration;
  std::size_t line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.starts_with("DURATION ")) {
      if (duration) throw SyntaxError(line_no, "DURATION given twice");
      duration = parse_time(trim(line.substr(9)), line_no);
      if (*duration <= 0.0) throw SyntaxError(line_no, "DURATION must be > 0");
      continue;
    }
    if (!line.starts_with("AT ")) {
      throw SyntaxError(line_no, "expected 'AT <t> <command>' or 'DURATION <t>'");
    }
    const std::string_view rest = line.substr(3);
    const auto space = rest.find(' ');
    if (space == std::string_view::npos) throw SyntaxError(line_no, "AT without a command");
    const double t = parse_time(rest.substr(0, space), line_no);
    const std::string_view command_text = rest.substr(space + 1);

    ScenarioEvent ev;
    ev.t = t;
    ev.line = std::string(command_text);
    try {
      ev.command = proto::parse_command(command_text);
    } catch (const ProtocolError& e) {
      throw SyntaxError(line_no, "command '" + ev.line + "': " + e.what());
    }
    if (!sc.events.empty() && t < sc.events.back().t) {
      throw UnsortedEvents("line " + std::to_string(line_no) + ": event at t=" +
                           std::string(rest.substr(0, space)) + " precedes the previous event");
    }
    sc.events.push_back(std::move(ev));
  }

  if (!duration) throw MissingDuration("scenario has no DURATION line");
  sc.duration = *duration;
  for (const auto& ev : sc.events) {
    if (ev.t > sc.duration) {
      throw ScenarioError("event '" + ev.line + "' is scheduled after DURATION");
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

}  // namespace simbench
