#include "simbench/protocol.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace simbench::proto {

namespace {

// The whole of `text` must be one finite decimal number.
double parse_number(std::string_view text) {
  if (text.empty()) throw BadArg();
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) throw BadArg();
  return value;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Fixed-point text with "-0.00" normalised to "0.00".
std::string fixed(double v, int precision) {
  std::string s = fmt::format("{:.{}f}", v, precision);
  if (s.front() == '-' && std::all_of(s.begin() + 1, s.end(), [](char c) {
        return c == '0' || c == '.';
      })) {
    s.erase(s.begin());
  }
  return s;
}

std::string shortest(double v) { return fmt::format("{}", v); }

}  // namespace

Command parse_command(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  if (line == "PING") return Ping{};
  if (line == "RELEASE") return Release{};
  if (line == "GET STATUS") return GetStatus{};
  if (line == "STREAM ON") return Stream{true};
  if (line == "STREAM OFF") return Stream{false};

  if (line == "PRESS" || line == "STREAM" || line == "SET RPM" || line == "SET LOAD") {
    throw BadArg();
  }
  if (starts_with(line, "PRESS ")) {
    const double bend = parse_number(line.substr(6));
    if (bend < 0.0 || bend > kMaxBend) throw BadArg();
    return Press{bend};
  }
  if (starts_with(line, "SET RPM ")) return SetRpm{parse_number(line.substr(8))};
  if (starts_with(line, "SET LOAD ")) return SetLoad{parse_number(line.substr(9))};
  if (starts_with(line, "STREAM ")) throw BadArg();
  throw UnknownCommand();
}

std::string format_command(const Command& cmd) {
  struct Render {
    std::string operator()(const Ping&) const { return "PING\n"; }
    std::string operator()(const Press& c) const { return "PRESS " + shortest(c.bend) + "\n"; }
    std::string operator()(const Release&) const { return "RELEASE\n"; }
    std::string operator()(const SetRpm& c) const { return "SET RPM " + shortest(c.rpm) + "\n"; }
    std::string operator()(const SetLoad& c) const {
      return "SET LOAD " + shortest(c.tau) + "\n";
    }
    std::string operator()(const GetStatus&) const { return "GET STATUS\n"; }
    std::string operator()(const Stream& c) const {
      return c.on ? "STREAM ON\n" : "STREAM OFF\n";
    }
  };
  return std::visit(Render{}, cmd);
}

std::string format_status(const StatusSnapshot& s) {
  const char* dir = s.dir == Direction::Cw ? "CW" : s.dir == Direction::Ccw ? "CCW" : "STOP";
  return fmt::format("STATUS t={} rpm={} sp={} duty={} adc={} pressed={} pos={} dir={}\n",
                     fixed(s.t, 3), fixed(s.rpm, 2), fixed(s.setpoint, 2), fixed(s.duty, 3), s.adc,
                     s.pressed ? 1 : 0, fixed(s.pos_mm, 2), dir);
}

std::string format_telemetry(const TelemetryFrame& f) {
  return fmt::format("T {} {} {} {} {} {}\n", fixed(f.t, 3), fixed(f.rpm, 2), fixed(f.duty, 3),
                     f.adc, f.total_counts, fixed(f.pos_mm, 2));
}

std::string error_reply(const ProtocolError& e) { return fmt::format("ERR {}\n", e.what()); }

}  // namespace simbench::proto
