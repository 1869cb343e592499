#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "simbench/errors.hpp"

// Line protocol used by the sockets and by scenario files. Every record is
// one '\n'-terminated ASCII line.
//
//   PING                -> PONG
//   PRESS <bend_deg>    -> OK          bend in [0, 180]
//   RELEASE             -> OK
//   SET RPM <rpm>       -> OK
//   SET LOAD <N*m>      -> OK
//   GET STATUS          -> STATUS ...
//   STREAM ON|OFF       -> OK
//   anything else       -> ERR unknown-command | ERR bad-arg

namespace simbench::proto {

struct Ping {
  friend bool operator==(const Ping&, const Ping&) = default;
};
struct Press {
  double bend = 0.0;
  friend bool operator==(const Press&, const Press&) = default;
};
struct Release {
  friend bool operator==(const Release&, const Release&) = default;
};
struct SetRpm {
  double rpm = 0.0;
  friend bool operator==(const SetRpm&, const SetRpm&) = default;
};
struct SetLoad {
  double tau = 0.0;
  friend bool operator==(const SetLoad&, const SetLoad&) = default;
};
struct GetStatus {
  friend bool operator==(const GetStatus&, const GetStatus&) = default;
};
struct Stream {
  bool on = false;
  friend bool operator==(const Stream&, const Stream&) = default;
};

using Command = std::variant<Ping, Press, Release, SetRpm, SetLoad, GetStatus, Stream>;

inline constexpr double kMaxBend = 180.0;

/// Parses one record. A single trailing "\n" (optionally preceded by "\r")
/// is accepted. Throws UnknownCommand or BadArg.
Command parse_command(std::string_view line);

/// Canonical wire form, newline included. Numbers use the shortest text that
/// parses back to the same double.
std::string format_command(const Command& cmd);

enum class Direction { Cw, Ccw, Stop };

struct StatusSnapshot {
  double t = 0.0;
  double rpm = 0.0;
  double setpoint = 0.0;
  double duty = 0.0;
  int adc = 0;
  bool pressed = false;
  double pos_mm = 0.0;
  Direction dir = Direction::Stop;
};

struct TelemetryFrame {
  double t = 0.0;
  double rpm = 0.0;
  double duty = 0.0;
  int adc = 0;
  std::int64_t total_counts = 0;
  double pos_mm = 0.0;
};

/// "STATUS t=<.3> rpm=<.2> sp=<.2> duty=<.3> adc=<n> pressed=<0|1> pos=<.2> dir=<CW|CCW|STOP>\n"
std::string format_status(const StatusSnapshot& s);

/// "T <t:.3> <rpm:.2> <duty:.3> <adc> <total_counts> <pos:.2>\n"
std::string format_telemetry(const TelemetryFrame& f);

std::string error_reply(const ProtocolError& e);

}  // namespace simbench::proto

namespace simbench {
using proto::Command;
}
