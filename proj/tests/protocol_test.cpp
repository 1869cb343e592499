#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "simbench/protocol.hpp"

using namespace simbench;
using namespace simbench::proto;

TEST(ParseCommand, Grammar) {
  EXPECT_EQ(parse_command("PING\n"), Command{Ping{}});
  EXPECT_EQ(parse_command("PRESS 45.0\n"), Command{Press{45.0}});
  EXPECT_EQ(parse_command("RELEASE\n"), Command{Release{}});
  EXPECT_EQ(parse_command("SET RPM 60\n"), Command{SetRpm{60.0}});
  EXPECT_EQ(parse_command("SET RPM -30.5\n"), Command{SetRpm{-30.5}});
  EXPECT_EQ(parse_command("SET LOAD 0.05\n"), Command{SetLoad{0.05}});
  EXPECT_EQ(parse_command("GET STATUS\n"), Command{GetStatus{}});
  EXPECT_EQ(parse_command("STREAM ON\n"), Command{Stream{true}});
  EXPECT_EQ(parse_command("STREAM OFF\n"), Command{Stream{false}});
  EXPECT_EQ(parse_command("PING"), Command{Ping{}});
  EXPECT_EQ(parse_command("PING\r\n"), Command{Ping{}});
  EXPECT_EQ(parse_command("PRESS 1e1\n"), Command{Press{10.0}});
}

TEST(ParseCommand, BadArguments) {
  for (const char* line :
       {"PRESS banana\n", "PRESS\n", "PRESS -1\n", "PRESS 180.5\n", "PRESS nan\n", "PRESS inf\n",
        "PRESS 4 5\n", "PRESS  45\n", "PRESS 45 \n", "SET RPM\n", "SET RPM x\n", "SET LOAD 1e999\n",
        "STREAM\n", "STREAM MAYBE\n", "STREAM on\n", "PRESS +5\n"}) {
    EXPECT_THROW(parse_command(line), BadArg) << line;
  }
}

TEST(ParseCommand, UnknownCommands) {
  for (const char* line : {"", "\n", "ping\n", "PING \n", " PING\n", "PONG\n", "SET\n",
                           "SET SPEED 4\n", "GET\n", "GET STATUS NOW\n", "PRESSED 4\n",
                           "RELEASE 1\n", "PING\n\n", "PI"}) {
    EXPECT_THROW(parse_command(line), UnknownCommand) << line;
  }
}

TEST(ErrorReply, Text) {
  EXPECT_EQ(error_reply(UnknownCommand()), "ERR unknown-command\n");
  EXPECT_EQ(error_reply(BadArg()), "ERR bad-arg\n");
}

TEST(FormatStatus, ZeroState) {
  EXPECT_EQ(format_status(StatusSnapshot{}),
            "STATUS t=0.000 rpm=0.00 sp=0.00 duty=0.000 adc=0 pressed=0 pos=0.00 dir=STOP\n");
}

TEST(FormatStatus, RunningReverse) {
  StatusSnapshot s;
  s.t = 2.5;
  s.rpm = -59.996;
  s.setpoint = -60.0;
  s.duty = 0.8364;
  s.adc = 584;
  s.pressed = true;
  s.pos_mm = 12.345;
  s.dir = Direction::Ccw;
  EXPECT_EQ(format_status(s),
            "STATUS t=2.500 rpm=-60.00 sp=-60.00 duty=0.836 adc=584 pressed=1 pos=12.35 dir=CCW\n");
}

TEST(FormatStatus, NegativeZeroIsNormalised) {
  StatusSnapshot s;
  s.rpm = -0.001;
  s.pos_mm = -0.0;
  EXPECT_EQ(format_status(s),
            "STATUS t=0.000 rpm=0.00 sp=0.00 duty=0.000 adc=0 pressed=0 pos=0.00 dir=STOP\n");
}

TEST(FormatTelemetry, Examples) {
  EXPECT_EQ(format_telemetry(TelemetryFrame{}), "T 0.000 0.00 0.000 0 0 0.00\n");
  EXPECT_EQ(format_telemetry(TelemetryFrame{1.25, 60.0, 0.836, 700, 10500, 1.52}),
            "T 1.250 60.00 0.836 700 10500 1.52\n");
  EXPECT_EQ(format_telemetry(TelemetryFrame{3.0, -12.5, 0.5, 400, -42, 0.0}),
            "T 3.000 -12.50 0.500 400 -42 0.00\n");
}

TEST(FormatCommand, Canonical) {
  EXPECT_EQ(format_command(Press{45.0}), "PRESS 45\n");
  EXPECT_EQ(format_command(SetRpm{-30.5}), "SET RPM -30.5\n");
  EXPECT_EQ(format_command(SetLoad{0.05}), "SET LOAD 0.05\n");
  EXPECT_EQ(format_command(Stream{false}), "STREAM OFF\n");
}

TEST(ProtocolProperties, RoundTripRandomCommands) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> bend(0.0, 180.0);
  std::uniform_real_distribution<double> signed_value(-1e6, 1e6);
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_int_distribution<int> tiny(-290, 290);
  for (int k = 0; k < 20000; ++k) {
    Command cmd;
    switch (kind(rng)) {
      case 0: cmd = Ping{}; break;
      case 1: cmd = Press{bend(rng)}; break;
      case 2: cmd = Release{}; break;
      case 3: cmd = SetRpm{signed_value(rng)}; break;
      case 4: cmd = SetLoad{signed_value(rng) * std::pow(10.0, tiny(rng))}; break;
      case 5: cmd = GetStatus{}; break;
      default: cmd = Stream{k % 2 == 0}; break;
    }
    const std::string text = format_command(cmd);
    ASSERT_EQ(text.back(), '\n');
    ASSERT_EQ(text.find('\n'), text.size() - 1);
    ASSERT_EQ(parse_command(text), cmd) << text;
  }
}

TEST(ProtocolProperties, RandomBytesEitherParseOrRaiseProtocolError) {
  std::mt19937_64 rng(32);
  const std::string alphabet = "PINGRESLTAUOMDF0123456789.-+e ";
  std::uniform_int_distribution<std::size_t> len(0, 20);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  int parsed = 0;
  for (int k = 0; k < 50000; ++k) {
    std::string line;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
      line += k % 3 == 0 ? static_cast<char>(byte(rng)) : alphabet[pick(rng)];
    }
    line += '\n';
    try {
      const Command c = parse_command(line);
      ++parsed;
      ASSERT_EQ(parse_command(format_command(c)), c);
    } catch (const ProtocolError&) {
    }
  }
  EXPECT_GE(parsed, 0);
}
