#include "simbench/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "simbench/errors.hpp"

namespace simbench {

namespace {

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

long to_integer(const std::string& key, const std::string& text) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

using Setter = std::function<void(SimConfig&, const std::string& key, const std::string& value)>;

Setter number(double SimConfig::*field) {
  return [field](SimConfig& c, const std::string& k, const std::string& v) {
    c.*field = to_double(k, v);
  };
}

template <typename Block>
Setter number(Block SimConfig::*block, double Block::*field) {
  return [block, field](SimConfig& c, const std::string& k, const std::string& v) {
    (c.*block).*field = to_double(k, v);
  };
}

Setter gain(double PidGains::*field) {
  return [field](SimConfig& c, const std::string& k, const std::string& v) {
    c.firmware.gains.*field = to_double(k, v);
  };
}

Setter flex_number(double FlexParams::*field) {
  return [field](SimConfig& c, const std::string& k, const std::string& v) {
    c.firmware.flex.*field = to_double(k, v);
  };
}

Setter flex_integer(int FlexParams::*field) {
  return [field](SimConfig& c, const std::string& k, const std::string& v) {
    c.firmware.flex.*field = static_cast<int>(to_integer(k, v));
  };
}

Setter firmware_number(double FirmwareConfig::*field) {
  return [field](SimConfig& c, const std::string& k, const std::string& v) {
    c.firmware.*field = to_double(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"sim.dt_plant", number(&SimConfig::dt_plant)},
      {"sim.stream_hz", number(&SimConfig::stream_hz)},
      {"sim.realtime_factor", number(&SimConfig::realtime_factor)},
      {"sim.mode",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         if (v == "max") {
           c.mode = Pace::Max;
         } else if (v == "realtime") {
           c.mode = Pace::Realtime;
         } else {
           throw ConfigError(k + ": expected max or realtime");
         }
       }},
      {"sim.initial_pos_mm",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.initial_pos = to_double(k, v) / 1000.0;
       }},

      {"plant.v_supply", number(&SimConfig::plant, &PlantParams::v_supply)},
      {"plant.r_armature", number(&SimConfig::plant, &PlantParams::r_armature)},
      {"plant.l_armature", number(&SimConfig::plant, &PlantParams::l_armature)},
      {"plant.k_e", number(&SimConfig::plant, &PlantParams::k_e)},
      {"plant.k_t", number(&SimConfig::plant, &PlantParams::k_t)},
      {"plant.j_rotor", number(&SimConfig::plant, &PlantParams::j_rotor)},
      {"plant.b_visc", number(&SimConfig::plant, &PlantParams::b_visc)},
      {"plant.gear_ratio", number(&SimConfig::plant, &PlantParams::gear_ratio)},
      {"plant.gear_eff", number(&SimConfig::plant, &PlantParams::gear_eff)},
      {"plant.lead", number(&SimConfig::plant, &PlantParams::lead)},
      {"plant.stroke_min", number(&SimConfig::plant, &PlantParams::stroke_min)},
      {"plant.stroke_max", number(&SimConfig::plant, &PlantParams::stroke_max)},

      {"encoder.lines_per_rev",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.firmware.encoder.lines_per_rev = static_cast<int>(to_integer(k, v));
       }},

      {"flex.r_flat", flex_number(&FlexParams::r_flat)},
      {"flex.k_bend", flex_number(&FlexParams::k_bend)},
      {"flex.r_fixed", flex_number(&FlexParams::r_fixed)},
      {"flex.v_cc", flex_number(&FlexParams::v_cc)},
      {"flex.adc_bits", flex_integer(&FlexParams::adc_bits)},
      {"flex.press_on", flex_integer(&FlexParams::press_on)},
      {"flex.press_off", flex_integer(&FlexParams::press_off)},

      {"load.k_load", number(&SimConfig::k_load)},

      {"firmware.tick_hz", firmware_number(&FirmwareConfig::tick_hz)},
      {"firmware.rpm_window", firmware_number(&FirmwareConfig::rpm_window)},
      {"firmware.rpm_max", firmware_number(&FirmwareConfig::rpm_max)},
      {"firmware.bang_duty", firmware_number(&FirmwareConfig::bang_duty)},
      {"firmware.setpoint_rpm", number(&SimConfig::setpoint_rpm)},
      {"firmware.control",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         if (v == "pid") {
           c.firmware.control = ControlMode::Pid;
         } else if (v == "bang") {
           c.firmware.control = ControlMode::Bang;
         } else {
           throw ConfigError(k + ": expected pid or bang");
         }
       }},

      {"pid.kp", gain(&PidGains::kp)},
      {"pid.ki", gain(&PidGains::ki)},
      {"pid.kd", gain(&PidGains::kd)},
      {"pid.u_min", gain(&PidGains::u_min)},
      {"pid.u_max", gain(&PidGains::u_max)},

      {"scope.logic_hz", number(&SimConfig::scope, &ScopeSettings::logic_hz)},
      {"scope.analog_hz", number(&SimConfig::scope, &ScopeSettings::analog_hz)},
      {"scope.serve_window", number(&SimConfig::scope, &ScopeSettings::serve_window)},

      {"net.port",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.port = static_cast<int>(to_integer(k, v));
       }},
      {"net.http_port",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.http_port = static_cast<int>(to_integer(k, v));
       }},
      {"net.www_dir", [](SimConfig& c, const std::string&, const std::string& v) { c.net.www_dir = v; }},
      {"net.max_pending",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         const long n = to_integer(k, v);
         if (n < 1) throw ConfigError(k + ": must be >= 1");
         c.net.max_pending = static_cast<std::size_t>(n);
       }},
  };
  return table;
}

std::uint64_t whole_steps(double period, double dt, const char* what) {
  const double steps = period / dt;
  const double rounded = std::round(steps);
  if (!std::isfinite(steps) || rounded < 1.0 || std::abs(steps - rounded) > 1e-6 * rounded) {
    throw ConfigError(std::string(what) + " period must be a whole number of plant steps");
  }
  return static_cast<std::uint64_t>(rounded);
}

}  // namespace

void SimConfig::sync() {
  firmware.v_supply = plant.v_supply;
  firmware.encoder = EncoderSpec::make(firmware.encoder.lines_per_rev, plant.gear_ratio);
}

void SimConfig::validate() const {
  plant.validate();
  firmware.validate();
  const EncoderSpec expected = EncoderSpec::make(firmware.encoder.lines_per_rev, plant.gear_ratio);
  if (expected.counts_per_output_rev != firmware.encoder.counts_per_output_rev ||
      firmware.v_supply != plant.v_supply) {
    throw ConfigError("derived firmware fields are stale; call sync()");
  }
  if (!(dt_plant > 0.0) || dt_plant > plant.electrical_tau()) {
    throw ConfigError("dt_plant must be in (0, L/R]");
  }
  if (dt_plant * firmware.tick_hz > 1.0 + 1e-12) throw ConfigError("dt_plant * tick_hz must be <= 1");
  steps_per_tick();
  steps_per_frame();
  if (!(realtime_factor > 0.0)) throw ConfigError("realtime_factor must be > 0");
  if (!std::isfinite(k_load)) throw ConfigError("k_load must be finite");
  if (std::abs(setpoint_rpm) > firmware.rpm_max) throw ConfigError("setpoint_rpm exceeds rpm_max");
  if (initial_pos < plant.stroke_min || initial_pos > plant.stroke_max) {
    throw ConfigError("initial_pos_mm must lie within the stroke");
  }
  for (int port : {net.port, net.http_port}) {
    if (port < 0 || port > 65535) throw ConfigError("ports must be in [0, 65535]");
  }
}

std::uint64_t SimConfig::steps_per_tick() const {
  return whole_steps(1.0 / firmware.tick_hz, dt_plant, "firmware tick");
}

std::uint64_t SimConfig::steps_per_frame() const {
  if (!(stream_hz > 0.0)) throw ConfigError("stream_hz must be > 0");
  return whole_steps(1.0 / stream_hz, dt_plant, "telemetry frame");
}

SimConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.message() + " at line " + std::to_string(e.line()));
  }

  SimConfig cfg;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(cfg, full, value.data());
    }
  }
  try {
    cfg.sync();
    cfg.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

SimConfig resolve_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_config(explicit_path);
  if (const char* env = std::getenv("SIMBENCH_CONFIG"); env != nullptr && *env != '\0') {
    return load_config(env);
  }
  SimConfig cfg;
  cfg.sync();
  cfg.validate();
  return cfg;
}

}  // namespace simbench
