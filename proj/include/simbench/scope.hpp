#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace simbench {

enum class Signal { VBridge, EncA, EncB, FlexNode, Pressed5v, Rpm, Duty, Pos };

inline constexpr double kLogicHigh = 5.0;

std::string_view signal_name(Signal s);
/// Throws UnknownSignal.
Signal signal_from_name(std::string_view name);
/// enc_a, enc_b and pressed_5v are 0/5 V logic levels.
bool is_logic(Signal s);
const std::vector<Signal>& all_signals();

/// Everything a probe can see at one instant.
struct Probe {
  double v_bridge = 0.0;   // V across the motor (0 while coasting)
  double enc_a = 0.0;      // V
  double enc_b = 0.0;      // V
  double flex_node = 0.0;  // V at the divider node
  double pressed_5v = 0.0; // V
  double rpm = 0.0;        // firmware estimate, output shaft
  double duty = 0.0;
  double pos = 0.0;        // mm

  double value(Signal s) const;
};

struct TraceConfig {
  std::vector<std::string> signals;
  double sample_hz = 1000.0;
  double duration = 1.0;
};

/// Column store: t plus one column per signal, all the same length.
struct Trace {
  std::vector<std::string> names;
  std::vector<double> t;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return t.size(); }
  /// Column for a signal name; throws UnknownSignal if it was not recorded.
  const std::vector<double>& column(std::string_view name) const;
};

/// Samples a Probe every decimation-th plant step. The sample period must be
/// a whole number of plant steps.
class ScopeRecorder {
 public:
  /// Throws UnknownSignal or InvalidParams.
  ScopeRecorder(const TraceConfig& cfg, double dt_plant);

  /// Rolling recorders keep only the newest `max_rows` samples and ignore
  /// the configured duration.
  static ScopeRecorder rolling(const TraceConfig& cfg, double dt_plant, std::size_t max_rows);

  void on_step(std::uint64_t step, double t, const Probe& probe);

  /// floor(duration * sample_hz) + 1 for fixed recorders.
  std::size_t expected_rows() const { return expected_rows_; }
  std::uint64_t decimation() const { return decimation_; }
  Trace trace() const;

 private:
  std::vector<Signal> signals_;
  std::uint64_t decimation_ = 1;
  std::size_t expected_rows_ = 0;
  std::size_t max_rows_ = 0;  // 0: fixed length
  Trace trace_;
};

/// "t_s,<name>,..." then one row per sample; t with 6 decimals, values in
/// shortest round-trip form.
std::string scope_to_csv(const Trace& trace);
/// Throws IoFailure (also for an empty trace).
void scope_export_csv(const Trace& trace, const std::filesystem::path& path);
/// Throws IoFailure on unreadable or malformed files.
Trace scope_import_csv(const std::filesystem::path& path);

}  // namespace simbench
