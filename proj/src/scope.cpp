#include "simbench/scope.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "simbench/errors.hpp"

namespace simbench {

namespace {

constexpr std::array<std::pair<Signal, std::string_view>, 8> kRegistry{{
    {Signal::VBridge, "v_bridge"},
    {Signal::EncA, "enc_a"},
    {Signal::EncB, "enc_b"},
    {Signal::FlexNode, "flex_node"},
    {Signal::Pressed5v, "pressed_5v"},
    {Signal::Rpm, "rpm"},
    {Signal::Duty, "duty"},
    {Signal::Pos, "pos"},
}};

// Snap to the microsecond grid of the CSV time column.
double snap_time(double t) { return std::round(t * 1e6) / 1e6; }

double parse_field(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoFailure("malformed CSV field '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string_view signal_name(Signal s) {
  for (const auto& [sig, name] : kRegistry) {
    if (sig == s) return name;
  }
  return "?";
}

Signal signal_from_name(std::string_view name) {
  for (const auto& [sig, n] : kRegistry) {
    if (n == name) return sig;
  }
  throw UnknownSignal("unknown signal '" + std::string(name) + "'");
}

bool is_logic(Signal s) {
  return s == Signal::EncA || s == Signal::EncB || s == Signal::Pressed5v;
}

const std::vector<Signal>& all_signals() {
  static const std::vector<Signal> signals = [] {
    std::vector<Signal> v;
    for (const auto& entry : kRegistry) v.push_back(entry.first);
    return v;
  }();
  return signals;
}

double Probe::value(Signal s) const {
  switch (s) {
    case Signal::VBridge:
      return v_bridge;
    case Signal::EncA:
      return enc_a;
    case Signal::EncB:
      return enc_b;
    case Signal::FlexNode:
      return flex_node;
    case Signal::Pressed5v:
      return pressed_5v;
    case Signal::Rpm:
      return rpm;
    case Signal::Duty:
      return duty;
    case Signal::Pos:
      return pos;
  }
  return 0.0;
}

const std::vector<double>& Trace::column(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return columns[k];
  }
  throw UnknownSignal("signal '" + std::string(name) + "' not in trace");
}

ScopeRecorder::ScopeRecorder(const TraceConfig& cfg, double dt_plant) {
  if (cfg.signals.empty()) throw InvalidParams("trace needs at least one signal");
  for (const auto& name : cfg.signals) {
    const Signal s = signal_from_name(name);
    if (std::find(signals_.begin(), signals_.end(), s) != signals_.end()) {
      throw InvalidParams("signal '" + name + "' listed twice");
    }
    signals_.push_back(s);
    trace_.names.push_back(name);
  }
  trace_.columns.resize(signals_.size());

  if (!(dt_plant > 0.0)) throw InvalidParams("plant step must be > 0");
  if (!(cfg.sample_hz > 0.0) || !std::isfinite(cfg.sample_hz)) {
    throw InvalidParams("sample_hz must be > 0");
  }
  const double steps = 1.0 / (cfg.sample_hz * dt_plant);
  const double rounded = std::round(steps);
  if (rounded < 1.0) throw InvalidParams("sample_hz exceeds the plant step rate");
  if (std::abs(steps - rounded) > 1e-6 * rounded) {
    throw InvalidParams("sample period must be a whole number of plant steps");
  }
  decimation_ = static_cast<std::uint64_t>(rounded);

  if (!(cfg.duration >= 0.0) || !std::isfinite(cfg.duration)) {
    throw InvalidParams("trace duration must be >= 0");
  }
  expected_rows_ = static_cast<std::size_t>(std::floor(cfg.duration * cfg.sample_hz + 1e-9)) + 1;
}

ScopeRecorder ScopeRecorder::rolling(const TraceConfig& cfg, double dt_plant,
                                     std::size_t max_rows) {
  ScopeRecorder rec(cfg, dt_plant);
  rec.max_rows_ = std::max<std::size_t>(max_rows, 1);
  return rec;
}

void ScopeRecorder::on_step(std::uint64_t step, double t, const Probe& probe) {
  if (step % decimation_ != 0) return;
  if (max_rows_ == 0 && trace_.rows() >= expected_rows_) return;
  trace_.t.push_back(snap_time(t));
  for (std::size_t k = 0; k < signals_.size(); ++k) {
    trace_.columns[k].push_back(probe.value(signals_[k]));
  }
  // Amortised trim: let the buffer grow to twice the window, then drop half.
  if (max_rows_ != 0 && trace_.rows() >= 2 * max_rows_) {
    const auto drop = static_cast<std::ptrdiff_t>(trace_.rows() - max_rows_);
    trace_.t.erase(trace_.t.begin(), trace_.t.begin() + drop);
    for (auto& col : trace_.columns) col.erase(col.begin(), col.begin() + drop);
  }
}

Trace ScopeRecorder::trace() const {
  if (max_rows_ == 0 || trace_.rows() <= max_rows_) return trace_;
  Trace out;
  out.names = trace_.names;
  const auto drop = static_cast<std::ptrdiff_t>(trace_.rows() - max_rows_);
  out.t.assign(trace_.t.begin() + drop, trace_.t.end());
  for (const auto& col : trace_.columns) out.columns.emplace_back(col.begin() + drop, col.end());
  return out;
}

std::string scope_to_csv(const Trace& trace) {
  std::string out = "t_s";
  for (const auto& name : trace.names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    out += fmt::format("{:.6f}", trace.t[r]);
    for (const auto& col : trace.columns) {
      out += ',';
      out += fmt::format("{}", col[r]);
    }
    out += '\n';
  }
  return out;
}

void scope_export_csv(const Trace& trace, const std::filesystem::path& path) {
  if (trace.rows() == 0) throw IoFailure("refusing to export an empty trace");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << scope_to_csv(trace);
  out.flush();
  if (!out) throw IoFailure("write failed for " + path.string());
}

Trace scope_import_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoFailure("empty CSV " + path.string());

  Trace trace;
  const auto header = split_commas(line);
  if (header.empty() || header.front() != "t_s") throw IoFailure("CSV header must start with t_s");
  for (std::size_t k = 1; k < header.size(); ++k) trace.names.emplace_back(header[k]);
  trace.columns.resize(trace.names.size());

  while (std::getline(in, line)) {
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) throw IoFailure("ragged CSV row");
    trace.t.push_back(parse_field(fields[0]));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      trace.columns[k - 1].push_back(parse_field(fields[k]));
    }
  }
  return trace;
}

}  // namespace simbench
