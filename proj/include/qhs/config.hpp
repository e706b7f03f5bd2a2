#pragma once

#include <map>
#include <string>

#include "qhs/search.hpp"

namespace qhs {

enum class OperatingMode { kQL, kGC, kGCI };

OperatingMode mode_from_string(const std::string& s);
std::string to_string(OperatingMode m);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat view of the config file; frequencies quoted in Hz throughout, presets
// resolved into angular rates on demand.
struct RunConfig {
  // [system]
  double f_cavity = 7.454e9;
  double f_readout = 4.98e9;
  double kappa_loss = 960e3;
  double kappa_axion = 1220.0;
  double kappa_meas = 20.6e6;
  double readout_loss = 0.0;
  double g_gc = 7.30e6;          // balanced GC rate
  double g_gci_swap = 12.25e6;   // imbalanced pair
  double g_gci_tms = 11.76e6;

  // [chain]
  double eta = 0.9;
  double n_sys = 32.0;
  double temperature = 0.020;
  double jpa_peak_db = 30.0;
  double jpa_bandwidth = 2.0e6;
  double f_signal = 4.98e9;

  // [faxion]
  double update_rate = 1.5e3;
  double modulation_depth = 30e3;
  double carrier_power = 0.01;
  double beta_sq = 8.1e-7;

  // [acquisition]
  int sub_traces = 32;
  double sub_trace_duration = 5e-3;
  double half_span = 13.8e6;

  // [plan]
  double step_size = 10e3;
  double window = 26e6;
  double init_window = 1e6;
  double init_center = -13e6;

  // [run]
  int trials = 30;
  uint64_t master_seed = 20230417;
  int threads = 1;
  int sg_window = 301;
  int sg_order = 4;
  bool keep_raw = false;
  std::string cache_dir = "cache";

  // [grids]
  double export_span = 15e6;   // +- Hz for curve exports
  double export_step = 2e3;
  double rate_span = 40e6;     // +- Hz for scan-rate integrals
  double rate_step = 2e3;

  SystemParams system_for(OperatingMode mode) const;
  SystemParams ql_reference() const { return system_for(OperatingMode::kQL); }
  ChainParams chain() const;
  FaxionConfig faxion() const;
  AcquisitionParams acquisition() const;
  TuningPlan plan() const;
  PipelineOptions pipeline() const;
};

RunConfig load_config(const std::string& path);

using IniData = std::map<std::string, std::map<std::string, std::string>>;
IniData parse_ini(const std::string& text);

}  // namespace qhs
