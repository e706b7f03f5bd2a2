#include "qhs/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qhs/units.hpp"

namespace qhs {

OperatingMode mode_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "QL") return OperatingMode::kQL;
  if (u == "GC") return OperatingMode::kGC;
  if (u == "GCI") return OperatingMode::kGCI;
  throw ConfigError("unknown mode '" + s + "' (expected QL, GC or GCI)");
}

std::string to_string(OperatingMode m) {
  switch (m) {
    case OperatingMode::kQL: return "QL";
    case OperatingMode::kGC: return "GC";
    case OperatingMode::kGCI: return "GCI";
  }
  return "?";
}

SystemParams RunConfig::system_for(OperatingMode mode) const {
  SystemParams p;
  p.cavity.frequency = rad_from_hz(f_cavity);
  p.cavity.internal_loss_rate = rad_from_hz(kappa_loss);
  p.cavity.external_coupling_rate = rad_from_hz(kappa_axion);
  p.readout.frequency = rad_from_hz(f_readout);
  p.readout.internal_loss_rate = rad_from_hz(readout_loss);
  p.readout.external_coupling_rate = rad_from_hz(kappa_meas);
  switch (mode) {
    case OperatingMode::kQL:
      p.rates.g_swap = critical_swap_rate(p.readout.external_coupling_rate,
                                          p.cavity.internal_loss_rate);
      p.rates.g_tms = 0.0;
      break;
    case OperatingMode::kGC:
      p.rates.g_swap = rad_from_hz(g_gc);
      p.rates.g_tms = rad_from_hz(g_gc);
      break;
    case OperatingMode::kGCI:
      p.rates.g_swap = rad_from_hz(g_gci_swap);
      p.rates.g_tms = rad_from_hz(g_gci_tms);
      break;
  }
  p.validate();
  return p;
}

ChainParams RunConfig::chain() const {
  ChainParams c;
  c.efficiency_eta = eta;
  c.temperature = temperature;
  c.n_sys_quanta = n_sys;
  c.jpa.peak_power_gain = power_from_db(jpa_peak_db);
  c.jpa.bandwidth_3db = rad_from_hz(jpa_bandwidth);
  c.signal_frequency = rad_from_hz(f_signal);
  c.validate();
  return c;
}

FaxionConfig RunConfig::faxion() const {
  FaxionConfig f;
  f.update_rate = update_rate;
  f.modulation_depth = modulation_depth;
  f.carrier_power = carrier_power;
  f.lineshape.rest_frequency = f_cavity;
  f.lineshape.velocity_parameter = beta_sq;
  f.validate();
  return f;
}

AcquisitionParams RunConfig::acquisition() const {
  AcquisitionParams a;
  a.sub_traces = sub_traces;
  a.sub_trace_duration = sub_trace_duration;
  a.half_span = half_span;
  a.validate();
  return a;
}

TuningPlan RunConfig::plan() const {
  TuningPlan p;
  p.step_size = step_size;
  p.window = window;
  p.init_window = init_window;
  p.init_center = init_center;
  p.validate(acquisition().resolution());
  return p;
}

PipelineOptions RunConfig::pipeline() const {
  PipelineOptions o;
  o.sg_window = sg_window;
  o.sg_order = sg_order;
  return o;
}

IniData parse_ini(const std::string& text) {
  IniData data;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    data[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return data;
}

namespace {

class IniReader {
 public:
  explicit IniReader(IniData data) : data_(std::move(data)) {}

  double number(const std::string& sec, const std::string& key, double fallback) {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const double x = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return x;
    } catch (...) {
      throw ConfigError("config [" + sec + "] " + key + ": not a number: '" + *v + "'");
    }
  }

  uint64_t integer(const std::string& sec, const std::string& key, uint64_t fallback) {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    try {
      return std::stoull(*v);
    } catch (...) {
      throw ConfigError("config [" + sec + "] " + key + ": not an integer: '" + *v + "'");
    }
  }

  bool boolean(const std::string& sec, const std::string& key, bool fallback) {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ConfigError("config [" + sec + "] " + key + ": expected true/false");
  }

  std::string text(const std::string& sec, const std::string& key, std::string fallback) {
    const std::string* v = find(sec, key);
    return v ? *v : fallback;
  }

 private:
  const std::string* find(const std::string& sec, const std::string& key) const {
    const auto s = data_.find(sec);
    if (s == data_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }

  IniData data_;
};

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  IniReader r(parse_ini(buf.str()));

  RunConfig c;
  c.f_cavity = r.number("system", "cavity_frequency", c.f_cavity);
  c.f_readout = r.number("system", "readout_frequency", c.f_readout);
  c.kappa_loss = r.number("system", "kappa_loss", c.kappa_loss);
  c.kappa_axion = r.number("system", "kappa_axion", c.kappa_axion);
  c.kappa_meas = r.number("system", "kappa_meas", c.kappa_meas);
  c.readout_loss = r.number("system", "readout_loss", c.readout_loss);
  c.g_gc = r.number("system", "g_gc", c.g_gc);
  c.g_gci_swap = r.number("system", "g_gci_swap", c.g_gci_swap);
  c.g_gci_tms = r.number("system", "g_gci_tms", c.g_gci_tms);

  c.eta = r.number("chain", "eta", c.eta);
  c.n_sys = r.number("chain", "n_sys", c.n_sys);
  c.temperature = r.number("chain", "temperature", c.temperature);
  c.jpa_peak_db = r.number("chain", "jpa_peak_db", c.jpa_peak_db);
  c.jpa_bandwidth = r.number("chain", "jpa_bandwidth", c.jpa_bandwidth);
  c.f_signal = r.number("chain", "signal_frequency", c.f_signal);

  c.update_rate = r.number("faxion", "update_rate", c.update_rate);
  c.modulation_depth = r.number("faxion", "modulation_depth", c.modulation_depth);
  c.carrier_power = r.number("faxion", "carrier_power", c.carrier_power);
  c.beta_sq = r.number("faxion", "beta_sq", c.beta_sq);

  c.sub_traces = static_cast<int>(r.integer("acquisition", "sub_traces", c.sub_traces));
  c.sub_trace_duration = r.number("acquisition", "sub_trace_duration", c.sub_trace_duration);
  c.half_span = r.number("acquisition", "half_span", c.half_span);

  c.step_size = r.number("plan", "step_size", c.step_size);
  c.window = r.number("plan", "window", c.window);
  c.init_window = r.number("plan", "init_window", c.init_window);
  c.init_center = r.number("plan", "init_center", c.init_center);

  c.trials = static_cast<int>(r.integer("run", "trials", c.trials));
  c.master_seed = r.integer("run", "seed", c.master_seed);
  c.threads = static_cast<int>(r.integer("run", "threads", c.threads));
  c.sg_window = static_cast<int>(r.integer("run", "sg_window", c.sg_window));
  c.sg_order = static_cast<int>(r.integer("run", "sg_order", c.sg_order));
  c.keep_raw = r.boolean("run", "keep_raw", c.keep_raw);
  c.cache_dir = r.text("run", "cache_dir", c.cache_dir);

  c.export_span = r.number("grids", "export_span", c.export_span);
  c.export_step = r.number("grids", "export_step", c.export_step);
  c.rate_span = r.number("grids", "rate_span", c.rate_span);
  c.rate_step = r.number("grids", "rate_step", c.rate_step);
  return c;
}

}  // namespace qhs
