#include "qhs/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qhs {

struct CsvWriter::Impl {
  std::FILE* f = nullptr;
};

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : impl_(new Impl) {
  impl_->f = std::fopen(path.c_str(), "w");
  if (!impl_->f) {
    delete impl_;
    throw std::runtime_error("cannot write file: " + path);
  }
  std::fprintf(impl_->f, "%s\n", header.c_str());
}

CsvWriter::~CsvWriter() {
  if (impl_->f) std::fclose(impl_->f);
  delete impl_;
}

void CsvWriter::row(std::span<const double> values) {
  for (size_t i = 0; i < values.size(); ++i)
    std::fprintf(impl_->f, i + 1 < values.size() ? "%.12g," : "%.12g\n", values[i]);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void ensure_directory(const std::string& path) { std::filesystem::create_directories(path); }

std::string manifest_json(const RunConfig& config, OperatingMode mode, const std::string& acq_mode,
                          int trials, uint64_t seed) {
  const SystemParams sys = config.system_for(mode);
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["acquisition_mode"] = acq_mode;
  j["trials"] = trials;
  j["master_seed"] = seed;
  j["system"] = {{"cavity_frequency_hz", config.f_cavity},
                 {"readout_frequency_hz", config.f_readout},
                 {"kappa_loss_hz", config.kappa_loss},
                 {"kappa_axion_hz", config.kappa_axion},
                 {"kappa_meas_hz", config.kappa_meas},
                 {"readout_loss_hz", config.readout_loss},
                 {"g_swap_rad_s", sys.rates.g_swap},
                 {"g_tms_rad_s", sys.rates.g_tms}};
  j["chain"] = {{"eta", config.eta},
                {"n_sys_quanta", config.n_sys},
                {"temperature_k", config.temperature},
                {"jpa_peak_db", config.jpa_peak_db},
                {"jpa_bandwidth_hz", config.jpa_bandwidth},
                {"signal_frequency_hz", config.f_signal}};
  j["faxion"] = {{"update_rate_hz", config.update_rate},
                 {"modulation_depth_hz", config.modulation_depth},
                 {"carrier_power", config.carrier_power},
                 {"beta_sq", config.beta_sq}};
  j["acquisition"] = {{"sub_traces", config.sub_traces},
                      {"sub_trace_duration_s", config.sub_trace_duration},
                      {"half_span_hz", config.half_span},
                      {"resolution_hz", config.acquisition().resolution()}};
  j["plan"] = {{"step_size_hz", config.step_size},
               {"window_hz", config.window},
               {"init_window_hz", config.init_window},
               {"init_center_hz", config.init_center},
               {"step_count", config.plan().step_count()}};
  j["pipeline"] = {{"sg_window", config.sg_window}, {"sg_order", config.sg_order}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string serialize_for_analysis(std::span<const RawSpectrum> spectra) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& s : spectra) {
    out << s.step_index << ':' << s.grid.resolution << ':' << s.grid.n_half << '\n';
    for (double v : s.psd) out << v << ',';
    out << '\n';
  }
  return out.str();
}

}  // namespace qhs
