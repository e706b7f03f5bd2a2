#pragma once

#include <span>
#include <string>
#include <vector>

#include "qhs/config.hpp"

namespace qhs {

// CSV writing with a fixed numeric format so identical runs are
// byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  ~CsvWriter();
  void row(std::span<const double> values);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_double(double v);

void ensure_directory(const std::string& path);

// Resolved-config echo written into every run directory.
std::string manifest_json(const RunConfig& config, OperatingMode mode, const std::string& acq_mode,
                          int trials, uint64_t seed);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Analysis-visible serialization of raw spectra: grid, step indices and PSD
// values only. Truth bookkeeping fields are deliberately absent.
std::string serialize_for_analysis(std::span<const RawSpectrum> spectra);

}  // namespace qhs
