// qhs: two-mode parametric haloscope simulator and synthetic-signal search.
//
// Commands: sparams, visibility, scan-rate, search, report, envelope-cache.
// Exit codes: 0 success, 2 configuration error, 3 numerical/runtime failure.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qhs/config.hpp"
#include "qhs/io.hpp"
#include "qhs/units.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string mode = "QL";
  int trials = -1;
  std::int64_t seed = -1;
  std::string acq_mode = "fast";
  int threads = -1;
  bool force = false;
  std::vector<std::string> run_dirs;
};

std::vector<double> symmetric_grid_rad(double span_hz, double step_hz) {
  const long n = std::lround(span_hz / step_hz);
  std::vector<double> g;
  g.reserve(2 * n + 1);
  for (long i = -n; i <= n; ++i) g.push_back(qhs::rad_from_hz(step_hz * static_cast<double>(i)));
  return g;
}

ordered_json report_from_scan(const qhs::ScanRateReport& r) {
  return {{"integral_alpha_sq_rad_s", r.integral_alpha_sq},
          {"peak_alpha", r.peak_alpha},
          {"visibility_bandwidth_hz", qhs::hz_from_rad(r.visibility_bandwidth)}};
}

void apply_overrides(qhs::RunConfig* cfg, const CommonArgs& args) {
  if (args.trials > 0) cfg->trials = args.trials;
  if (args.seed >= 0) cfg->master_seed = static_cast<uint64_t>(args.seed);
  if (args.threads > 0) cfg->threads = args.threads;
}

int cmd_sparams(const qhs::RunConfig& cfg, const CommonArgs& args) {
  const qhs::OperatingMode mode = qhs::mode_from_string(args.mode);
  const qhs::SystemParams sys = cfg.system_for(mode);
  qhs::ensure_directory(args.out_dir);
  qhs::CsvWriter csv(args.out_dir + "/sparams.csv",
                     "detuning_Hz,S_ml_sq,S_mm_sq,S_ma_sq,phase_preserving_gain");
  for (double hz = -cfg.export_span; hz <= cfg.export_span + 0.5 * cfg.export_step;
       hz += cfg.export_step) {
    const double d = qhs::rad_from_hz(hz);
    const qhs::PortPsd p = qhs::port_psd(sys, d);
    const double values[] = {hz, p.cavity_noise, p.measurement_noise, p.signal_gain,
                             qhs::phase_preserving_gain(sys, d)};
    csv.row(values);
  }
  qhs::write_text_file(args.out_dir + "/manifest.json",
                       qhs::manifest_json(cfg, mode, "-", 0, cfg.master_seed));
  std::cout << "wrote " << args.out_dir << "/sparams.csv\n";
  return 0;
}

int cmd_visibility(const qhs::RunConfig& cfg, const CommonArgs& args, bool write_curves) {
  const qhs::ChainParams chain = cfg.chain();
  const std::vector<double> rate_grid = symmetric_grid_rad(cfg.rate_span, cfg.rate_step);
  const std::vector<double> export_grid = symmetric_grid_rad(cfg.export_span, cfg.export_step);

  qhs::ensure_directory(args.out_dir);
  ordered_json report;
  double ql_integral = 0.0;
  double ql_peak_alpha_sq = 0.0;
  for (const auto mode :
       {qhs::OperatingMode::kQL, qhs::OperatingMode::kGC, qhs::OperatingMode::kGCI}) {
    const qhs::SystemParams sys = cfg.system_for(mode);
    const qhs::VisibilityCurve rate_curve = qhs::visibility_curve(sys, chain, rate_grid);
    const qhs::ScanRateReport scan = qhs::scan_rate(rate_curve);
    report[qhs::to_string(mode)] = report_from_scan(scan);
    if (mode == qhs::OperatingMode::kQL) {
      ql_integral = scan.integral_alpha_sq;
      ql_peak_alpha_sq = scan.peak_alpha * scan.peak_alpha;
    } else {
      report[qhs::to_string(mode)]["enhancement_over_QL"] = scan.integral_alpha_sq / ql_integral;
    }
    if (write_curves) {
      const qhs::VisibilityCurve c = qhs::visibility_curve(sys, chain, export_grid);
      qhs::CsvWriter csv(
          args.out_dir + "/visibility_" + qhs::to_string(mode) + ".csv",
          "detuning_Hz,alpha,alpha_sq_normalized,cavity_noise,measurement_noise,total_noise");
      for (size_t i = 0; i < c.size(); ++i) {
        const double values[] = {qhs::hz_from_rad(c.detuning[i]),
                                 c.alpha[i],
                                 c.alpha[i] * c.alpha[i] / ql_peak_alpha_sq,
                                 c.cavity_noise[i],
                                 c.measurement_noise[i],
                                 c.total_noise[i]};
        csv.row(values);
      }
    }
  }
  qhs::write_text_file(args.out_dir + "/report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_envelope_cache(const qhs::RunConfig& cfg, const CommonArgs& args) {
  const qhs::FaxionConfig faxion = cfg.faxion();
  const double res = cfg.acquisition().resolution();
  const qhs::SpectralEnvelope env =
      qhs::cached_envelope(faxion, res, cfg.cache_dir, args.force);
  std::cout << "envelope cached: " << env.density.size() << " bins at " << res
            << " Hz, peak offset " << env.peak_offset() << " Hz\n";
  return 0;
}

int cmd_search(const qhs::RunConfig& cfg, const CommonArgs& args) {
  const qhs::OperatingMode mode = qhs::mode_from_string(args.mode);
  const qhs::AcqMode acq_mode = args.acq_mode == "timedomain" || args.acq_mode == "time-domain"
                                    ? qhs::AcqMode::kTimeDomain
                                    : qhs::AcqMode::kFast;
  const qhs::SystemParams sys = cfg.system_for(mode);
  const qhs::ChainParams chain = cfg.chain();
  const qhs::FaxionConfig faxion = cfg.faxion();
  const qhs::AcquisitionParams acq = cfg.acquisition();
  const qhs::TuningPlan plan = cfg.plan();
  const qhs::SpectralEnvelope env =
      qhs::cached_envelope(faxion, acq.resolution(), cfg.cache_dir, false);
  const qhs::SearchModel model =
      qhs::SearchModel::build(sys, cfg.ql_reference(), chain, faxion, acq, env);

  const qhs::SearchSummary summary =
      qhs::run_trials(model, faxion, plan, acq, cfg.pipeline(), cfg.master_seed, cfg.trials,
                      acq_mode, cfg.threads);

  qhs::ensure_directory(args.out_dir);
  qhs::write_text_file(args.out_dir + "/manifest.json",
                       qhs::manifest_json(cfg, mode, args.acq_mode, cfg.trials, cfg.master_seed));
  {
    qhs::CsvWriter csv(args.out_dir + "/outcomes.csv", "trial,offset_Hz,excess_sigma,truth_hit");
    for (const auto& o : summary.outcomes) {
      const double values[] = {static_cast<double>(o.trial_index), o.best_bin_offset,
                               o.best_excess, o.truth_hit ? 1.0 : 0.0};
      csv.row(values);
    }
  }
  {
    const auto& c = summary.first_trial.combined;
    qhs::CsvWriter csv(args.out_dir + "/combined.csv", "offset_Hz,excess,sigma");
    for (size_t i = 0; i < c.excess.size(); ++i) {
      if (!c.valid[i]) continue;
      const double values[] = {c.offset_hz(i), c.excess[i], c.sigma[i]};
      csv.row(values);
    }
  }
  {
    const auto& g = summary.first_trial.grand;
    qhs::CsvWriter csv(args.out_dir + "/grand.csv", "offset_Hz,excess_sigma_units");
    for (size_t i = 0; i < g.excess.size(); ++i) {
      if (!g.valid[i]) continue;
      const double values[] = {g.offset_hz(i), g.excess[i]};
      csv.row(values);
    }
  }
  {
    ordered_json truth;
    truth["first_trial_truth_offset_hz"] = summary.first_trial.truth_offset;
    for (const auto& o : summary.outcomes)
      truth["trials"].push_back(
          {{"trial", o.trial_index},
           {"truth_offset_hz",
            qhs::draw_truth_offset(plan, model.grid, cfg.master_seed, o.trial_index)}});
    qhs::write_text_file(args.out_dir + "/truth.json", truth.dump(2) + "\n");
  }
  {
    ordered_json rep;
    rep["mode"] = qhs::to_string(mode);
    rep["trials"] = cfg.trials;
    rep["hit_fraction"] = [&] {
      double h = 0.0;
      for (const auto& o : summary.outcomes) h += o.truth_hit ? 1.0 : 0.0;
      return h / summary.outcomes.size();
    }();
    rep["mu"] = summary.histogram.mu;
    rep["mu_stderr"] = summary.histogram.mu_stderr;
    rep["sigma"] = summary.histogram.sigma;
    qhs::write_text_file(args.out_dir + "/report.json", rep.dump(2) + "\n");
    std::cout << rep.dump(2) << "\n";
  }
  return 0;
}

int cmd_report(const CommonArgs& args) {
  if (args.run_dirs.empty()) throw qhs::ConfigError("report: no run directories given");
  ordered_json agg;
  double mu_ql = 0.0, se_ql = 0.0;
  bool have_ql = false;
  std::vector<std::pair<std::string, std::pair<double, double>>> others;
  for (const auto& dir : args.run_dirs) {
    const fs::path rep_path = fs::path(dir) / "report.json";
    if (!fs::exists(rep_path)) throw qhs::ConfigError("report: missing " + rep_path.string());
    const ordered_json rep = ordered_json::parse(qhs::read_text_file(rep_path.string()));
    const std::string mode = rep.at("mode");
    agg["runs"].push_back({{"dir", dir},
                           {"mode", mode},
                           {"mu", rep.at("mu")},
                           {"mu_stderr", rep.at("mu_stderr")}});
    if (mode == "QL" && !have_ql) {
      mu_ql = rep.at("mu");
      se_ql = rep.at("mu_stderr");
      have_ql = true;
    } else {
      others.push_back({mode, {rep.at("mu"), rep.at("mu_stderr")}});
    }
  }
  if (have_ql) {
    for (const auto& [mode, ms] : others) {
      const double r = ms.first / mu_ql;
      const double rel =
          std::sqrt(std::pow(ms.second / ms.first, 2) + std::pow(se_ql / mu_ql, 2));
      agg["enhancement_" + mode + "_over_QL"] = {{"value", r * r},
                                                 {"uncertainty", 2.0 * r * r * rel}};
    }
  }
  qhs::ensure_directory(args.out_dir);
  // histogram export: per-run excess values, normalized counts
  {
    qhs::CsvWriter csv(args.out_dir + "/histogram.csv", "dir_index,trial,excess_sigma");
    for (size_t d = 0; d < args.run_dirs.size(); ++d) {
      const fs::path p = fs::path(args.run_dirs[d]) / "outcomes.csv";
      if (!fs::exists(p)) continue;
      std::istringstream in(qhs::read_text_file(p.string()));
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        double trial, off, exc, hit;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &trial, &off, &exc, &hit) == 4) {
          const double values[] = {static_cast<double>(d), trial, exc};
          csv.row(values);
        }
      }
    }
  }
  qhs::write_text_file(args.out_dir + "/aggregate.json", agg.dump(2) + "\n");
  std::cout << agg.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-mode parametric haloscope simulation and synthetic axion search"};
  app.require_subcommand(1);
  CommonArgs args;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", args.config_path, "configuration file (ini)");
    if (needs_config) opt->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--threads", args.threads, "worker threads");
    sub->add_option("--seed", args.seed, "master seed override");
  };

  auto* sparams = app.add_subcommand("sparams", "scattering parameter curves");
  add_common(sparams, true);
  sparams->add_option("--mode", args.mode, "QL, GC or GCI");

  auto* visibility = app.add_subcommand("visibility", "visibility curves and scan-rate report");
  add_common(visibility, true);

  auto* scanrate = app.add_subcommand("scan-rate", "scan-rate report only");
  add_common(scanrate, true);

  auto* search = app.add_subcommand("search", "synthetic axion search");
  add_common(search, true);
  search->add_option("--mode", args.mode, "QL, GC or GCI");
  search->add_option("--trials", args.trials, "number of trials");
  search->add_option("--acq-mode", args.acq_mode, "fast or timedomain");

  auto* report = app.add_subcommand("report", "aggregate search run directories");
  report->add_option("dirs", args.run_dirs, "run directories")->required();
  report->add_option("--out", args.out_dir, "output directory");

  auto* envcache = app.add_subcommand("envelope-cache", "build the faxion envelope cache");
  add_common(envcache, true);
  envcache->add_flag("--force", args.force, "regenerate even if cached");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) return cmd_report(args);
    qhs::RunConfig cfg = qhs::load_config(args.config_path);
    apply_overrides(&cfg, args);
    if (sparams->parsed()) return cmd_sparams(cfg, args);
    if (visibility->parsed()) return cmd_visibility(cfg, args, true);
    if (scanrate->parsed()) return cmd_visibility(cfg, args, false);
    if (search->parsed()) return cmd_search(cfg, args);
    if (envcache->parsed()) return cmd_envelope_cache(cfg, args);
  } catch (const qhs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
