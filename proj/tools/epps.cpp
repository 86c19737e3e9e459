// epps: correlation-versus-interval experiments on simulated or recorded ticks.
//
//   epps run --mode simulate-noh --c 0.4 --mu1 15 --mu2 25 --steps 720000 --dts 60..1800
//   epps run --mode from-file --ticks pair.csv --dts 300,600,1200,2400
//   epps run --config out/manifest.json          # exact re-run
//   epps simulate --days 5 --session-length 23400 --out ticks.csv
//
// Exit codes: 0 success, 1 usage or configuration error, 2 every estimate failed.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "epps/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> mode, innovation, dts, overlap_dts, ticks, sessions, daily_session, out,
      filter_normalization;
  std::optional<double> c, alpha0, alpha1, beta1, sigma0, mu1, mu2, weight_cap;
  std::optional<long long> steps, underlying_step, file_underlying_step, grid_step;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> symbols;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config or run manifest; flags override its fields");
  app->add_option("--mode", o.mode, "simulate-noh | simulate-garch | from-file");
  app->add_option("--c", o.c, "Correlation of the underlying returns");
  app->add_option("--steps", o.steps, "Length of the underlying series");
  app->add_option("--underlying-step", o.underlying_step, "Seconds per underlying step (simulation)");
  app->add_option("--innovation", o.innovation, "gaussian | heavy-tailed");
  app->add_option("--alpha0", o.alpha0);
  app->add_option("--alpha1", o.alpha1);
  app->add_option("--beta1", o.beta1);
  app->add_option("--sigma0", o.sigma0, "Initial GARCH volatility (default: unconditional)");
  app->add_option("--mu1", o.mu1, "Mean waiting time of instrument 1 in seconds");
  app->add_option("--mu2", o.mu2, "Mean waiting time of instrument 2 in seconds");
  app->add_option("--seed", o.seed);
}

void apply(const Overrides& o, epps::ExperimentConfig& cfg) {
  if (o.mode) cfg.mode = epps::parse_mode(*o.mode);
  if (o.c) cfg.noh.c = *o.c;
  if (o.steps) cfg.noh.n_steps = *o.steps;
  if (o.underlying_step) cfg.noh.underlying_step = *o.underlying_step;
  if (o.innovation) {
    if (*o.innovation == "gaussian") cfg.noh.innovation = epps::Innovation::gaussian;
    else if (*o.innovation == "heavy-tailed") cfg.noh.innovation = epps::Innovation::heavy_tailed;
    else throw epps::ConfigError("innovation", "expected gaussian or heavy-tailed");
  }
  if (o.alpha0) cfg.garch.alpha0 = *o.alpha0;
  if (o.alpha1) cfg.garch.alpha1 = *o.alpha1;
  if (o.beta1) cfg.garch.beta1 = *o.beta1;
  if (o.sigma0) cfg.garch.sigma0 = *o.sigma0;
  if (o.mu1) cfg.mu[0] = *o.mu1;
  if (o.mu2) cfg.mu[1] = *o.mu2;
  if (o.seed) cfg.seed = *o.seed;
  if (o.dts) cfg.dts = *o.dts;
  if (o.overlap_dts) cfg.overlap_dts = *o.overlap_dts;
  if (o.grid_step) cfg.grid_step = *o.grid_step;
  if (o.weight_cap) cfg.compensation.weight_cap = *o.weight_cap;
  if (o.filter_normalization) {
    if (*o.filter_normalization == "subset") cfg.compensation.filter_normalization = epps::FilterNormalization::subset;
    else if (*o.filter_normalization == "full") cfg.compensation.filter_normalization = epps::FilterNormalization::full;
    else throw epps::ConfigError("filter_normalization", "expected subset or full");
  }
  if (o.ticks) cfg.ticks = *o.ticks;
  if (!o.symbols.empty()) {
    if (o.symbols.size() != 2) throw epps::ConfigError("symbols", "expected exactly two symbols");
    cfg.symbols = {o.symbols[0], o.symbols[1]};
  }
  if (o.sessions) cfg.sessions = *o.sessions;
  if (o.daily_session) cfg.daily_session = *o.daily_session;
  if (o.file_underlying_step) cfg.file_underlying_step = *o.file_underlying_step;
  if (o.out) cfg.out_dir = *o.out;
  if (o.threads) cfg.threads = *o.threads;
}

epps::ExperimentConfig resolve(const Overrides& o) {
  epps::ExperimentConfig cfg = o.config.empty() ? epps::ExperimentConfig{} : epps::load_config(o.config);
  apply(o, cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epps-effect experiments: previous-tick and overlap-compensated correlations"};
  app.set_version_flag("--version", epps::kVersion);
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Estimate correlation curves and write CSV/JSON outputs");
  add_common(run, run_opts);
  run->add_option("--dts", run_opts.dts, "Return intervals: 60,300 | 60..1800 | 60..1800:20 | 60..1800/60");
  run->add_option("--overlap-dts", run_opts.overlap_dts, "Intervals for overlap histograms (default: --dts)");
  run->add_option("--grid-step", run_opts.grid_step, "Spacing of return windows in seconds (default: dt)");
  run->add_option("--weight-cap", run_opts.weight_cap, "Cap on dt/overlap weights (default: none)");
  run->add_option("--filter-normalization", run_opts.filter_normalization, "subset | full");
  run->add_option("--ticks", run_opts.ticks, "Tick CSV (symbol,time,price) for from-file mode");
  run->add_option("--symbols", run_opts.symbols, "Two symbols to pair (default: first two in file)")->expected(2);
  run->add_option("--sessions", run_opts.sessions, "Sessions as start:end[,start:end...]");
  run->add_option("--daily-session", run_opts.daily_session, "open:close repeated every 86400 s");
  run->add_option("--file-underlying-step", run_opts.file_underlying_step, "Grid step of file data in seconds");
  run->add_option("--out", run_opts.out, "Output directory");
  run->add_option("--threads", run_opts.threads, "Worker threads for the sweep (default: all cores)");

  Overrides sim_opts;
  int days = 1;
  long long session_length = 23400;
  long long open = 34200;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated pair as a multi-day tick CSV");
  add_common(simulate, sim_opts);
  simulate->add_option("--days", days, "Number of sessions")->capture_default_str();
  simulate->add_option("--session-length", session_length, "Seconds per session")->capture_default_str();
  simulate->add_option("--open", open, "Session open, seconds after midnight")->capture_default_str();
  simulate->add_option("--out", sim_out, "Tick CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const epps::ExperimentConfig cfg = resolve(run_opts);
      const epps::RunResult result = epps::run(cfg);
      for (const auto& e : result.curve.errors) std::cerr << "warning: " << e << '\n';
      std::cout << "wrote " << result.files.size() << " files to " << cfg.out_dir.string() << '\n';
      if (result.exit_code != 0) std::cerr << "error: every estimate failed\n";
      return result.exit_code;
    }
    epps::ExperimentConfig cfg = resolve(sim_opts);
    if (cfg.mode == epps::Mode::from_file) throw epps::ConfigError("mode", "simulate needs a simulate-* mode");
    std::cout << epps::write_simulated_ticks(cfg, days, session_length, open, sim_out) << '\n';
    return 0;
  } catch (const epps::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const epps::ParseError& e) {
    std::cerr << "usage error: tick file " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
