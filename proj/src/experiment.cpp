#include "epps/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace epps {

namespace {

template <typename T>
T parse_int(std::string_view text, const std::string& field) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(field, "not an integer: '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::string innovation_name(Innovation i) { return i == Innovation::gaussian ? "gaussian" : "heavy-tailed"; }

Innovation parse_innovation(const std::string& s) {
  if (s == "gaussian") return Innovation::gaussian;
  if (s == "heavy-tailed" || s == "student-t") return Innovation::heavy_tailed;
  throw ConfigError("innovation", "expected gaussian or heavy-tailed, got '" + s + "'");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::simulate_noh: return "simulate-noh";
    case Mode::simulate_garch: return "simulate-garch";
    case Mode::from_file: return "from-file";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "simulate-noh") return Mode::simulate_noh;
  if (s == "simulate-garch") return Mode::simulate_garch;
  if (s == "from-file") return Mode::from_file;
  throw ConfigError("mode", "expected simulate-noh, simulate-garch or from-file, got '" + s + "'");
}

std::vector<Timestamp> parse_dts(const std::string& text) {
  if (text.empty()) throw ConfigError("dts", "empty interval list");
  std::vector<Timestamp> out;
  for (auto part : split(text, ',')) {
    const std::size_t range = part.find("..");
    if (range == std::string_view::npos) {
      out.push_back(parse_int<Timestamp>(part, "dts"));
      continue;
    }
    const auto lo = parse_int<Timestamp>(part.substr(0, range), "dts");
    std::string_view rest = part.substr(range + 2);
    const std::size_t colon = rest.find(':');
    const std::size_t slash = rest.find('/');
    if (slash != std::string_view::npos) {
      const auto hi = parse_int<Timestamp>(rest.substr(0, slash), "dts");
      const auto step = parse_int<Timestamp>(rest.substr(slash + 1), "dts");
      if (step <= 0) throw ConfigError("dts", "linear step must be positive");
      for (Timestamp v = lo; v <= hi; v += step) out.push_back(v);
      continue;
    }
    const auto hi = parse_int<Timestamp>(rest.substr(0, colon), "dts");
    const int points = colon == std::string_view::npos ? 12 : parse_int<int>(rest.substr(colon + 1), "dts");
    if (lo <= 0 || hi < lo) throw ConfigError("dts", "range needs 0 < start <= end");
    if (points < 2) throw ConfigError("dts", "a range needs at least two points");
    const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
    for (int k = 0; k < points; ++k) {
      const double v = static_cast<double>(lo) * std::exp(ratio * k / (points - 1));
      out.push_back(k == points - 1 ? hi : static_cast<Timestamp>(std::llround(v)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() <= 0) throw ConfigError("dts", "intervals must be positive");
  return out;
}

std::vector<SessionSpec> parse_sessions(const std::string& text, Timestamp underlying_step) {
  std::vector<SessionSpec> out;
  for (auto part : split(text, ',')) {
    const auto bounds = split(part, ':');
    if (bounds.size() != 2) throw ConfigError("sessions", "expected start:end, got '" + std::string(part) + "'");
    SessionSpec s{parse_int<Timestamp>(bounds[0], "sessions"), parse_int<Timestamp>(bounds[1], "sessions"),
                  underlying_step};
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("sessions", e.what());
    }
    out.push_back(s);
  }
  return out;
}

void ExperimentConfig::validate() const {
  const bool simulated = mode != Mode::from_file;
  if (simulated) {
    try {
      noh.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("noh", e.what());
    }
    if (mode == Mode::simulate_garch) {
      try {
        garch.validate();
      } catch (const std::exception& e) {
        throw ConfigError("garch", e.what());
      }
    }
    for (double m : mu)
      if (!(m > 0.0)) throw ConfigError("mu", "mean waiting times must be positive");
  } else {
    if (ticks.empty()) throw ConfigError("ticks", "from-file mode needs a tick file");
    if (file_underlying_step < 1) throw ConfigError("file_underlying_step", "must be >= 1");
    if (!sessions.empty() && !daily_session.empty())
      throw ConfigError("sessions", "give either sessions or daily_session, not both");
  }
  const Timestamp step = simulated ? noh.underlying_step : file_underlying_step;
  for (Timestamp dt : parse_dts(dts))
    if (dt < step) throw ConfigError("dts", "interval " + std::to_string(dt) + " below the underlying step");
  if (!overlap_dts.empty()) parse_dts(overlap_dts);
  if (grid_step < 0) throw ConfigError("grid_step", "must be >= 0");
  if (compensation.weight_cap && !(*compensation.weight_cap > 0.0))
    throw ConfigError("weight_cap", "must be positive");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json garch = {{"alpha0", cfg.garch.alpha0}, {"alpha1", cfg.garch.alpha1}, {"beta1", cfg.garch.beta1}};
  garch["sigma0"] = cfg.garch.sigma0 ? nlohmann::json(*cfg.garch.sigma0) : nlohmann::json();
  nlohmann::json j = {
      {"mode", to_string(cfg.mode)},
      {"noh",
       {{"c", cfg.noh.c},
        {"n_steps", cfg.noh.n_steps},
        {"innovation", innovation_name(cfg.noh.innovation)},
        {"underlying_step", cfg.noh.underlying_step}}},
      {"garch", garch},
      {"sampling", {{{"mu", cfg.mu[0]}}, {{"mu", cfg.mu[1]}}}},
      {"seed", cfg.seed},
      {"dts", cfg.dts},
      {"grid_step", cfg.grid_step},
      {"overlap_dts", cfg.overlap_dts},
      {"filter_normalization",
       cfg.compensation.filter_normalization == FilterNormalization::subset ? "subset" : "full"},
      {"ticks", cfg.ticks.string()},
      {"symbols", cfg.symbols},
      {"sessions", cfg.sessions},
      {"daily_session", cfg.daily_session},
      {"file_underlying_step", cfg.file_underlying_step},
      {"out_dir", cfg.out_dir.string()},
      {"threads", cfg.threads},
  };
  j["weight_cap"] = cfg.compensation.weight_cap ? nlohmann::json(*cfg.compensation.weight_cap) : nlohmann::json();
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  const nlohmann::json& j = doc.contains("config") ? doc.at("config") : doc;
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  ExperimentConfig cfg;
  auto get = [&](const nlohmann::json& obj, const char* key, auto& target) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    try {
      obj.at(key).get_to(target);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, e.what());
    }
  };
  try {
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("noh")) {
      const auto& n = j.at("noh");
      get(n, "c", cfg.noh.c);
      get(n, "n_steps", cfg.noh.n_steps);
      get(n, "underlying_step", cfg.noh.underlying_step);
      if (n.contains("innovation")) cfg.noh.innovation = parse_innovation(n.at("innovation").get<std::string>());
    }
    if (j.contains("garch")) {
      const auto& g = j.at("garch");
      get(g, "alpha0", cfg.garch.alpha0);
      get(g, "alpha1", cfg.garch.alpha1);
      get(g, "beta1", cfg.garch.beta1);
      if (g.contains("sigma0") && !g.at("sigma0").is_null()) cfg.garch.sigma0 = g.at("sigma0").get<double>();
    }
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      if (!s.is_array() || s.size() != 2) throw ConfigError("sampling", "expected two {\"mu\": ...} entries");
      for (std::size_t i = 0; i < 2; ++i) get(s.at(i), "mu", cfg.mu[i]);
    }
    get(j, "seed", cfg.seed);
    get(j, "dts", cfg.dts);
    get(j, "grid_step", cfg.grid_step);
    get(j, "overlap_dts", cfg.overlap_dts);
    if (j.contains("filter_normalization")) {
      const auto v = j.at("filter_normalization").get<std::string>();
      if (v == "subset") cfg.compensation.filter_normalization = FilterNormalization::subset;
      else if (v == "full") cfg.compensation.filter_normalization = FilterNormalization::full;
      else throw ConfigError("filter_normalization", "expected subset or full");
    }
    if (j.contains("weight_cap") && !j.at("weight_cap").is_null())
      cfg.compensation.weight_cap = j.at("weight_cap").get<double>();
    if (j.contains("ticks")) cfg.ticks = j.at("ticks").get<std::string>();
    get(j, "symbols", cfg.symbols);
    get(j, "sessions", cfg.sessions);
    get(j, "daily_session", cfg.daily_session);
    get(j, "file_underlying_step", cfg.file_underlying_step);
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    get(j, "threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  }
  return config_from_json(j);
}

SimulatedPair simulate_pair(const ExperimentConfig& cfg) {
  if (cfg.mode == Mode::from_file) throw ConfigError("mode", "simulate_pair needs a simulate-* mode");
  UnderlyingPair u = cfg.mode == Mode::simulate_garch ? gen_garch_pair(cfg.noh, cfg.garch, cfg.seed)
                                                       : gen_noh_pair(cfg.noh, cfg.seed);
  TickSeries a = sample_ticks(u.first, {cfg.mu[0], derive_seed(cfg.seed, 1)}, "A");
  TickSeries b = sample_ticks(u.second, {cfg.mu[1], derive_seed(cfg.seed, 2)}, "B");
  const SessionSpec session = u.first.session();
  return {std::move(u), std::move(a), std::move(b), session};
}

namespace {

struct Inputs {
  std::optional<TickSeries> a, b;
  std::vector<SessionSpec> sessions;
  std::vector<std::string> warnings;
};

Inputs file_inputs(const ExperimentConfig& cfg) {
  if (!std::filesystem::is_regular_file(cfg.ticks)) throw ConfigError("ticks", "no such file " + cfg.ticks.string());
  LoadResult loaded = load_ticks(cfg.ticks);
  auto pick = [&](const std::string& symbol, std::size_t fallback) -> const TickSeries& {
    if (symbol.empty()) {
      if (loaded.series.size() <= fallback) throw ConfigError("symbols", "tick file holds fewer than two usable symbols");
      return loaded.series[fallback];
    }
    for (const auto& s : loaded.series)
      if (s.symbol() == symbol) return s;
    throw ConfigError("symbols", "symbol '" + symbol + "' not found in " + cfg.ticks.string());
  };
  Inputs in;
  in.warnings = loaded.warnings;
  in.a = pick(cfg.symbols[0], 0);
  in.b = pick(cfg.symbols[1], 1);
  const Timestamp step = cfg.file_underlying_step;

  if (!cfg.sessions.empty()) {
    in.sessions = parse_sessions(cfg.sessions, step);
  } else if (!cfg.daily_session.empty()) {
    const auto day = parse_sessions(cfg.daily_session, step).at(0);
    constexpr Timestamp kDay = 86400;
    const Timestamp first = std::max(in.a->front_time(), in.b->front_time());
    const Timestamp last = std::min(in.a->back_time(), in.b->back_time());
    for (Timestamp d = (first - day.t_start) / kDay - 1; d * kDay + day.t_start <= last; ++d) {
      const SessionSpec s{d * kDay + day.t_start, d * kDay + day.t_end, step};
      // an opening price for both is enough; the close falls back to the last trade
      if (s.t_start >= first && s.t_start < last) in.sessions.push_back(s);
    }
    if (in.sessions.empty()) throw ConfigError("daily_session", "no complete session inside the data");
  } else {
    const Timestamp first = std::max(in.a->front_time(), in.b->front_time());
    Timestamp last = std::min(in.a->back_time(), in.b->back_time());
    last -= (last - first) % step;
    if (last <= first) throw ConfigError("ticks", "the two series do not overlap in time");
    in.sessions.push_back({first, last, step});
  }
  return in;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  Inputs in;
  if (cfg.mode == Mode::from_file) {
    in = file_inputs(cfg);
  } else {
    SimulatedPair sim = simulate_pair(cfg);
    in.a = std::move(sim.a);
    in.b = std::move(sim.b);
    in.sessions = {sim.session};
  }

  const std::vector<Timestamp> dts = parse_dts(cfg.dts);
  const std::vector<Timestamp> overlap_dts = cfg.overlap_dts.empty() ? dts : parse_dts(cfg.overlap_dts);

  RunResult result;
  SweepOptions opts;
  opts.grid_step = cfg.grid_step;
  opts.compensation = cfg.compensation;
  opts.threads = cfg.threads;
  result.curve = epps_sweep(*in.a, *in.b, in.sessions, dts, opts);

  std::vector<std::string> warnings = in.warnings;
  warnings.insert(warnings.end(), result.curve.errors.begin(), result.curve.errors.end());
  for (Timestamp dt : overlap_dts) {
    try {
      result.overlaps.push_back(overlap_stats(pair_samples(*in.a, *in.b, in.sessions, dt, cfg.grid_step), dt));
    } catch (const std::exception& e) {
      warnings.push_back("overlap dt=" + std::to_string(dt) + ": " + e.what());
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = cfg.out_dir / name;
    auto out = open_out(path);
    writer(out);
    result.files.push_back(path);
  };
  emit("curve.csv", [&](std::ostream& o) { write_curve_csv(o, result.curve); });
  for (const auto& s : result.overlaps)
    emit("overlap_" + std::to_string(s.dt) + ".csv", [&](std::ostream& o) { write_overlap_csv(o, s); });
  emit("curve.json", [&](std::ostream& o) {
    nlohmann::json j = to_json(result.curve);
    j["overlaps"] = nlohmann::json::array();
    for (const auto& s : result.overlaps) j["overlaps"].push_back(to_json(s));
    o << j.dump(2) << '\n';
  });

  bool any = false;
  for (auto f : {CurveField::plain, CurveField::compensated, CurveField::filtered})
    any = any || field(result.curve, f).array().isFinite().any();
  result.exit_code = any ? 0 : 2;

  nlohmann::json manifest = {
      {"tool", "epps"},
      {"version", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"config", to_json(cfg)},
      {"resolved_dts", dts},
      {"sessions", nlohmann::json::array()},
      {"outputs", nlohmann::json::array()},
      {"warnings", warnings},
      {"exit_code", result.exit_code},
  };
  for (const auto& s : in.sessions)
    manifest["sessions"].push_back({{"t_start", s.t_start}, {"t_end", s.t_end}, {"underlying_step", s.underlying_step}});
  for (const auto& f : result.files) manifest["outputs"].push_back(f.filename().string());
  emit("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  return result;
}

std::string write_simulated_ticks(const ExperimentConfig& base, int days, Timestamp session_length, Timestamp open,
                                  const std::filesystem::path& out) {
  constexpr Timestamp kDay = 86400;
  if (days < 1) throw ConfigError("days", "must be >= 1");
  if (session_length < 1 || open < 0 || open + session_length >= kDay)
    throw ConfigError("session_length", "session must fit inside one day");
  ExperimentConfig cfg = base;
  if (session_length % cfg.noh.underlying_step != 0)
    throw ConfigError("session_length", "must be a multiple of the underlying step");
  cfg.noh.n_steps = days * session_length / cfg.noh.underlying_step;
  cfg.validate();
  const SimulatedPair sim = simulate_pair(cfg);

  auto relocate = [&](const TickSeries& s) {
    std::vector<Timestamp> times;
    times.reserve(s.size());
    for (Timestamp t : s.times()) {
      const Timestamp d = std::min<Timestamp>(t / session_length, days - 1);
      times.push_back(d * kDay + open + (t - d * session_length));
    }
    return TickSeries(s.symbol(), std::move(times), s.prices());
  };
  save_ticks(out, {relocate(sim.a), relocate(sim.b)});

  std::ostringstream sessions;
  for (int d = 0; d < days; ++d)
    sessions << (d ? "," : "") << d * kDay + open << ':' << d * kDay + open + session_length;
  return sessions.str();
}

}  // namespace epps
