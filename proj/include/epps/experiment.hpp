// Experiment configuration, manifests and the end-to-end runner behind the
// `epps` command line tool.
#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "epps/analysis.hpp"
#include "epps/synth.hpp"

namespace epps {

inline constexpr const char* kVersion = "1.0.0";

/// Invalid configuration; names the offending field.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

enum class Mode { simulate_noh, simulate_garch, from_file };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// Interval list syntax:
///   "60,150,450"     explicit values
///   "60..1800"       12 geometrically spaced values
///   "60..1800:20"    20 geometrically spaced values
///   "60..1800/60"    linear, step 60
/// Values are rounded to whole seconds, sorted and deduplicated.
std::vector<Timestamp> parse_dts(const std::string& text);

/// "a:b,c:d" -> sessions [a, b], [c, d] on the given underlying step.
std::vector<SessionSpec> parse_sessions(const std::string& text, Timestamp underlying_step);

struct ExperimentConfig {
  Mode mode = Mode::simulate_noh;
  NohParams noh{0.4, 720000, Innovation::gaussian, 10};
  GarchParams garch;
  std::array<double, 2> mu{15.0, 25.0};
  Seed seed = 1;

  std::string dts = "60..1800";
  Timestamp grid_step = 0;
  std::string overlap_dts;  // empty: every interval in `dts`
  CompensationOptions compensation;

  // from-file mode
  std::filesystem::path ticks;
  std::array<std::string, 2> symbols;  // empty: first two symbols in the file
  std::string sessions;                // "a:b,c:d"; empty: common span of the pair
  std::string daily_session;           // "open:close" repeated every 86400 s
  Timestamp file_underlying_step = 1;

  std::filesystem::path out_dir = "epps_out";
  unsigned threads = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Reads a config object, or the "config" member of a run manifest. Missing
/// fields keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Simulated pair (tick series plus its single session) for a simulate-* config.
struct SimulatedPair {
  UnderlyingPair underlying;
  TickSeries a;
  TickSeries b;
  SessionSpec session;
};
SimulatedPair simulate_pair(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = 0;  // 0 success, 2 every estimate failed
  EppsCurve curve;
  std::vector<OverlapStats> overlaps;
  std::vector<std::filesystem::path> files;
};

/// Runs the experiment and writes curve.csv, curve.json, overlap_<dt>.csv and
/// manifest.json into cfg.out_dir. Re-running from the manifest reproduces the
/// outputs byte for byte.
RunResult run(const ExperimentConfig& cfg);

/// Writes a simulated pair as a multi-day tick file: the path is cut into
/// `days` sessions of `session_length` seconds, each placed at
/// day * 86400 + open. Returns the session list in parse_sessions syntax.
std::string write_simulated_ticks(const ExperimentConfig& cfg, int days, Timestamp session_length,
                                  Timestamp open, const std::filesystem::path& out);

}  // namespace epps
