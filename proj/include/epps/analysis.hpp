// Correlation-versus-interval sweeps, overlap distributions and ensemble
// averaging of normalized curves.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "epps/estimator.hpp"

namespace epps {

/// Estimates per return interval. Missing points are NaN.
struct EppsCurve {
  std::string label;
  std::vector<Timestamp> dts;
  Eigen::VectorXd plain;
  Eigen::VectorXd compensated;
  Eigen::VectorXd filtered;
  std::vector<std::size_t> n_total;
  std::vector<std::size_t> n_used;  // samples behind the filtered estimate
  std::vector<std::string> errors;  // one line per missing point

  std::size_t size() const { return dts.size(); }
};

enum class CurveField { plain, compensated, filtered };

const Eigen::VectorXd& field(const EppsCurve& curve, CurveField f);

struct SweepOptions {
  Timestamp grid_step = 0;  // 0: non-overlapping windows
  CompensationOptions compensation;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Samples of the pair over every session for one return interval, in session
/// order. Returns never span two sessions.
std::vector<ReturnSample> pair_samples(const TickSeries& a, const TickSeries& b,
                                       std::span<const SessionSpec> sessions, Timestamp dt,
                                       Timestamp grid_step = 0);

/// Runs all three estimators at every interval in `dts` (strictly increasing,
/// each at least the underlying step). Estimator failures become NaN points.
EppsCurve epps_sweep(const TickSeries& a, const TickSeries& b, std::span<const SessionSpec> sessions,
                     std::span<const Timestamp> dts, const SweepOptions& opts = {});

inline EppsCurve epps_sweep(const TickSeries& a, const TickSeries& b, const SessionSpec& session,
                            std::span<const Timestamp> dts, const SweepOptions& opts = {}) {
  return epps_sweep(a, b, std::span<const SessionSpec>(&session, 1), dts, opts);
}

/// Histogram of fractional overlaps overlap/dt. Regular bins of width 0.05 cover
/// [-0.5, 2.0); counts.front() collects everything below, counts.back()
/// everything at or above.
struct OverlapStats {
  static constexpr double kLower = -0.5;
  static constexpr double kUpper = 2.0;
  static constexpr double kWidth = 0.05;
  static constexpr std::size_t kRegularBins = 50;

  Timestamp dt = 0;
  std::vector<std::size_t> counts = std::vector<std::size_t>(kRegularBins + 2, 0);
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n = 0;

  /// Lower edge of bin `i`; -inf for the underflow bin.
  static double bin_lower(std::size_t i);
};

OverlapStats overlap_stats(SampleSpan samples, Timestamp dt);

/// Close-to-close returns from the previous-tick price at each session end.
Eigen::VectorXd daily_close_returns(const TickSeries& series, std::span<const SessionSpec> sessions);

struct RollingCorrVariance {
  double variance = 0.0;
  std::size_t windows = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Variance of Pearson coefficients over windows of `window` observations
/// shifted by one. Constant windows are skipped.
RollingCorrVariance rolling_corr_variance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                          Eigen::Index window);

/// `values` divided by its entry at `dt_ref`.
Eigen::VectorXd normalize_curve(const Eigen::VectorXd& values, std::span<const Timestamp> dts, Timestamp dt_ref);

struct EnsembleSummary {
  std::vector<Timestamp> dts;
  Eigen::VectorXd mean;
  Eigen::VectorXd two_sigma;
  Timestamp dt_ref = 0;
  std::vector<std::string> members;
  std::vector<std::string> warnings;
};

/// Normalizes each curve at `dt_ref`, then takes the equally weighted mean and
/// twice the (population) standard deviation per interval. Curves without a
/// usable value at `dt_ref`, or on a different interval list, are left out.
EnsembleSummary ensemble_summary(std::span<const EppsCurve> curves, CurveField f, Timestamp dt_ref);

// Serialization. CSV columns are fixed; missing values are written as NA.
void write_curve_csv(std::ostream& out, const EppsCurve& curve);
void write_overlap_csv(std::ostream& out, const OverlapStats& stats);
void write_summary_csv(std::ostream& out, const EnsembleSummary& summary);
nlohmann::json to_json(const EppsCurve& curve);
nlohmann::json to_json(const OverlapStats& stats);
nlohmann::json to_json(const EnsembleSummary& summary);

}  // namespace epps
