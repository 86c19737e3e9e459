// Previous-tick returns and pairwise correlation estimators for asynchronous
// tick series.
//
// Trades of two instruments rarely coincide, so the previous-tick returns of
// the pair over [t, t + dt] only share the stretch
//
//   overlap(t) = min(gamma_1(t + dt), gamma_2(t + dt)) - max(gamma_1(t), gamma_2(t)),
//
// where gamma_i(t) is the time of the last trade of instrument i at or before t.
// The Pearson coefficient of such returns is attenuated by roughly the mean
// fractional overlap. The compensated estimator reweights each product of
// standardized returns by dt / overlap(t) to undo that attenuation.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "epps/synth.hpp"
#include "epps/tickstore.hpp"

namespace epps {

/// Return windows [t0 + j*step, t0 + j*step + dt] for j < count.
struct ReturnGrid {
  Timestamp t0 = 0;
  Timestamp dt = 1;
  Timestamp step = 1;
  Eigen::Index count = 0;

  Timestamp time(Eigen::Index j) const { return t0 + static_cast<Timestamp>(j) * step; }
  Timestamp end() const { return count == 0 ? t0 : time(count - 1) + dt; }
};

/// Largest grid over `session` for return interval `dt`. `step == 0` means
/// non-overlapping windows (step = dt). Throws if not even one window fits.
ReturnGrid make_grid(const SessionSpec& session, Timestamp dt, Timestamp step = 0);

struct ReturnSample {
  Timestamp t = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  Timestamp gamma1_lo = 0, gamma1_hi = 0;
  Timestamp gamma2_lo = 0, gamma2_hi = 0;
  Timestamp dt_overlap = 0;  // may be <= 0

  bool traded1() const { return gamma1_lo != gamma1_hi; }
  bool traded2() const { return gamma2_lo != gamma2_hi; }
};

using SampleSpan = std::span<const ReturnSample>;

enum class FilterNormalization {
  subset,  // means and deviations from the filtered samples
  full,    // means and deviations from every sample
};

struct CompensationOptions {
  /// Upper bound on dt / overlap. Off by default.
  std::optional<double> weight_cap;
  FilterNormalization filter_normalization = FilterNormalization::subset;
};

struct PairEstimate {
  double plain = 0.0;
  double compensated = 0.0;
  double compensated_filtered = 0.0;
  std::size_t n_total = 0;
  std::size_t n_compensated = 0;  // samples with positive overlap
  std::size_t n_used = 0;         // samples surviving the stale-price filter
};

/// Time of the last trade at or before `t`. Throws std::domain_error
/// ("undefined previous tick") when `t` precedes the first trade.
Timestamp gamma(const TickSeries& series, Timestamp t);

/// Price of the last trade at or before `t`.
double previous_tick_price(const TickSeries& series, Timestamp t);

/// (P(gamma(t + dt)) - P(gamma(t))) / P(gamma(t)).
double previous_tick_return(const TickSeries& series, Timestamp t, Timestamp dt);

/// One sample per grid point, in grid order. Overlaps are reported unclamped.
std::vector<ReturnSample> build_samples(const TickSeries& a, const TickSeries& b, const ReturnGrid& grid);

/// Pearson coefficient of (r1, r2). Throws std::domain_error on fewer than two
/// samples or a constant return series ("degenerate series").
double plain_corr(SampleSpan samples);

/// Overlap-weighted coefficient (1/T) * sum g1 * g2 * dt / overlap, with g the
/// returns standardized over all T samples. Windows with overlap <= 0 (at
/// least one instrument did not trade) contribute zero. Not clamped to [-1, 1].
/// Throws std::domain_error ("no overlapping samples") if no window overlaps.
double compensated_corr(SampleSpan samples, Timestamp dt, const CompensationOptions& opts = {});

/// compensated_corr restricted to windows in which both instruments traded;
/// with FilterNormalization::subset the returns are standardized and averaged
/// over those windows only. Throws std::domain_error ("filter exhausted
/// samples") when fewer than two windows survive.
double filtered_compensated_corr(SampleSpan samples, Timestamp dt, const CompensationOptions& opts = {});

/// All three estimators; an estimator that fails yields NaN.
PairEstimate estimate_pair(SampleSpan samples, Timestamp dt, const CompensationOptions& opts = {});

/// Cumulative covariance of tick-to-tick returns over overlapping intervals,
/// normalized by the realized volatilities of both series. Only ticks inside
/// [t_start, t_end] take part.
double hayashi_yoshida_corr(const TickSeries& a, const TickSeries& b, const SessionSpec& session);

struct AppendixDeviation {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  Eigen::Index samples = 0;
};

/// Compares, per grid point, the standardized previous-tick return of `ticks`
/// with its expansion into standardized underlying returns of `u` using the
/// mean count dt / step in place of the realized one. Exact only when the
/// window count equals dt / step and the variances add up in-sample.
AppendixDeviation verify_appendix_relation(const UnderlyingSeries& u, const TickSeries& ticks,
                                           const ReturnGrid& grid);

}  // namespace epps
