#include "epps/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "epps/stats.hpp"

namespace epps {

ReturnGrid make_grid(const SessionSpec& session, Timestamp dt, Timestamp step) {
  session.validate();
  if (dt <= 0) throw std::invalid_argument("grid: return interval must be positive");
  if (step < 0) throw std::invalid_argument("grid: step must be positive");
  if (step == 0) step = dt;
  const Timestamp room = session.t_end - session.t_start - dt;
  if (room < 0) throw std::invalid_argument("grid: return interval longer than the session");
  return {session.t_start, dt, step, static_cast<Eigen::Index>(room / step + 1)};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t gamma_index(const TickSeries& series, Timestamp t) {
  const auto& times = series.times();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin())
    throw std::domain_error("undefined previous tick for '" + series.symbol() + "' at t=" + std::to_string(t));
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

// Previous-tick lookups for nondecreasing query times.
class Cursor {
public:
  explicit Cursor(const TickSeries& s) : series_(s) {}

  std::size_t at(Timestamp t) {
    const auto& times = series_.times();
    if (!started_) {
      index_ = gamma_index(series_, t);
      started_ = true;
    }
    while (index_ + 1 < times.size() && times[index_ + 1] <= t) ++index_;
    return index_;
  }

private:
  const TickSeries& series_;
  std::size_t index_ = 0;
  bool started_ = false;
};

void require_two(std::size_t n) {
  if (n < 2) throw std::domain_error("degenerate series: fewer than two samples");
}

// Sum of g1 * g2 * dt / overlap over `sum_mask`, with g standardized over
// `norm_mask`, divided by the size of `norm_mask` or of `sum_mask`.
enum class Divisor { normalization_set, summed_set };

double weighted_mean_product(SampleSpan samples, const std::vector<bool>& sum_mask,
                             const std::vector<bool>& norm_mask, Timestamp dt,
                             const CompensationOptions& opts, Divisor divisor) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::ArrayXd r1(n), r2(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r1[j] = samples[static_cast<std::size_t>(j)].r1;
    r2[j] = samples[static_cast<std::size_t>(j)].r2;
  }

  double m1 = 0.0, m2 = 0.0;
  Eigen::Index n_norm = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!norm_mask[static_cast<std::size_t>(j)]) continue;
    m1 += r1[j];
    m2 += r2[j];
    ++n_norm;
  }
  m1 /= static_cast<double>(n_norm);
  m2 /= static_cast<double>(n_norm);
  double v1 = 0.0, v2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!norm_mask[static_cast<std::size_t>(j)]) continue;
    v1 += (r1[j] - m1) * (r1[j] - m1);
    v2 += (r2[j] - m2) * (r2[j] - m2);
  }
  v1 /= static_cast<double>(n_norm);
  v2 /= static_cast<double>(n_norm);
  if (v1 == 0.0 || v2 == 0.0) throw std::domain_error("degenerate series: zero return variance");
  const double s1 = std::sqrt(v1), s2 = std::sqrt(v2);

  double acc = 0.0;
  Eigen::Index n_sum = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!sum_mask[static_cast<std::size_t>(j)]) continue;
    const auto& s = samples[static_cast<std::size_t>(j)];
    double w = static_cast<double>(dt) / static_cast<double>(s.dt_overlap);
    if (opts.weight_cap) w = std::min(w, *opts.weight_cap);
    acc += ((r1[j] - m1) / s1) * ((r2[j] - m2) / s2) * w;
    ++n_sum;
  }
  return acc / static_cast<double>(divisor == Divisor::summed_set ? n_sum : n_norm);
}

}  // namespace

Timestamp gamma(const TickSeries& series, Timestamp t) {
  return series.times()[gamma_index(series, t)];
}

double previous_tick_price(const TickSeries& series, Timestamp t) {
  return series.prices()[static_cast<Eigen::Index>(gamma_index(series, t))];
}

double previous_tick_return(const TickSeries& series, Timestamp t, Timestamp dt) {
  const double p0 = previous_tick_price(series, t);
  return (previous_tick_price(series, t + dt) - p0) / p0;
}

std::vector<ReturnSample> build_samples(const TickSeries& a, const TickSeries& b, const ReturnGrid& grid) {
  if (grid.dt <= 0 || grid.step <= 0) throw std::invalid_argument("grid: dt and step must be positive");
  std::vector<ReturnSample> out;
  out.reserve(static_cast<std::size_t>(grid.count));

  Cursor a_lo(a), a_hi(a), b_lo(b), b_hi(b);
  const auto& pa = a.prices();
  const auto& pb = b.prices();
  for (Eigen::Index j = 0; j < grid.count; ++j) {
    const Timestamp t = grid.time(j);
    const auto ia0 = a_lo.at(t), ia1 = a_hi.at(t + grid.dt);
    const auto ib0 = b_lo.at(t), ib1 = b_hi.at(t + grid.dt);

    ReturnSample s;
    s.t = t;
    s.r1 = (pa[static_cast<Eigen::Index>(ia1)] - pa[static_cast<Eigen::Index>(ia0)]) / pa[static_cast<Eigen::Index>(ia0)];
    s.r2 = (pb[static_cast<Eigen::Index>(ib1)] - pb[static_cast<Eigen::Index>(ib0)]) / pb[static_cast<Eigen::Index>(ib0)];
    s.gamma1_lo = a.times()[ia0];
    s.gamma1_hi = a.times()[ia1];
    s.gamma2_lo = b.times()[ib0];
    s.gamma2_hi = b.times()[ib1];
    s.dt_overlap = std::min(s.gamma1_hi, s.gamma2_hi) - std::max(s.gamma1_lo, s.gamma2_lo);
    out.push_back(s);
  }
  return out;
}

double plain_corr(SampleSpan samples) {
  require_two(samples.size());
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::VectorXd r1(n), r2(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r1[j] = samples[static_cast<std::size_t>(j)].r1;
    r2[j] = samples[static_cast<std::size_t>(j)].r2;
  }
  const double rho = stats::pearson(r1, r2);
  if (std::isnan(rho)) throw std::domain_error("degenerate series: zero return variance");
  return std::clamp(rho, -1.0, 1.0);
}

double compensated_corr(SampleSpan samples, Timestamp dt, const CompensationOptions& opts) {
  require_two(samples.size());
  std::vector<bool> overlapping(samples.size());
  std::size_t kept = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) kept += (overlapping[j] = samples[j].dt_overlap > 0);
  if (kept == 0) throw std::domain_error("no overlapping samples");
  // A window without overlap shares no underlying return; it adds a zero term
  // but still counts towards the normalization and the sample count.
  return weighted_mean_product(samples, overlapping, std::vector<bool>(samples.size(), true), dt, opts,
                               Divisor::normalization_set);
}

double filtered_compensated_corr(SampleSpan samples, Timestamp dt, const CompensationOptions& opts) {
  std::vector<bool> mask(samples.size());
  std::size_t kept = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& s = samples[j];
    kept += (mask[j] = s.traded1() && s.traded2() && s.dt_overlap > 0);
  }
  if (kept < 2) throw std::domain_error("filter exhausted samples");
  if (opts.filter_normalization == FilterNormalization::full) {
    require_two(samples.size());
    return weighted_mean_product(samples, mask, std::vector<bool>(samples.size(), true), dt, opts,
                                 Divisor::summed_set);
  }
  return weighted_mean_product(samples, mask, mask, dt, opts, Divisor::summed_set);
}

PairEstimate estimate_pair(SampleSpan samples, Timestamp dt, const CompensationOptions& opts) {
  PairEstimate e;
  e.n_total = samples.size();
  for (const auto& s : samples) {
    e.n_compensated += s.dt_overlap > 0;
    e.n_used += s.traded1() && s.traded2() && s.dt_overlap > 0;
  }
  auto attempt = [](auto&& f) {
    try {
      return f();
    } catch (const std::domain_error&) {
      return kNaN;
    }
  };
  e.plain = attempt([&] { return plain_corr(samples); });
  e.compensated = attempt([&] { return compensated_corr(samples, dt, opts); });
  e.compensated_filtered = attempt([&] { return filtered_compensated_corr(samples, dt, opts); });
  return e;
}

double hayashi_yoshida_corr(const TickSeries& a, const TickSeries& b, const SessionSpec& session) {
  struct Leg {
    std::vector<Timestamp> start, stop;
    std::vector<double> ret;
  };
  auto legs = [&](const TickSeries& s) {
    const auto& t = s.times();
    auto lo = std::lower_bound(t.begin(), t.end(), session.t_start);
    auto hi = std::upper_bound(t.begin(), t.end(), session.t_end);
    if (hi - lo < 2) throw std::domain_error("hayashi-yoshida: fewer than two ticks in session for '" + s.symbol() + "'");
    Leg leg;
    for (auto it = lo + 1; it != hi; ++it) {
      const auto k = static_cast<Eigen::Index>(it - t.begin());
      leg.start.push_back(*(it - 1));
      leg.stop.push_back(*it);
      leg.ret.push_back((s.prices()[k] - s.prices()[k - 1]) / s.prices()[k - 1]);
    }
    return leg;
  };
  const Leg x = legs(a);
  const Leg y = legs(b);

  // Intervals (start, stop] overlap iff x.start < y.stop and y.start < x.stop.
  // Both lists are sorted and tile their span, so a two-pointer sweep visits
  // each overlapping pair once.
  double cross = 0.0;
  std::size_t j0 = 0;
  for (std::size_t i = 0; i < x.ret.size(); ++i) {
    while (j0 < y.ret.size() && y.stop[j0] <= x.start[i]) ++j0;
    for (std::size_t j = j0; j < y.ret.size() && y.start[j] < x.stop[i]; ++j) cross += x.ret[i] * y.ret[j];
  }

  const Eigen::Map<const Eigen::VectorXd> rx(x.ret.data(), static_cast<Eigen::Index>(x.ret.size()));
  const Eigen::Map<const Eigen::VectorXd> ry(y.ret.data(), static_cast<Eigen::Index>(y.ret.size()));
  const double denom = std::sqrt(rx.squaredNorm() * ry.squaredNorm());
  if (denom == 0.0) throw std::domain_error("degenerate series: constant prices");
  return cross / denom;
}

AppendixDeviation verify_appendix_relation(const UnderlyingSeries& u, const TickSeries& ticks,
                                           const ReturnGrid& grid) {
  const Timestamp step = u.step();
  const auto& S = u.prices();
  const Eigen::Index n = grid.count;
  if (n < 1) throw std::invalid_argument("appendix relation: empty grid");

  // Previous-tick windows in underlying-grid indices.
  Eigen::VectorXi lo(n), hi(n);
  Cursor c_lo(ticks), c_hi(ticks);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Timestamp t = grid.time(j);
    const Timestamp g0 = ticks.times()[c_lo.at(t)];
    const Timestamp g1 = ticks.times()[c_hi.at(t + grid.dt)];
    if (g0 % step != 0 || g1 % step != 0 || g1 / step > u.n_steps())
      throw std::invalid_argument("appendix relation: ticks are not on the underlying grid");
    lo[j] = static_cast<int>(g0 / step);
    hi[j] = static_cast<int>(g1 / step);
  }

  // Macroscopic returns, and underlying increments taken relative to the
  // price at the start of their window so that each window sums exactly.
  Eigen::VectorXd r(n);
  std::vector<double> pooled;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double base = S[lo[j]];
    r[j] = (S[hi[j]] - base) / base;
    for (int k = lo[j]; k < hi[j]; ++k) pooled.push_back((S[k + 1] - S[k]) / base);
  }
  const Eigen::Map<const Eigen::VectorXd> fine(pooled.data(), static_cast<Eigen::Index>(pooled.size()));
  const double fine_mean = pooled.empty() ? 0.0 : stats::mean(fine);
  const double fine_sd = pooled.empty() ? 0.0 : stats::stddev(fine);
  const double coarse_sd = stats::stddev(r);
  const Eigen::VectorXd g = stats::standardize(r);

  const double mean_count = static_cast<double>(grid.dt) / static_cast<double>(step);
  const double prefactor = std::sqrt(1.0 / mean_count);

  AppendixDeviation out;
  out.samples = n;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double base = S[lo[j]];
    double sum = 0.0;
    if (fine_sd > 0.0)
      for (int k = lo[j]; k < hi[j]; ++k) sum += ((S[k + 1] - S[k]) / base - fine_mean) / fine_sd;
    const double count = static_cast<double>(hi[j] - lo[j]);
    const double drift = coarse_sd > 0.0 ? fine_mean * (mean_count - count) / coarse_sd : 0.0;
    const double dev = std::abs(g[j] - (prefactor * sum - drift));
    out.max_abs = std::max(out.max_abs, dev);
    total += dev;
  }
  out.mean_abs = total / static_cast<double>(n);
  return out;
}

}  // namespace epps
