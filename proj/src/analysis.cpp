#include "epps/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "epps/stats.hpp"

namespace epps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Enough digits to parse back to the same double.
std::string format_value(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_value(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json json_vector(const Eigen::VectorXd& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_value(v[i]));
  return arr;
}

// floor(a / b) for b > 0.
Timestamp floor_div(Timestamp a, Timestamp b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

const Eigen::VectorXd& field(const EppsCurve& curve, CurveField f) {
  switch (f) {
    case CurveField::plain: return curve.plain;
    case CurveField::compensated: return curve.compensated;
    case CurveField::filtered: return curve.filtered;
  }
  throw std::invalid_argument("unknown curve field");
}

std::vector<ReturnSample> pair_samples(const TickSeries& a, const TickSeries& b,
                                       std::span<const SessionSpec> sessions, Timestamp dt,
                                       Timestamp grid_step) {
  std::vector<ReturnSample> all;
  for (const auto& session : sessions) {
    const ReturnGrid grid = make_grid(session, dt, grid_step);
    auto part = build_samples(clip(a, session), clip(b, session), grid);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

EppsCurve epps_sweep(const TickSeries& a, const TickSeries& b, std::span<const SessionSpec> sessions,
                     std::span<const Timestamp> dts, const SweepOptions& opts) {
  if (dts.empty()) throw std::invalid_argument("sweep: no return intervals");
  if (sessions.empty()) throw std::invalid_argument("sweep: no sessions");
  for (const auto& s : sessions) s.validate();
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (i > 0 && dts[i] <= dts[i - 1]) throw std::invalid_argument("sweep: intervals must be strictly increasing");
    for (const auto& s : sessions)
      if (dts[i] < s.underlying_step)
        throw std::invalid_argument("sweep: interval " + std::to_string(dts[i]) + " below the underlying step");
  }

  std::vector<TickSeries> clipped_a, clipped_b;
  for (const auto& s : sessions) {
    clipped_a.push_back(clip(a, s));
    clipped_b.push_back(clip(b, s));
  }

  const std::size_t m = dts.size();
  EppsCurve curve;
  curve.label = a.symbol() + "-" + b.symbol();
  curve.dts.assign(dts.begin(), dts.end());
  curve.plain = curve.compensated = curve.filtered = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), kNaN);
  curve.n_total.assign(m, 0);
  curve.n_used.assign(m, 0);
  std::vector<std::string> errors(m);

  auto evaluate = [&](std::size_t i) {
    const Timestamp dt = dts[i];
    std::vector<ReturnSample> samples;
    try {
      for (std::size_t k = 0; k < sessions.size(); ++k) {
        auto part = build_samples(clipped_a[k], clipped_b[k], make_grid(sessions[k], dt, opts.grid_step));
        samples.insert(samples.end(), part.begin(), part.end());
      }
    } catch (const std::exception& e) {
      errors[i] = "dt=" + std::to_string(dt) + ": " + e.what();
      return;
    }
    const PairEstimate e = estimate_pair(samples, dt, opts.compensation);
    const auto idx = static_cast<Eigen::Index>(i);
    curve.plain[idx] = e.plain;
    curve.compensated[idx] = e.compensated;
    curve.filtered[idx] = e.compensated_filtered;
    curve.n_total[i] = e.n_total;
    curve.n_used[i] = e.n_used;
    if (std::isnan(e.plain) || std::isnan(e.compensated) || std::isnan(e.compensated_filtered))
      errors[i] = "dt=" + std::to_string(dt) + ": estimator failed";
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, m));
  if (threads <= 1) {
    for (std::size_t i = 0; i < m; ++i) evaluate(i);
  } else {
    // Each interval writes only its own slot, so the result does not depend on scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < m; i = next++) evaluate(i);
      });
  }

  for (auto& e : errors)
    if (!e.empty()) curve.errors.push_back(std::move(e));
  return curve;
}

double OverlapStats::bin_lower(std::size_t i) {
  if (i == 0) return -std::numeric_limits<double>::infinity();
  return kLower + kWidth * static_cast<double>(i - 1);
}

OverlapStats overlap_stats(SampleSpan samples, Timestamp dt) {
  if (dt <= 0) throw std::invalid_argument("overlap stats: dt must be positive");
  OverlapStats out;
  out.dt = dt;
  out.n = samples.size();
  if (samples.empty()) {
    out.mean = out.variance = kNaN;
    return out;
  }
  // Bin index floor((x + 0.5) / 0.05) with x = overlap / dt, in integers.
  double sum = 0.0;
  for (const auto& s : samples) {
    const Timestamp bin = floor_div(20 * s.dt_overlap + 10 * dt, dt);
    std::size_t slot;
    if (bin < 0) slot = 0;
    else if (bin >= static_cast<Timestamp>(OverlapStats::kRegularBins)) slot = OverlapStats::kRegularBins + 1;
    else slot = static_cast<std::size_t>(bin) + 1;
    ++out.counts[slot];
    sum += static_cast<double>(s.dt_overlap) / static_cast<double>(dt);
  }
  out.mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (const auto& s : samples) {
    const double x = static_cast<double>(s.dt_overlap) / static_cast<double>(dt) - out.mean;
    sq += x * x;
  }
  out.variance = sq / static_cast<double>(samples.size());
  return out;
}

Eigen::VectorXd daily_close_returns(const TickSeries& series, std::span<const SessionSpec> sessions) {
  if (sessions.size() < 2) throw std::invalid_argument("daily returns: need at least two sessions");
  Eigen::VectorXd close(static_cast<Eigen::Index>(sessions.size()));
  for (std::size_t d = 0; d < sessions.size(); ++d)
    close[static_cast<Eigen::Index>(d)] = previous_tick_price(series, sessions[d].t_end);
  const Eigen::Index n = close.size() - 1;
  return close.tail(n).cwiseQuotient(close.head(n)).array() - 1.0;
}

RollingCorrVariance rolling_corr_variance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                          Eigen::Index window) {
  if (a.size() != b.size()) throw std::invalid_argument("rolling correlation: series differ in length");
  if (window < 2) throw std::invalid_argument("rolling correlation: window must be >= 2");
  if (a.size() < window) throw std::invalid_argument("rolling correlation: series shorter than window");

  RollingCorrVariance out;
  std::vector<double> coeffs;
  for (Eigen::Index start = 0; start + window <= a.size(); ++start) {
    const double rho = stats::pearson(a.segment(start, window), b.segment(start, window));
    if (std::isnan(rho)) {
      ++out.skipped;
      out.warnings.push_back("window at " + std::to_string(start) + " has zero variance; skipped");
      continue;
    }
    coeffs.push_back(rho);
  }
  out.windows = coeffs.size();
  if (coeffs.empty()) {
    out.variance = kNaN;
    return out;
  }
  out.variance = stats::variance(Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
  return out;
}

Eigen::VectorXd normalize_curve(const Eigen::VectorXd& values, std::span<const Timestamp> dts, Timestamp dt_ref) {
  auto it = std::find(dts.begin(), dts.end(), dt_ref);
  if (it == dts.end()) throw std::invalid_argument("normalize: reference interval not in curve");
  const double ref = values[static_cast<Eigen::Index>(it - dts.begin())];
  if (!std::isfinite(ref) || ref == 0.0) throw std::domain_error("normalize: unusable value at reference interval");
  Eigen::VectorXd out = values / ref;
  out[static_cast<Eigen::Index>(it - dts.begin())] = 1.0;
  return out;
}

EnsembleSummary ensemble_summary(std::span<const EppsCurve> curves, CurveField f, Timestamp dt_ref) {
  EnsembleSummary out;
  out.dt_ref = dt_ref;
  std::vector<Eigen::VectorXd> normalized;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const std::string name = c.label.empty() ? "curve " + std::to_string(i) : c.label;
    if (!out.dts.empty() && c.dts != out.dts) {
      out.warnings.push_back(name + ": interval list differs from the ensemble; excluded");
      continue;
    }
    try {
      normalized.push_back(normalize_curve(field(c, f), c.dts, dt_ref));
    } catch (const std::exception& e) {
      out.warnings.push_back(name + ": " + e.what() + "; excluded");
      continue;
    }
    if (out.dts.empty()) out.dts = c.dts;
    out.members.push_back(name);
  }

  const auto m = static_cast<Eigen::Index>(out.dts.size());
  out.mean = Eigen::VectorXd::Constant(m, kNaN);
  out.two_sigma = Eigen::VectorXd::Constant(m, kNaN);
  for (Eigen::Index k = 0; k < m; ++k) {
    std::vector<double> vals;
    for (const auto& v : normalized)
      if (std::isfinite(v[k])) vals.push_back(v[k]);
    if (vals.empty()) continue;
    const Eigen::Map<const Eigen::VectorXd> x(vals.data(), static_cast<Eigen::Index>(vals.size()));
    out.mean[k] = stats::mean(x);
    out.two_sigma[k] = 2.0 * stats::stddev(x);
  }
  return out;
}

void write_curve_csv(std::ostream& out, const EppsCurve& curve) {
  out << "dt,plain,compensated,filtered,n_used\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << curve.dts[i] << ',' << format_value(curve.plain[k]) << ',' << format_value(curve.compensated[k]) << ','
        << format_value(curve.filtered[k]) << ',' << curve.n_used[i] << '\n';
  }
}

void write_overlap_csv(std::ostream& out, const OverlapStats& stats) {
  out << "bin_lower,bin_upper,count\n";
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    const double lo = OverlapStats::bin_lower(i);
    const double hi = i + 1 < stats.counts.size() ? OverlapStats::bin_lower(i + 1)
                                                  : std::numeric_limits<double>::infinity();
    out << (std::isinf(lo) ? "-inf" : format_value(lo)) << ',' << (std::isinf(hi) ? "inf" : format_value(hi))
        << ',' << stats.counts[i] << '\n';
  }
}

void write_summary_csv(std::ostream& out, const EnsembleSummary& summary) {
  out << "dt,mean,two_sigma\n";
  for (std::size_t i = 0; i < summary.dts.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << summary.dts[i] << ',' << format_value(summary.mean[k]) << ',' << format_value(summary.two_sigma[k]) << '\n';
  }
}

nlohmann::json to_json(const EppsCurve& curve) {
  return {{"label", curve.label},       {"dt", curve.dts},
          {"plain", json_vector(curve.plain)}, {"compensated", json_vector(curve.compensated)},
          {"filtered", json_vector(curve.filtered)}, {"n_total", curve.n_total},
          {"n_used", curve.n_used},     {"errors", curve.errors}};
}

nlohmann::json to_json(const OverlapStats& stats) {
  return {{"dt", stats.dt},
          {"bin_width", OverlapStats::kWidth},
          {"range", {OverlapStats::kLower, OverlapStats::kUpper}},
          {"counts", stats.counts},
          {"mean", json_value(stats.mean)},
          {"variance", json_value(stats.variance)},
          {"n", stats.n}};
}

nlohmann::json to_json(const EnsembleSummary& summary) {
  return {{"dt", summary.dts},          {"mean", json_vector(summary.mean)},
          {"two_sigma", json_vector(summary.two_sigma)}, {"dt_ref", summary.dt_ref},
          {"members", summary.members}, {"warnings", summary.warnings}};
}

}  // namespace epps
