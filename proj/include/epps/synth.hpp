// Correlated underlying price paths and asynchronous trade sampling.
//
// Two return series share a common factor,
//
//   r_i(k) = sqrt(c) * eta(k) + sqrt(1 - c) * eps_i(k),
//
// optionally modulated by a GARCH(1,1) volatility per series. Prices are built
// multiplicatively from the returns and then observed at trade times drawn from
// a renewal process with exponential waiting times.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "epps/tickstore.hpp"

namespace epps {

using Seed = std::uint64_t;

enum class Innovation { gaussian, heavy_tailed };

struct NohParams {
  double c = 0.4;
  Eigen::Index n_steps = 720000;
  Innovation innovation = Innovation::gaussian;
  Timestamp underlying_step = 1;  // seconds per grid step

  void validate() const;
};

struct GarchParams {
  double alpha0 = 2.4e-4;
  double alpha1 = 0.15;
  double beta1 = 0.84;
  std::optional<double> sigma0;  // defaults to the unconditional level

  double unconditional_variance() const { return alpha0 / (1.0 - alpha1 - beta1); }
  void validate() const;
};

struct SamplingParams {
  double mu = 15.0;  // mean waiting time in seconds
  Seed seed = 0;

  void validate() const;
};

/// Per-step standard deviation of the generated underlying returns.
inline constexpr double kUnderlyingReturnScale = 1e-3;
/// Starting price of every generated path.
inline constexpr double kStartPrice = 100.0;

/// Regularly spaced price path; price k sits at time k * step.
class UnderlyingSeries {
public:
  UnderlyingSeries(Timestamp step, Eigen::VectorXd returns, double start_price = kStartPrice);

  /// Path given by its prices; returns are recovered as relative changes.
  static UnderlyingSeries from_prices(Timestamp step, const Eigen::VectorXd& prices);

  Timestamp step() const noexcept { return step_; }
  const Eigen::VectorXd& returns() const noexcept { return returns_; }
  const Eigen::VectorXd& prices() const noexcept { return prices_; }
  Eigen::Index n_steps() const noexcept { return returns_.size(); }
  Timestamp span() const noexcept { return step_ * static_cast<Timestamp>(returns_.size()); }

  SessionSpec session() const { return {0, span(), step_}; }

private:
  UnderlyingSeries() = default;

  Timestamp step_ = 1;
  Eigen::VectorXd returns_;
  Eigen::VectorXd prices_;
};

using UnderlyingPair = std::pair<UnderlyingSeries, UnderlyingSeries>;

/// Independent child seed for component `index` of a run (splitmix64 mix).
Seed derive_seed(Seed seed, std::uint64_t index);

/// Unit-variance Student-t(3) draw.
template <typename Rng>
double heavy_tail_innovation(Rng& rng);

/// Unit-variance heavy-tailed draw from a generator seeded with `seed`.
double heavy_tail_innovation(Seed seed);

/// `n` unit-variance innovations of the requested kind from one stream.
Eigen::VectorXd draw_innovations(Innovation kind, Eigen::Index n, Seed seed, std::uint64_t stream);

/// Common-factor pair with per-step return standard deviation kUnderlyingReturnScale.
UnderlyingPair gen_noh_pair(const NohParams& p, Seed seed);

/// Raw GARCH(1,1) returns (n_steps x 2) before rescaling; their long-run
/// variance is GarchParams::unconditional_variance().
Eigen::MatrixX2d garch_returns(const NohParams& p, const GarchParams& g, Seed seed);

/// GARCH(1,1) pair. Returns are divided by the unconditional volatility and
/// scaled to kUnderlyingReturnScale before prices are built.
UnderlyingPair gen_garch_pair(const NohParams& p, const GarchParams& g, Seed seed);

/// Observes `u` at renewal-process trade times. The first tick is at the grid
/// origin; later ticks land on the grid point at or after the continuous-time
/// arrival and at least one step after the previous tick.
TickSeries sample_ticks(const UnderlyingSeries& u, const SamplingParams& s,
                        const std::string& symbol = "S");

// ---------------------------------------------------------------------------

template <typename Rng>
double heavy_tail_innovation(Rng& rng) {
  // t(3) has variance 3.
  static const double scale = 1.0 / std::sqrt(3.0);
  std::student_t_distribution<double> t3(3.0);
  return scale * t3(rng);
}

}  // namespace epps
