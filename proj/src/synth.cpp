#include "epps/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace epps {

namespace {

// Streams carved out of one seed. Each random quantity gets its own engine so
// that changing one parameter does not shift the draws of another.
enum Stream : std::uint64_t { kCommon = 0, kIdio1 = 1, kIdio2 = 2, kSampling = 16, kSingle = 32 };

std::mt19937_64 make_engine(Seed seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void NohParams::validate() const {
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("noh: c must lie in [0, 1]");
  if (n_steps < 2) throw std::invalid_argument("noh: n_steps must be >= 2");
  if (underlying_step < 1) throw std::invalid_argument("noh: underlying_step must be >= 1");
}

void GarchParams::validate() const {
  if (alpha0 < 0.0 || alpha1 < 0.0 || beta1 < 0.0)
    throw std::invalid_argument("garch: parameters must be nonnegative");
  if (alpha0 == 0.0) throw std::invalid_argument("garch: alpha0 must be positive");
  if (alpha1 + beta1 >= 1.0)
    throw std::domain_error("garch: alpha1 + beta1 >= 1, process is not covariance stationary");
  if (sigma0 && !(*sigma0 > 0.0)) throw std::invalid_argument("garch: sigma0 must be positive");
}

void SamplingParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("sampling: mu must be positive");
}

UnderlyingSeries::UnderlyingSeries(Timestamp step, Eigen::VectorXd returns, double start_price)
    : step_(step), returns_(std::move(returns)), prices_(returns_.size() + 1) {
  if (step_ < 1) throw std::invalid_argument("underlying series: step must be >= 1");
  if (!(start_price > 0.0)) throw std::invalid_argument("underlying series: start price must be positive");
  prices_[0] = start_price;
  for (Eigen::Index k = 0; k < returns_.size(); ++k) {
    if (!(returns_[k] > -1.0))
      throw std::domain_error("underlying series: return <= -1 would make the price nonpositive");
    prices_[k + 1] = prices_[k] * (1.0 + returns_[k]);
  }
}

UnderlyingSeries UnderlyingSeries::from_prices(Timestamp step, const Eigen::VectorXd& prices) {
  if (step < 1) throw std::invalid_argument("underlying series: step must be >= 1");
  if (prices.size() < 2 || !(prices.array() > 0.0).all())
    throw std::invalid_argument("underlying series: need >= 2 positive prices");
  UnderlyingSeries u;
  u.step_ = step;
  u.prices_ = prices;
  const Eigen::Index n = prices.size() - 1;
  u.returns_ = prices.tail(n).cwiseQuotient(prices.head(n)).array() - 1.0;
  return u;
}

Seed derive_seed(Seed seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double heavy_tail_innovation(Seed seed) {
  auto rng = make_engine(seed, kSingle);
  return heavy_tail_innovation(rng);
}

Eigen::VectorXd draw_innovations(Innovation kind, Eigen::Index n, Seed seed, std::uint64_t stream) {
  auto rng = make_engine(seed, stream);
  Eigen::VectorXd out(n);
  if (kind == Innovation::gaussian) {
    std::normal_distribution<double> normal;
    for (Eigen::Index k = 0; k < n; ++k) out[k] = normal(rng);
  } else {
    for (Eigen::Index k = 0; k < n; ++k) out[k] = heavy_tail_innovation(rng);
  }
  return out;
}

namespace {

// Unit-variance correlated shocks, one column per series.
Eigen::MatrixX2d factor_shocks(const NohParams& p, Seed seed) {
  const Eigen::VectorXd common = draw_innovations(p.innovation, p.n_steps, seed, kCommon);
  Eigen::MatrixX2d shocks(p.n_steps, 2);
  const double wc = std::sqrt(p.c);
  const double wi = std::sqrt(1.0 - p.c);
  shocks.col(0) = wc * common + wi * draw_innovations(p.innovation, p.n_steps, seed, kIdio1);
  shocks.col(1) = wc * common + wi * draw_innovations(p.innovation, p.n_steps, seed, kIdio2);
  return shocks;
}

}  // namespace

UnderlyingPair gen_noh_pair(const NohParams& p, Seed seed) {
  p.validate();
  const Eigen::MatrixX2d r = kUnderlyingReturnScale * factor_shocks(p, seed);
  return {UnderlyingSeries(p.underlying_step, r.col(0)), UnderlyingSeries(p.underlying_step, r.col(1))};
}

Eigen::MatrixX2d garch_returns(const NohParams& p, const GarchParams& g, Seed seed) {
  p.validate();
  g.validate();
  Eigen::MatrixX2d r = factor_shocks(p, seed);
  const double var0 = g.sigma0 ? (*g.sigma0) * (*g.sigma0) : g.unconditional_variance();
  for (Eigen::Index i = 0; i < 2; ++i) {
    double var = var0;
    for (Eigen::Index k = 0; k < p.n_steps; ++k) {
      if (k > 0) var = g.alpha0 + g.alpha1 * r(k - 1, i) * r(k - 1, i) + g.beta1 * var;
      r(k, i) *= std::sqrt(var);
    }
  }
  return r;
}

UnderlyingPair gen_garch_pair(const NohParams& p, const GarchParams& g, Seed seed) {
  const double scale = kUnderlyingReturnScale / std::sqrt(g.unconditional_variance());
  const Eigen::MatrixX2d r = scale * garch_returns(p, g, seed);
  return {UnderlyingSeries(p.underlying_step, r.col(0)), UnderlyingSeries(p.underlying_step, r.col(1))};
}

TickSeries sample_ticks(const UnderlyingSeries& u, const SamplingParams& s, const std::string& symbol) {
  s.validate();
  auto rng = make_engine(s.seed, kSampling);
  std::exponential_distribution<double> wait(1.0 / s.mu);

  const auto step = static_cast<double>(u.step());
  const Eigen::Index last = u.n_steps();
  std::vector<Timestamp> times{0};
  std::vector<double> prices{u.prices()[0]};

  double clock = 0.0;
  Eigen::Index previous = 0;
  while (true) {
    clock += wait(rng);
    const auto arrival = static_cast<Eigen::Index>(std::ceil(clock / step));
    const Eigen::Index k = std::max(arrival, previous + 1);
    if (k > last) break;
    times.push_back(static_cast<Timestamp>(k) * u.step());
    prices.push_back(u.prices()[k]);
    previous = k;
  }
  if (times.size() < 2) {
    // Nothing arrived within the span; the closing price is the only other observation.
    times.push_back(u.span());
    prices.push_back(u.prices()[last]);
  }
  return TickSeries(symbol, std::move(times),
                    Eigen::Map<const Eigen::VectorXd>(prices.data(), static_cast<Eigen::Index>(prices.size())));
}

}  // namespace epps
