// Monte Carlo calibration of the tolerance used when checking the expansion of
// previous-tick returns into underlying returns on asynchronous ticks.
//
// The expansion replaces the realized number of underlying steps per window by
// its mean dt / step, so it only holds statistically. This tool measures the
// mean absolute per-sample deviation over many seeds for windows at least 20
// mean waiting times long and prints the distribution; the frozen threshold in
// tests/acceptance.cpp is taken from its output.
//
//   calibrate_appendix [seeds=50] [n_steps=720000]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "epps/estimator.hpp"

int main(int argc, char** argv) {
  using namespace epps;
  const int seeds = argc > 1 ? std::atoi(argv[1]) : 50;
  const Eigen::Index n_steps = argc > 2 ? std::atol(argv[2]) : 720000;
  const Timestamp step = 10;
  const NohParams params{0.4, n_steps, Innovation::gaussian, step};

  std::vector<double> deviations;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<Seed>(s);
    const UnderlyingPair u = gen_noh_pair(params, seed);
    for (const double mu : {15.0, 25.0}) {
      const TickSeries ticks = sample_ticks(u.first, {mu, derive_seed(seed, 1)});
      for (const Timestamp dt : {static_cast<Timestamp>(20 * mu), Timestamp{900}, Timestamp{1800}}) {
        const ReturnGrid grid = make_grid(u.first.session(), dt);
        deviations.push_back(verify_appendix_relation(u.first, ticks, grid).mean_abs);
      }
    }
  }
  std::sort(deviations.begin(), deviations.end());
  auto quantile = [&](double q) {
    return deviations[static_cast<std::size_t>(q * static_cast<double>(deviations.size() - 1))];
  };
  std::printf("cases        %zu\n", deviations.size());
  std::printf("median       %.5f\n", quantile(0.5));
  std::printf("q99          %.5f\n", quantile(0.99));
  std::printf("max          %.5f\n", deviations.back());
  std::printf("suggested    %.3f  (2 x max, rounded up to 0.005)\n",
              std::ceil(2.0 * deviations.back() / 0.005) * 0.005);
  return 0;
}
