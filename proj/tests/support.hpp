// Shared fixtures for the unit tests.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "epps/tickstore.hpp"
#include "oracle.hpp"

namespace support {

inline epps::TickSeries series(const std::string& symbol, std::vector<epps::Timestamp> t,
                               std::vector<double> p) {
  return epps::TickSeries(symbol, std::move(t),
                          Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
}

inline oracle::Ticks to_oracle(const epps::TickSeries& s) {
  oracle::Ticks o;
  o.t = s.times();
  o.p.assign(s.prices().data(), s.prices().data() + s.prices().size());
  return o;
}

/// Random series starting at 0 with `n` ticks, gaps in [1, max_gap].
inline epps::TickSeries random_series(std::mt19937_64& rng, const std::string& symbol, std::size_t n,
                                      epps::Timestamp max_gap) {
  std::uniform_int_distribution<epps::Timestamp> gap(1, max_gap);
  std::normal_distribution<double> ret(0.0, 0.01);
  std::vector<epps::Timestamp> t{0};
  std::vector<double> p{100.0};
  while (t.size() < n) {
    t.push_back(t.back() + gap(rng));
    p.push_back(p.back() * (1.0 + ret(rng)));
  }
  return series(symbol, std::move(t), std::move(p));
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() /
           ("epps_test_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace support
