// Brute-force reference implementations used only by the tests.
//
// Everything here works on plain std::vector and long double with linear scans,
// so it shares no code path with the library it checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using Time = std::int64_t;

struct Ticks {
  std::vector<Time> t;
  std::vector<double> p;
};

/// Index of the last tick at or before `at`, or -1.
inline long last_trade(const Ticks& s, Time at) {
  long idx = -1;
  for (std::size_t k = 0; k < s.t.size(); ++k)
    if (s.t[k] <= at) idx = static_cast<long>(k);
  return idx;
}

struct Sample {
  long double r1, r2;
  Time g1lo, g1hi, g2lo, g2hi;
  Time overlap;
};

inline Sample sample(const Ticks& a, const Ticks& b, Time t, Time dt) {
  const long a0 = last_trade(a, t), a1 = last_trade(a, t + dt);
  const long b0 = last_trade(b, t), b1 = last_trade(b, t + dt);
  Sample s{};
  s.r1 = (static_cast<long double>(a.p[a1]) - a.p[a0]) / a.p[a0];
  s.r2 = (static_cast<long double>(b.p[b1]) - b.p[b0]) / b.p[b0];
  s.g1lo = a.t[a0];
  s.g1hi = a.t[a1];
  s.g2lo = b.t[b0];
  s.g2hi = b.t[b1];
  const Time hi = s.g1hi < s.g2hi ? s.g1hi : s.g2hi;
  const Time lo = s.g1lo > s.g2lo ? s.g1lo : s.g2lo;
  s.overlap = hi - lo;
  return s;
}

struct Moments {
  long double m1 = 0, m2 = 0, s1 = 0, s2 = 0;
};

template <typename Pred>
Moments moments(const std::vector<Sample>& xs, Pred keep) {
  Moments m;
  long double n = 0;
  for (const auto& x : xs)
    if (keep(x)) {
      m.m1 += x.r1;
      m.m2 += x.r2;
      n += 1;
    }
  m.m1 /= n;
  m.m2 /= n;
  for (const auto& x : xs)
    if (keep(x)) {
      m.s1 += (x.r1 - m.m1) * (x.r1 - m.m1);
      m.s2 += (x.r2 - m.m2) * (x.r2 - m.m2);
    }
  m.s1 = std::sqrt(m.s1 / n);
  m.s2 = std::sqrt(m.s2 / n);
  return m;
}

inline bool traded_both(const Sample& x) { return x.g1lo != x.g1hi && x.g2lo != x.g2hi; }

inline long double pearson(const std::vector<Sample>& xs) {
  const Moments m = moments(xs, [](const Sample&) { return true; });
  long double acc = 0;
  for (const auto& x : xs) acc += (x.r1 - m.m1) * (x.r2 - m.m2);
  return acc / static_cast<long double>(xs.size()) / (m.s1 * m.s2);
}

/// (1/T) sum over positive-overlap terms of g1 g2 dt / overlap, g over all T.
inline long double compensated(const std::vector<Sample>& xs, Time dt, long double cap = INFINITY) {
  const Moments m = moments(xs, [](const Sample&) { return true; });
  long double acc = 0;
  for (const auto& x : xs) {
    if (x.overlap <= 0) continue;
    long double w = static_cast<long double>(dt) / x.overlap;
    if (w > cap) w = cap;
    acc += (x.r1 - m.m1) / m.s1 * (x.r2 - m.m2) / m.s2 * w;
  }
  return acc / static_cast<long double>(xs.size());
}

/// Same sum over windows in which both traded; `subset` selects whether the
/// standardization uses those windows or all of them.
inline long double filtered(const std::vector<Sample>& xs, Time dt, bool subset) {
  const Moments m = subset ? moments(xs, traded_both) : moments(xs, [](const Sample&) { return true; });
  long double acc = 0, n = 0;
  for (const auto& x : xs) {
    if (!traded_both(x)) continue;
    acc += (x.r1 - m.m1) / m.s1 * (x.r2 - m.m2) / m.s2 * static_cast<long double>(dt) / x.overlap;
    n += 1;
  }
  return acc / n;
}

/// Hayashi-Yoshida correlation by checking every pair of tick intervals.
inline long double hayashi_yoshida(const Ticks& a, const Ticks& b) {
  long double cross = 0, va = 0, vb = 0;
  for (std::size_t i = 1; i < a.t.size(); ++i) {
    const long double ra = (static_cast<long double>(a.p[i]) - a.p[i - 1]) / a.p[i - 1];
    va += ra * ra;
    for (std::size_t j = 1; j < b.t.size(); ++j) {
      const long double rb = (static_cast<long double>(b.p[j]) - b.p[j - 1]) / b.p[j - 1];
      const bool overlap = a.t[i - 1] < b.t[j] && b.t[j - 1] < a.t[i];
      if (overlap) cross += ra * rb;
    }
  }
  for (std::size_t j = 1; j < b.t.size(); ++j) {
    const long double rb = (static_cast<long double>(b.p[j]) - b.p[j - 1]) / b.p[j - 1];
    vb += rb * rb;
  }
  return cross / std::sqrt(va * vb);
}

}  // namespace oracle
