// Tick series data model and CSV ingestion.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace epps {

/// Integer seconds on a session-relative axis.
using Timestamp = std::int64_t;

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Trades of one instrument. Times strictly increase, prices are positive and
/// there are at least two ticks; the constructor enforces all of it.
class TickSeries {
public:
  TickSeries(std::string symbol, std::vector<Timestamp> times, Eigen::VectorXd prices);

  const std::string& symbol() const noexcept { return symbol_; }
  const std::vector<Timestamp>& times() const noexcept { return times_; }
  const Eigen::VectorXd& prices() const noexcept { return prices_; }
  std::size_t size() const noexcept { return times_.size(); }

  Timestamp front_time() const { return times_.front(); }
  Timestamp back_time() const { return times_.back(); }

  /// Same series with every price multiplied by `factor` (> 0).
  TickSeries scaled(double factor) const;

  friend bool operator==(const TickSeries& a, const TickSeries& b) {
    return a.symbol_ == b.symbol_ && a.times_ == b.times_ && a.prices_ == b.prices_;
  }

private:
  std::string symbol_;
  std::vector<Timestamp> times_;
  Eigen::VectorXd prices_;
};

/// Evaluation window [t_start, t_end] on an underlying grid of `underlying_step` seconds.
struct SessionSpec {
  Timestamp t_start = 0;
  Timestamp t_end = 0;
  Timestamp underlying_step = 1;

  /// Throws std::invalid_argument when the window is empty or not a whole
  /// number of underlying steps.
  void validate() const;
};

struct CsvFormat {
  char delimiter = ',';
  bool header = true;
};

struct LoadResult {
  std::vector<TickSeries> series;  // in order of first appearance
  std::vector<std::string> warnings;
};

/// Parses `symbol,time,price` rows. Within a symbol, rows are ordered by time
/// and the last row at a given timestamp wins. Symbols with fewer than two
/// distinct timestamps are dropped and reported in `warnings`.
LoadResult parse_ticks(std::istream& in, const CsvFormat& format = {});
LoadResult load_ticks(const std::filesystem::path& path, const CsvFormat& format = {});

void write_ticks(std::ostream& out, const std::vector<TickSeries>& series,
                 const CsvFormat& format = {});
void save_ticks(const std::filesystem::path& path, const std::vector<TickSeries>& series,
                const CsvFormat& format = {});

/// Ticks inside [t_start, t_end] plus the last tick at or before t_start, so
/// the previous-tick price is defined at the opening of the session.
TickSeries clip(const TickSeries& series, const SessionSpec& session);

}  // namespace epps
