#include "epps/tickstore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

namespace epps {

TickSeries::TickSeries(std::string symbol, std::vector<Timestamp> times, Eigen::VectorXd prices)
    : symbol_(std::move(symbol)), times_(std::move(times)), prices_(std::move(prices)) {
  if (times_.size() != static_cast<std::size_t>(prices_.size()))
    throw std::invalid_argument("tick series '" + symbol_ + "': times and prices differ in length");
  if (times_.size() < 2)
    throw std::invalid_argument("tick series '" + symbol_ + "': needs at least two ticks");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (times_[k] <= times_[k - 1])
      throw std::invalid_argument("tick series '" + symbol_ + "': times not strictly increasing");
  if (!(prices_.array() > 0.0).all() || !prices_.allFinite())
    throw std::invalid_argument("tick series '" + symbol_ + "': prices must be positive");
}

TickSeries TickSeries::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return TickSeries(symbol_, times_, prices_ * factor);
}

void SessionSpec::validate() const {
  if (underlying_step < 1) throw std::invalid_argument("session: underlying_step must be >= 1");
  if (t_start >= t_end) throw std::invalid_argument("session: t_start must precede t_end");
  if ((t_end - t_start) % underlying_step != 0)
    throw std::invalid_argument("session: length is not a multiple of underlying_step");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end;
}

struct Row {
  Timestamp time;
  double price;
  std::size_t order;
};

}  // namespace

LoadResult parse_ticks(std::istream& in, const CsvFormat& format) {
  std::vector<std::string> symbols;
  std::map<std::string, std::vector<Row>, std::less<>> rows;

  std::string line;
  std::size_t lineno = 0;
  std::size_t order = 0;
  bool header_pending = format.header;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::string_view fields[3];
    std::size_t n = 0;
    std::size_t pos = 0;
    while (n < 3) {
      std::size_t next = view.find(format.delimiter, pos);
      fields[n++] = trim(view.substr(pos, next == std::string_view::npos ? next : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
      if (n == 3) throw ParseError(lineno, "too many fields in '" + std::string(view) + "'");
    }
    if (n != 3) throw ParseError(lineno, "expected symbol,time,price in '" + std::string(view) + "'");
    if (fields[0].empty()) throw ParseError(lineno, "empty symbol in '" + std::string(view) + "'");

    Row row{0, 0.0, order++};
    if (!parse_number(fields[1], row.time))
      throw ParseError(lineno, "bad timestamp in '" + std::string(view) + "'");
    if (!parse_number(fields[2], row.price) || !std::isfinite(row.price) || row.price <= 0.0)
      throw ParseError(lineno, "bad price in '" + std::string(view) + "'");

    auto it = rows.find(fields[0]);
    if (it == rows.end()) {
      symbols.emplace_back(fields[0]);
      it = rows.emplace(std::string(fields[0]), std::vector<Row>{}).first;
    }
    it->second.push_back(row);
  }

  LoadResult result;
  for (const auto& symbol : symbols) {
    auto& list = rows.find(symbol)->second;
    std::stable_sort(list.begin(), list.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });

    std::vector<Timestamp> times;
    std::vector<double> prices;
    for (const Row& r : list) {
      if (!times.empty() && times.back() == r.time) {
        prices.back() = r.price;  // last row at a timestamp wins
      } else {
        times.push_back(r.time);
        prices.push_back(r.price);
      }
    }
    if (times.size() < 2) {
      result.warnings.push_back("symbol '" + symbol + "' has fewer than 2 ticks; skipped");
      continue;
    }
    result.series.emplace_back(symbol, std::move(times),
                               Eigen::Map<const Eigen::VectorXd>(prices.data(),
                                                                 static_cast<Eigen::Index>(prices.size())));
  }
  return result;
}

LoadResult load_ticks(const std::filesystem::path& path, const CsvFormat& format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tick file " + path.string());
  return parse_ticks(in, format);
}

void write_ticks(std::ostream& out, const std::vector<TickSeries>& series, const CsvFormat& format) {
  const char d = format.delimiter;
  if (format.header) out << "symbol" << d << "time" << d << "price\n";
  out << std::setprecision(17);
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.size(); ++k)
      out << s.symbol() << d << s.times()[k] << d << s.prices()[static_cast<Eigen::Index>(k)] << '\n';
}

void save_ticks(const std::filesystem::path& path, const std::vector<TickSeries>& series,
                const CsvFormat& format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tick file " + path.string());
  write_ticks(out, series, format);
}

TickSeries clip(const TickSeries& series, const SessionSpec& session) {
  const auto& t = series.times();
  auto first_after = std::upper_bound(t.begin(), t.end(), session.t_start);
  if (first_after == t.begin())
    throw std::domain_error("undefined opening price for '" + series.symbol() + "'");
  auto begin = first_after - 1;
  auto end = std::upper_bound(first_after, t.end(), session.t_end);

  const auto offset = static_cast<Eigen::Index>(begin - t.begin());
  const auto count = static_cast<Eigen::Index>(end - begin);
  return TickSeries(series.symbol(), std::vector<Timestamp>(begin, end),
                    series.prices().segment(offset, count));
}

}  // namespace epps
