#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "epps/tickstore.hpp"
#include "support.hpp"

using namespace epps;

namespace {

LoadResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ticks(in);
}

}  // namespace

TEST_CASE("rows of one symbol become a tick series") {
  const auto r = parse("symbol,time,price\nA,0,100.0\nA,15,101.0\nA,40,99.0\n");
  REQUIRE(r.series.size() == 1);
  const TickSeries& a = r.series[0];
  CHECK(a.symbol() == "A");
  CHECK(a.times() == std::vector<Timestamp>{0, 15, 40});
  CHECK(a.prices()(0) == 100.0);
  CHECK(a.prices()(1) == 101.0);
  CHECK(a.prices()(2) == 99.0);
  CHECK(r.warnings.empty());
}

TEST_CASE("duplicate timestamps keep the last row") {
  const auto r = parse("symbol,time,price\nA,0,100\nA,15,101\nA,15,102\n");
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].times() == std::vector<Timestamp>{0, 15});
  CHECK(r.series[0].prices()(1) == 102.0);
}

TEST_CASE("out-of-order rows are sorted") {
  const auto r = parse("symbol,time,price\nA,40,99\nA,0,100\nA,15,101\n");
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].times() == std::vector<Timestamp>{0, 15, 40});
  CHECK(r.series[0].prices()(0) == 100.0);
  CHECK(r.series[0].prices()(2) == 99.0);
}

TEST_CASE("symbols keep file order and interleaving does not matter") {
  const auto r = parse("symbol,time,price\nB,0,50\nA,0,100\nB,5,51\nA,7,101\n");
  REQUIRE(r.series.size() == 2);
  CHECK(r.series[0].symbol() == "B");
  CHECK(r.series[1].symbol() == "A");
  CHECK(r.series[1].times() == std::vector<Timestamp>{0, 7});
}

TEST_CASE("a malformed timestamp names the line and the row") {
  try {
    parse("symbol,time,price\nA,0,100\nA,xx,100\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    const std::string what = e.what();
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("A,xx,100") != std::string::npos);
  }
}

TEST_CASE("other malformed rows are rejected") {
  CHECK_THROWS_AS(parse("symbol,time,price\nA,0,-1\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\nA,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\nA,0,nan\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\nA,0\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\nA,0,1,2\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\n,0,1\n"), ParseError);
  CHECK_THROWS_AS(parse("symbol,time,price\nA,1.5,1\n"), ParseError);
}

TEST_CASE("a symbol with a single tick is dropped with a warning") {
  const auto r = parse("symbol,time,price\nA,0,100\nA,5,101\nB,3,50\nC,1,1\nC,1,2\n");
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].symbol() == "A");
  REQUIRE(r.warnings.size() == 2);
  CHECK(r.warnings[0].find("'B'") != std::string::npos);
  CHECK(r.warnings[1].find("'C'") != std::string::npos);
}

TEST_CASE("blank lines, CRLF and a custom delimiter") {
  std::istringstream in("A;0;100\r\n\r\nA;5;101\r\n");
  const auto r = parse_ticks(in, CsvFormat{';', false});
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].times() == std::vector<Timestamp>{0, 5});
}

TEST_CASE("TickSeries enforces its invariants") {
  using support::series;
  CHECK_THROWS_AS(series("A", {0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(series("A", {0, 0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(series("A", {5, 1}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(series("A", {0, 1}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(series("A", {0, 1}, {1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(TickSeries("A", {0, 1}, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  CHECK_NOTHROW(series("A", {0, 1}, {1.0, 2.0}));
}

TEST_CASE("scaled multiplies prices and keeps times") {
  const auto s = support::series("A", {0, 3}, {2.0, 4.0}).scaled(0.5);
  CHECK(s.prices()(0) == 1.0);
  CHECK(s.prices()(1) == 2.0);
  CHECK(s.times() == std::vector<Timestamp>{0, 3});
  CHECK_THROWS(s.scaled(0.0));
}

TEST_CASE("SessionSpec validation") {
  CHECK_NOTHROW((SessionSpec{0, 100, 10}.validate()));
  CHECK_THROWS_AS((SessionSpec{100, 100, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SessionSpec{0, 105, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SessionSpec{0, 100, 0}.validate()), std::invalid_argument);
}

TEST_CASE("clip keeps the session plus the opening tick") {
  const auto s = support::series("A", {0, 10, 20, 30, 40}, {1, 2, 3, 4, 5});

  const auto inner = clip(s, {15, 35, 1});
  CHECK(inner.times() == std::vector<Timestamp>{10, 20, 30});

  const auto exact = clip(s, {10, 30, 1});
  CHECK(exact.times() == std::vector<Timestamp>{10, 20, 30});

  const auto tail = clip(s, {25, 100, 1});
  CHECK(tail.times() == std::vector<Timestamp>{20, 30, 40});
}

TEST_CASE("clip without an opening price is an error") {
  const auto s = support::series("A", {10, 20}, {1, 2});
  CHECK_THROWS_AS(clip(s, {5, 30, 1}), std::domain_error);
  // a single carried-over tick is not a series
  CHECK_THROWS_AS(clip(s, {25, 30, 1}), std::invalid_argument);
}

TEST_CASE("property: clip yields increasing times starting at or before t_start") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = support::random_series(rng, "A", 30, 20);
    std::uniform_int_distribution<Timestamp> start(0, s.back_time() - 1);
    const Timestamp t0 = start(rng);
    std::uniform_int_distribution<Timestamp> len(1, s.back_time());
    const SessionSpec session{t0, t0 + len(rng), 1};
    try {
      const auto c = clip(s, session);
      CHECK(c.front_time() <= session.t_start);
      CHECK(c.back_time() <= session.t_end);
      for (std::size_t k = 1; k < c.size(); ++k) {
        CHECK(c.times()[k] > c.times()[k - 1]);
        CHECK(c.times()[k] > session.t_start);
      }
      // every original tick inside the session survives
      std::size_t inside = 0;
      for (auto t : s.times()) inside += (t > session.t_start && t <= session.t_end);
      CHECK(c.size() == inside + 1);
    } catch (const std::invalid_argument&) {
      // only when nothing trades inside the session
      for (auto t : s.times()) CHECK_FALSE((t > session.t_start && t <= session.t_end));
    }
  }
}

TEST_CASE("property: write then parse round-trips bit for bit") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<TickSeries> in{support::random_series(rng, "X", 2 + iter, 100),
                               support::random_series(rng, "Y", 40, 3)};
    std::stringstream buf;
    write_ticks(buf, in);
    const auto out = parse_ticks(buf);
    REQUIRE(out.series.size() == 2);
    CHECK(out.series[0] == in[0]);
    CHECK(out.series[1] == in[1]);
  }
}

TEST_CASE("save and load through a file") {
  support::TempDir dir("tickstore");
  const auto a = support::series("A", {0, 1, 2}, {1.5, 1.25, 1.125});
  save_ticks(dir.path / "t.csv", {a});
  const auto r = load_ticks(dir.path / "t.csv");
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0] == a);
  CHECK_THROWS_AS(load_ticks(dir.path / "missing.csv"), std::runtime_error);
}
