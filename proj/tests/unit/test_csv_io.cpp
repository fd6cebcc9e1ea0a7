#include <doctest.h>

#include <sstream>

#include "sparsemob/baselines.hpp"
#include "sparsemob/csv_io.hpp"
#include "sparsemob/errors.hpp"

using namespace sparsemob;

namespace {
constexpr Seconds kPlus8 = 8 * 3600;
}

TEST_CASE("timestamps") {
  // 2016-12-07 18:02:41 at +08:00.
  CHECK(parse_timestamp("18:02:41/12/07/2016", kPlus8) == 1481104961);
  CHECK(parse_timestamp("2016-12-07T10:02:41Z", kPlus8) == 1481104961);
  CHECK(parse_timestamp("2016-12-07 18:02:41", kPlus8) == 1481104961);
  CHECK(parse_timestamp("2016-12-07T18:02:41+08:00", 0) == 1481104961);
  CHECK(parse_timestamp("2016-12-07T18:02:41.750+08:00", 0) == 1481104961);
  CHECK(parse_timestamp("1481104961", kPlus8) == 1481104961);
  CHECK(parse_timestamp("1481104961.9", kPlus8) == 1481104961);
  CHECK(parse_timestamp("1969-12-31T23:59:59Z", 0) == -1);
  CHECK_THROWS_AS(parse_timestamp("2016-13-07T00:00:00Z", 0), DataError);
  CHECK_THROWS_AS(parse_timestamp("2016-02-30T00:00:00Z", 0), DataError);
  CHECK_THROWS_AS(parse_timestamp("yesterday", 0), DataError);
  CHECK_THROWS_AS(parse_timestamp("", 0), DataError);

  CHECK(parse_utc_offset("+08:00") == kPlus8);
  CHECK(parse_utc_offset("-0530") == -(5 * 3600 + 30 * 60));
  CHECK(parse_utc_offset("+8") == kPlus8);
  CHECK(parse_utc_offset("Z") == 0);
  CHECK(parse_utc_offset("UTC") == 0);
  CHECK_THROWS(parse_utc_offset("8h"));
}

TEST_CASE("ingest a record in local time") {
  std::istringstream in(
      "time,lon,lat,mid\n"
      "18:02:41/07/12/2016,116.523625,39.792935,460000000000001\n");
  const auto d = ingest(in);
  REQUIRE(d.trajectories.size() == 1);
  const auto& r = d.trajectories[0][0];
  CHECK(r.time == 1468317761);
  CHECK(r.location.lon == 116.523625);
  CHECK(d.trajectories[0].device() == "460000000000001");
  CHECK(hour_index(r.time) == 24 + 18);  // Tuesday 18h
  CHECK_FALSE(d.labeled);
}

TEST_CASE("ingest edge cases") {
  SUBCASE("header only") {
    std::istringstream in("time,lon,lat,mid\n");
    const auto d = ingest(in);
    CHECK(d.trajectories.empty());
    CHECK(d.rejected_rows == 0);
  }
  SUBCASE("column order, quotes, comments and sorting") {
    std::istringstream in(
        "# exported\n"
        "mid,lat,lon,time,label\n"
        "\"b,1\",39.9,116.4,200,S\n"
        "\n"
        "a,39.9,116.4,300,T\n"
        "a,39.9,116.5,100,U\n");
    const auto d = ingest(in);
    REQUIRE(d.trajectories.size() == 2);
    CHECK(d.labeled);
    CHECK(d.trajectories[0].device() == "a");
    CHECK(d.trajectories[0].time(0) == 100);
    CHECK(d.trajectories[0].location(0).lon == 116.5);
    CHECK(d.labels[0] == std::vector<MobilityLabel>{MobilityLabel::Unlabeled, MobilityLabel::Travel});
    CHECK(d.trajectories[1].device() == "b,1");
  }
  SUBCASE("duplicates and bad rows") {
    const std::string text =
        "time,lon,lat,mid\n"
        "100,116.4,39.9,a\n"
        "100,116.5,39.9,a\n"
        "x,116.4,39.9,a\n"
        "200,200.0,39.9,a\n"
        "300,116.4,39.9,a\n";
    std::istringstream lax(text);
    const auto d = ingest(lax);
    REQUIRE(d.trajectories.size() == 1);
    CHECK(d.trajectories[0].size() == 2);
    CHECK(d.trajectories[0].location(0).lon == 116.4);
    CHECK(d.rejected_rows == 3);
    CHECK(d.diagnostics.size() == 3);

    IngestOptions strict;
    strict.strict = true;
    std::istringstream again(text);
    CHECK_THROWS_AS(ingest(again, strict), DataError);
  }
  SUBCASE("missing column") {
    std::istringstream in("time,lon,mid\n1,2,a\n");
    CHECK_THROWS_AS(ingest(in), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(ingest_file("/nonexistent/records.csv"), DataError);
  }
}

TEST_CASE("dataset round trip") {
  const Trajectory a("x\"y", {{10, {116.123456789012345, 39.98765432109876}}, {70, {-0.5, 1e-9}}});
  const std::vector<std::vector<MobilityLabel>> labels{{MobilityLabel::Stay, MobilityLabel::Travel}};
  std::stringstream io;
  write_dataset(io, {a}, &labels);
  const auto d = ingest(io);
  REQUIRE(d.trajectories.size() == 1);
  CHECK(d.trajectories[0].device() == a.device());
  CHECK(d.trajectories[0].records().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(d.trajectories[0].time(i) == a.time(i));
    CHECK(d.trajectories[0].location(i).lon == a.location(i).lon);
    CHECK(d.trajectories[0].location(i).lat == a.location(i).lat);
  }
  CHECK(d.labels == labels);

  std::stringstream lab;
  write_labels(lab, {a}, labels);
  const auto table = read_labels(lab);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1].mid == a.device());
  CHECK(table.rows[1].time == 70);
  CHECK(table.rows[1].label == MobilityLabel::Travel);
}

TEST_CASE("csv parsing") {
  std::istringstream in("a,\"b \"\"q\"\"\",c\n\"multi\nline\",2\n");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].fields == std::vector<std::string>{"a", "b \"q\"", "c"});
  CHECK(rows[1].fields[0] == "multi\nline");
  CHECK(rows[1].line == 2);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("q\"") == "\"q\"\"\"");
}
