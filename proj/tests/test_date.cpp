#include "doctest.h"

#include "xtreval/date.hpp"

using namespace xtreval;

TEST_CASE("epoch day zero is 1970-01-01") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(civil_from_days(0) == CivilDate{1970, 1, 1});
}

TEST_CASE("civil day round trip across four centuries") {
  for (std::int64_t z = days_from_civil(1850, 1, 1); z <= days_from_civil(2250, 1, 1);
       z += 97) {
    CHECK(days_from_civil(civil_from_days(z)) == z);
  }
}

TEST_CASE("day numbers increase by one across month and year boundaries") {
  CHECK(days_from_civil(1999, 12, 31) + 1 == days_from_civil(2000, 1, 1));
  CHECK(days_from_civil(1996, 2, 29) + 1 == days_from_civil(1996, 3, 1));
  CHECK(days_from_civil(1969, 12, 31) == -1);
}

TEST_CASE("leap year rule: divisible by 4, centuries only by 400") {
  CHECK(is_leap_year(1996));
  CHECK(is_leap_year(2000));
  CHECK_FALSE(is_leap_year(1900));
  CHECK_FALSE(is_leap_year(2014));
  CHECK(days_in_month(1996, 2) == 29);
  CHECK(days_in_month(1900, 2) == 28);
  CHECK(days_in_month(2014, 12) == 31);
}

TEST_CASE("parse and format are inverse on valid dates") {
  const CivilDate d = parse_date("1951-12-01");
  CHECK(d == CivilDate{1951, 12, 1});
  CHECK(format_date(d) == "1951-12-01");
  CHECK(format_date(CivilDate{987, 3, 7}) == "0987-03-07");
}

TEST_CASE("parse rejects malformed or impossible dates") {
  CHECK_THROWS_AS(parse_date("1970-2-01"), ConfigError);
  CHECK_THROWS_AS(parse_date("1970/02/01"), ConfigError);
  CHECK_THROWS_AS(parse_date("1970-13-01"), ConfigError);
  CHECK_THROWS_AS(parse_date("1970-02-30"), ConfigError);
  CHECK_THROWS_AS(parse_date("197O-02-01"), ConfigError);
  CHECK_THROWS_AS(parse_date("1970-02-011"), ConfigError);
  CHECK_THROWS_AS(parse_date(""), ConfigError);
}
