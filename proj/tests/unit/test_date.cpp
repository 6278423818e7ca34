#include "doctest.h"

#include "drawnet/date.hpp"

using drawnet::Date;

TEST_CASE("iso round trip over several years") {
    for (Date d = Date::parse("1999-12-25"); d < Date::parse("2013-03-01"); d = d + 17) {
        CHECK(Date::parse(d.iso()) == d);
    }
    CHECK(Date::from_ymd(2008, 2, 29).iso() == "2008-02-29");
}

TEST_CASE("weekday") {
    CHECK(Date::parse("2003-04-01").weekday() == 2);  // Tuesday
    CHECK(Date::parse("2008-09-15").weekday() == 1);
}

TEST_CASE("invalid dates are rejected") {
    CHECK_THROWS(Date::parse("2003-02-30"));
    CHECK_THROWS(Date::parse("2003/02/01"));
    CHECK_THROWS(Date::parse("20030201"));
}
