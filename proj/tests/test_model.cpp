#include "doctest.h"
#include "fixtures.hpp"

using namespace debtbugs;

TEST_CASE("validate_record accepts a well-formed record") {
  auto b = fixture::bug({.id = 7, .comments = {"first", "second"}});
  CHECK(validate_record(b).empty());
}

TEST_CASE("validate_record flags a self-duplicate") {
  auto b = fixture::bug({.id = 7, .duplicate_of = 7});
  auto v = validate_record(b);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("duplicate_of") != std::string::npos);
  CHECK(v[0].find("self-duplicate") != std::string::npos);
}

TEST_CASE("validate_record flags last change before assignment") {
  auto b = fixture::bug({.assigned = "2010-02-01T00:00:00Z", .last_change = "2010-01-01T00:00:00Z"});
  auto v = validate_record(b);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("date ordering") != std::string::npos);
}

TEST_CASE("validate_record checks ids, product, history order and comment indices") {
  auto b = fixture::bug({.id = 0, .product = ""});
  CHECK(validate_record(b).size() == 2);

  auto unordered = fixture::bug({});
  std::swap(unordered.status_history[0].ts, unordered.status_history[2].ts);
  CHECK(validate_record(unordered).size() == 1);

  auto gap = fixture::bug({.comments = {"a", "b"}});
  gap.comments[1].index = 2;
  CHECK(validate_record(gap).size() == 1);
  auto repeat = fixture::bug({.comments = {"a", "b"}});
  repeat.comments[1].index = 0;
  CHECK(validate_record(repeat).size() == 1);
}

TEST_CASE("validate_record is pure") {
  auto b = fixture::bug({.id = 3, .duplicate_of = 3});
  CHECK(validate_record(b) == validate_record(b));
}

TEST_CASE("timestamps normalize offsets to UTC") {
  auto a = parse_timestamp("2010-01-01T02:30:00+02:30");
  REQUIRE(a);
  CHECK(format_timestamp(*a) == "2010-01-01T00:00:00Z");
  auto b = parse_timestamp("2009-12-31T23:00:00-01:00");
  REQUIRE(b);
  CHECK(format_timestamp(*b) == "2010-01-01T00:00:00Z");
  CHECK(format_timestamp(*parse_timestamp("2010-03-04T05:06:07.250Z")) == "2010-03-04T05:06:07Z");
  CHECK(format_timestamp(*parse_timestamp("2010-03-04")) == "2010-03-04T00:00:00Z");
}

TEST_CASE("timestamps without an offset or with bad fields are rejected") {
  CHECK_FALSE(parse_timestamp("2010-01-01T00:00:00"));
  CHECK_FALSE(parse_timestamp("2010-02-30T00:00:00Z"));
  CHECK_FALSE(parse_timestamp("2010-01-01T24:00:00Z"));
  CHECK_FALSE(parse_timestamp("garbage"));
  CHECK_FALSE(parse_timestamp("2010-01-01T00:00:00Zjunk"));
}

TEST_CASE("status and debt type names round-trip") {
  for (auto s : {Status::New, Status::Assigned, Status::Resolved, Status::Reopened,
                 Status::Verified, Status::Closed}) {
    CHECK(status_from_string(to_string(s)) == s);
  }
  CHECK_FALSE(status_from_string("FIXED"));
  for (auto t : kDebtTypes) CHECK(debt_type_from_string(to_string(t)) == t);
}

TEST_CASE("DebtTypes behaves as a set") {
  DebtTypes types;
  CHECK(types.empty());
  types.insert(DebtType::Tag);
  types.insert(DebtType::Duplicate);
  types.insert(DebtType::Tag);
  CHECK(types.size() == 2);
  CHECK(types.contains(DebtType::Tag));
  CHECK_FALSE(types.contains(DebtType::Reopened));
}
