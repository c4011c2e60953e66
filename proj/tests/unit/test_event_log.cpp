#include <doctest.h>

#include <sstream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/event_log.hpp"

using namespace hawkes_ls;

namespace {

EventLog sample() {
  EventLog log;
  log.times = {{0.1, 0.30000000000000004, 2.5}, {1e-300, 0.2, 7.0}};
  log.horizon = 7.0;
  log.spec_hash = 0x0123456789abcdefULL;
  log.seed = 18446744073709551615ULL;
  log.generator = "thinning";
  return log;
}

}  // namespace

TEST_SUITE("event_log") {
  TEST_CASE("CSV round trip is exact") {
    const EventLog log = sample();
    std::stringstream ss;
    write_csv(log, ss);
    const std::string text = ss.str();
    CHECK(text.find("component,time\n1,1e-300\n0,0.1\n1,0.2\n") != std::string::npos);
    CHECK(read_csv(ss) == log);
  }

  TEST_CASE("binary round trip is exact") {
    const EventLog log = sample();
    std::stringstream ss;
    write_binary(log, ss);
    CHECK(ss.str().substr(0, 8) == "HWKSLOG1");
    CHECK(read_binary(ss) == log);
  }

  TEST_CASE("counting") {
    const EventLog log = sample();
    CHECK(log.total() == 6);
    CHECK(log.count_until(0, 0.3) == 1);
    CHECK(log.count_until(0, 0.30000000000000004) == 2);
    CHECK(log.count_until(1, 7.0) == 3);
  }

  TEST_CASE("invariant violations") {
    EventLog log = sample();
    log.times[0].push_back(8.0);
    CHECK_THROWS_AS(log.check_invariants(), InvalidLog);
    log = sample();
    log.times[0] = {0.5, 0.4};
    CHECK_THROWS_AS(log.check_invariants(), InvalidLog);
    log = sample();
    log.times[0][0] = 0.2;
    CHECK_THROWS_AS(log.check_invariants(), InvalidLog);
    log = sample();
    log.times[0][0] = 0.0;
    CHECK_THROWS_AS(log.check_invariants(), InvalidLog);
    std::stringstream bad("HWKSLOG2");
    CHECK_THROWS_AS(read_binary(bad), InvalidLog);
    std::stringstream rows("# p=1\ncomponent,time\n0,abc\n");
    CHECK_THROWS_AS(read_csv(rows), InvalidLog);
  }
}
