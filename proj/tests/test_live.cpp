#include "doctest.h"

#include "officetwin/error.hpp"
#include "officetwin/live.hpp"
#include "officetwin/metrics.hpp"
#include "support/office.hpp"

using namespace officetwin;

namespace {

Scenario endless(double duration = 1e9) {
  Scenario s;
  s.name = "live";
  s.duration = duration;
  s.snapshot_every = 0;
  s.work_window = {0, 1e9};
  return s;
}

Stimulus stim(Stimulus::Kind kind, double value = 0.0) {
  Stimulus s;
  s.kind = kind;
  s.value = value;
  return s;
}

}  // namespace

TEST_CASE("manual stepping resolves commands at the next tick") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules());
  auto f = live.submit({"Fan", "Status", Value::text("Low"), "alice"});
  CHECK(f.wait_for(std::chrono::milliseconds(0)) == std::future_status::timeout);
  live.step();
  REQUIRE(f.wait_for(std::chrono::milliseconds(0)) == std::future_status::ready);
  auto outcome = f.get();
  REQUIRE(outcome.change);
  CHECK(outcome.change->sim_time == 0);
  CHECK(live.world().get("Fan", "Status") == Value::text("Low"));
  CHECK(live.status().ticks == 1);
  CHECK_FALSE(live.status().running);

  auto bad = live.submit({"Fan", "Status", Value::text("Turbo"), "alice"});
  live.step();
  CHECK(bad.get().error->code() == ErrorCode::domain);
}

TEST_CASE("stimuli in the past apply at the next tick") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules());
  for (int i = 0; i < 5; ++i) live.step();
  auto s = stim(Stimulus::Kind::occupancy_set, 2);
  s.at = 1;
  CHECK(live.inject(s).at == 5);
  live.step();
  CHECK(live.world().get("Light", "On") == Value::boolean(true));
  CHECK_THROWS_AS(live.inject(stim(Stimulus::Kind::wind_set, -3)), Error);
}

TEST_CASE("event pages") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules());
  live.inject(stim(Stimulus::Kind::occupancy_set, 2));
  live.step();
  auto all = live.events(0, 1000);
  REQUIRE(all.events.size() >= 4);
  CHECK(all.next == all.events.size());
  auto first = live.events(0, 2);
  CHECK(first.events.size() == 2);
  CHECK(first.next == 2);
  CHECK(first.events[0]["cursor"] == 1);
  auto rest = live.events(first.next, 1000);
  CHECK(rest.events.size() == all.events.size() - 2);
  CHECK(live.events(all.next, 10).events.empty());
  CHECK(live.events(all.next + 50, 10).next == all.next);
  CHECK(all.events[0].contains("handle"));
}

TEST_CASE("rule edits are checked before they take effect") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules());
  auto rules = live.rules();
  rules.add(parse_rule(R"(rule "x" when Toaster.On is true then set Fan.On = true)"));
  try {
    live.set_rules(rules);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::reference);
  }
  RuleSet sensor({parse_rule(R"(rule "x" when AC.On is true then set SmokeDetector.Level = 1)")});
  CHECK_THROWS_AS(live.set_rules(sensor), Error);
  CHECK(live.rules() == office::default_rules());
  live.set_rules(RuleSet{});
  CHECK(live.rules().empty());
}

TEST_CASE("finished simulations refuse work") {
  LiveSimulation live(endless(3), office::catalog(), office::default_rules());
  for (int i = 0; i < 3; ++i) live.step();
  CHECK(live.status().finished);
  CHECK_THROWS_AS(live.submit({"Fan", "Status", Value::text("Low"), "alice"}), Error);
  CHECK_THROWS_AS(live.inject(stim(Stimulus::Kind::fire_start)), Error);
  auto t = live.trace();
  REQUIRE(t.end);
  CHECK(t.end->sim_time == 3);
}

TEST_CASE("live report compares against the replayed baseline") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules());
  live.inject(stim(Stimulus::Kind::occupancy_set, 1));
  for (int i = 0; i < 60; ++i) live.step();
  live.inject(stim(Stimulus::Kind::occupancy_set, 0));
  for (int i = 0; i < 60; ++i) live.step();
  auto r = live.report(default_profile());
  CHECK(r.sim_time == 120);
  CHECK(r.automated.duration == 120);
  CHECK(r.baseline.duration == 120);
  // fan 60 W and light 10 W for the occupied minute
  CHECK(r.automated.comfort_energy_wh == doctest::Approx(70.0 * 60 / 3600));
  // fan, light, AC and street lamp held on for both minutes
  CHECK(r.baseline.comfort_energy_wh == doctest::Approx((60 + 10 + 1500 + 50) * 120.0 / 3600));
  CHECK(r.report.find("12.5")->automated.value() == 0.0);
  CHECK(r.report.find("12.5")->baseline.value() == doctest::Approx(4 * 60.0 / 3600));
}

TEST_CASE("the tick loop runs on its own and stops cleanly") {
  LiveSimulation live(endless(), office::catalog(), office::default_rules(), std::chrono::milliseconds(2));
  live.start();
  auto f = live.submit({"AC", "On", Value::boolean(true), "alice"});
  REQUIRE(f.wait_for(std::chrono::seconds(5)) == std::future_status::ready);
  CHECK(f.get().change);
  CHECK(live.status().running);
  live.stop();
  CHECK_FALSE(live.status().running);
  auto ticks = live.status().ticks;
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  CHECK(live.status().ticks == ticks);
  CHECK(live.world().get("Window", "On") == Value::boolean(false));
}
