#include "doctest.h"

#include <fstream>
#include <random>

#include "officetwin/catalog.hpp"
#include "officetwin/device.hpp"
#include "officetwin/error.hpp"
#include "officetwin/world.hpp"

using namespace officetwin;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an officetwin::Error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("value formatting and JSON") {
  CHECK(Value::boolean(true).to_string() == "true");
  CHECK(Value::number(0.18).to_string() == "0.18");
  CHECK(Value::number(1001).to_string() == "1001");
  CHECK(Value::text("High").to_string() == "High");
  CHECK(Value::number(3).to_json().is_number_integer());
  CHECK(Value::number(0.5).to_json().is_number_float());
  CHECK(Value::from_json(nlohmann::json(true)) == Value::boolean(true));
  CHECK(Value::from_json(nlohmann::json("Low")) == Value::text("Low"));
  CHECK(code_of([] { Value::from_json(nlohmann::json::array()); }) == ErrorCode::bad_request);
  CHECK_FALSE(Value::number(1) == Value::boolean(true));
}

TEST_CASE("builtin catalog lists the office devices") {
  auto c = builtin_catalog();
  CHECK(c.size() == 22);
  auto fan = c.index_of("PTT0810921C");
  REQUIRE(fan);
  CHECK(c[*fan].kind == "Ceiling Fan");
  CHECK(c.index_of("Fan") == fan);
  CHECK(c.at("Door").find_property("Lock")->labels == std::vector<std::string>{"Lock", "Unlock"});
  CHECK(c.at("RFIDReader").defaults.at("Status") == Value::text("Invalid"));
  CHECK(c.at("SmokeDetector").find_property("Level")->writable_by == WritableBy::sensor);
  CHECK(c.at("Solar").ratings.at("rated_watts") == 300.0);
  CHECK_FALSE(c.index_of("Toaster"));
}

TEST_CASE("shipped catalog file matches the builtin catalog") {
  auto loaded = Catalog::load(std::string(OFFICETWIN_DATA_DIR) + "/catalog.json");
  CHECK(loaded.devices() == builtin_catalog().devices());
}

TEST_CASE("catalog JSON round trip") {
  auto c = builtin_catalog();
  auto again = Catalog::from_json(nlohmann::json::parse(c.to_json().dump()));
  CHECK(again.devices() == c.devices());
}

TEST_CASE("catalog rejects malformed descriptors") {
  auto base = builtin_catalog().devices();

  SUBCASE("duplicate id") {
    auto d = base;
    d[1].device_id = d[0].device_id;
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
  SUBCASE("duplicate handle") {
    auto d = base;
    d[1].handle = d[0].handle;
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
  SUBCASE("handle shadows another id") {
    auto d = base;
    d[1].handle = d[0].device_id;
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
  SUBCASE("default outside domain") {
    auto d = base;
    d[0].defaults["Status"] = Value::text("Turbo");
    try {
      Catalog{d};
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::schema);
      CHECK(e.detail() == "defaults.Status");
    }
  }
  SUBCASE("missing default") {
    auto d = base;
    d[0].defaults.clear();
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
  SUBCASE("empty enumeration") {
    auto d = base;
    d[0].properties[0].labels.clear();
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
  SUBCASE("inverted range") {
    auto d = base;
    auto i = *Catalog(base).index_of("WindDetector");
    d[i].properties[0].min = 5;
    d[i].properties[0].max = 1;
    CHECK(code_of([&] { Catalog{d}; }) == ErrorCode::schema);
  }
}

TEST_CASE("catalog load reports unreadable and malformed files") {
  CHECK(code_of([] { Catalog::load("/nonexistent/catalog.json"); }) == ErrorCode::io);
  auto path = std::filesystem::temp_directory_path() / "officetwin-bad-catalog.json";
  std::ofstream(path) << "{\"devices\": [{\"device_id\": 3}]}";
  CHECK(code_of([&] { Catalog::load(path); }) == ErrorCode::schema);
  std::ofstream(path) << "not json";
  CHECK(code_of([&] { Catalog::load(path); }) == ErrorCode::schema);
  std::filesystem::remove(path);
}

TEST_CASE("write checks: domain, permission, unknown property") {
  auto c = builtin_catalog();
  const auto& door = c.at("Door");
  CHECK_NOTHROW(check_write(door, "Lock", Value::text("Unlock"), Cause::command("admin")));
  CHECK(code_of([&] { check_write(door, "Lock", Value::text("Ajar"), Cause::command("a")); }) == ErrorCode::domain);
  CHECK(code_of([&] { check_write(door, "Lock", Value::boolean(true), Cause::rule("r")); }) == ErrorCode::domain);
  CHECK(code_of([&] { check_write(door, "Colour", Value::text("Red"), Cause::rule("r")); }) == ErrorCode::not_found);

  const auto& smoke = c.at("SmokeDetector");
  CHECK_NOTHROW(check_write(smoke, "Level", Value::number(0.3), Cause::environment()));
  CHECK(code_of([&] { check_write(smoke, "Level", Value::number(0.3), Cause::command("admin")); }) ==
        ErrorCode::permission);
  CHECK(code_of([&] { check_write(smoke, "Level", Value::number(0.3), Cause::rule("r")); }) == ErrorCode::permission);
  CHECK(code_of([&] { check_write(smoke, "Level", Value::number(1.5), Cause::environment()); }) == ErrorCode::domain);
  CHECK(code_of([&] { check_write(door, "Lock", Value::text("Lock"), Cause::environment()); }) == ErrorCode::permission);

  const auto& rfid = c.at("RFIDReader");
  CHECK(code_of([&] { check_write(rfid, "CardID", Value::number(10.5), Cause::environment()); }) == ErrorCode::domain);
  CHECK(code_of([&] { check_write(rfid, "CardID", Value::number(-1), Cause::environment()); }) == ErrorCode::domain);
}

TEST_CASE("apply records changes and suppresses no-ops") {
  auto catalog = std::make_shared<const Catalog>(builtin_catalog());
  World w(catalog);
  auto c = w.apply("Light", "On", Value::boolean(true), Cause::command("admin"), 12.0);
  REQUIRE(c);
  CHECK(c->device_id == "PTT08102ZTN");
  CHECK(c->old_value == Value::boolean(false));
  CHECK(c->new_value == Value::boolean(true));
  CHECK(c->sim_time == 12.0);
  CHECK(c->cause.kind == Cause::Kind::command);
  auto idx = *w.index_of("Light");
  CHECK(w.state(idx).last_changed.at("On") == 12.0);

  CHECK_FALSE(w.apply("Light", "On", Value::boolean(true), Cause::command("admin"), 20.0));
  CHECK(w.state(idx).last_changed.at("On") == 12.0);
}

TEST_CASE("property: out-of-domain writes never change the world") {
  auto catalog = std::make_shared<const Catalog>(builtin_catalog());
  World w(catalog);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> wild(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    std::size_t d = rng() % catalog->size();
    const auto& desc = (*catalog)[d];
    const auto& prop = desc.properties[rng() % desc.properties.size()];
    Value v = Value::number(wild(rng));
    switch (rng() % 3) {
      case 0: v = Value::boolean(rng() % 2 == 0); break;
      case 1: v = Value::text(rng() % 2 ? "High" : "Sideways"); break;
      default: break;
    }
    World before = w;
    try {
      w.apply(d, prop.name, v, Cause::initialization(), 1.0);
      CHECK(prop.accepts(v));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
      CHECK_FALSE(prop.accepts(v));
      CHECK(w.same_values(before));
    }
    for (std::size_t k = 0; k < catalog->size(); ++k) {
      for (const auto& p : (*catalog)[k].properties) CHECK(p.accepts(w.get(k, p.name)));
    }
  }
}

TEST_CASE("error codes have stable names") {
  CHECK(code_name(ErrorCode::auth) == "auth");
  CHECK(code_name(ErrorCode::type_mismatch) == "type_mismatch");
  CHECK(code_name(ErrorCode::capacity) == "capacity");
  SyntaxError e(3, 14, "expected 'then'", "rules.txt");
  CHECK(std::string(e.what()) == "rules.txt: line 3, column 14: expected 'then'");
  CHECK(e.code() == ErrorCode::syntax);
  OscillationError o({"A", "B"}, 16, 42.0);
  CHECK(std::string(o.what()).find("\"A\", \"B\"") != std::string::npos);
  CHECK(std::string(o.what()).find("t=42") != std::string::npos);
}
