#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "pacurves/golden.hpp"


using namespace pacurves;
using testing::vec;

namespace {

std::string fixture_text(const std::string& id) {
  return testing::slurp(std::string(PACURVES_SOURCE_DIR) + "/data/fixtures/" + id + ".json");
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Usage;
}

}  // namespace

TEST_CASE("all fixtures pass") {
  const std::vector<std::string> ids = fixture_ids();
  CHECK(ids == std::vector<std::string>{"G1", "G2", "G3", "G4", "G5", "G6"});
  for (const std::string& id : ids) {
    CAPTURE(id);
    const Report r = run_golden(id);
    CHECK(r.pass());
    CHECK(r.subject_key == "fixture");
    CHECK_FALSE(r.quantities.empty());
  }
}

TEST_CASE("sampled fixture values at single points") {
  SUBCASE("grim reaper at the origin") {
    const GoldenFixture fx = load_fixture("G5");
    const std::size_t k = fx.curve.grid.index_of(0.0);
    CHECK(fx.curve.points[k].norm() < 1e-15);
    CHECK(fx.expected.at("kappa")[k] == doctest::Approx(1.0));
  }
  SUBCASE("sphere curve at s = 0.6") {
    const GoldenFixture fx = load_fixture("G4");
    const std::size_t k = fx.curve.grid.index_of(0.6);
    CHECK(fx.expected.at("kappa")[k] == doctest::Approx(1.25));
    CHECK(fx.expected.at("tau")[k] == doctest::Approx(1.25));
    CHECK(fx.curve.points[k].norm() == doctest::Approx(1.0));
  }
  SUBCASE("half-plane curve at the origin") {
    const GoldenFixture fx = load_fixture("G6");
    const std::size_t k = fx.curve.grid.index_of(0.0);
    CHECK((fx.curve.points[k] - vec({0, 1})).norm() < 1e-15);
    CHECK(fx.expected.at("cos_theta")[k] == doctest::Approx(1.0));
    CHECK(fx.expected.at("kappa")[k] == doctest::Approx(1.0));
  }
}

TEST_CASE("step override") {
  const GoldenFixture fx = load_fixture("G5", 0.01);
  CHECK(fx.curve.grid.size() == 401);
  CHECK(run_golden(fx).pass());
}

TEST_CASE("unknown and corrupted fixtures") {
  CHECK(code_of([] { load_fixture("G7"); }) == ErrorCode::Usage);
  CHECK(code_of([] { parse_fixture("{\"id\": \"X\""); }) == ErrorCode::Usage);
  // tau no longer matches tau/kappa.
  const std::string bad_tau = replaced(fixture_text("G4"), "\"tau\": \"1/a\"", "\"tau\": \"2/a\"");
  CHECK(code_of([&] { parse_fixture(bad_tau); }) == ErrorCode::Input);
  // Self-consistent closed forms that the curve does not have.
  const std::string wrong = replaced(fixture_text("G5"), "\"kappa\": \"sech(s)\"", "\"kappa\": \"sech(s/2)\"");
  const Report r = run_golden(parse_fixture(wrong));
  CHECK_FALSE(r.pass());
  REQUIRE(r.find("kappa") != nullptr);
  CHECK_FALSE(r.find("kappa")->pass);
}

TEST_CASE("reports are deterministic") {
  const std::string a = to_json(run_golden("G3"));
  CHECK(a == to_json(run_golden("G3")));
  CHECK(a.find("\"fixture\"") != std::string::npos);
}
