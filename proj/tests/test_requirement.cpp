#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "beamsel/errors.hpp"
#include "beamsel/requirement.hpp"
#include "beamsel/rng.hpp"
#include "oracles.hpp"

using namespace beamsel;

namespace {

BeamRequirement sample_req() {
  BeamRequirement r;
  r.bw_az_deg = 0.8;
  r.bw_el_deg = 1.1;
  r.sll_az_db = -27.0;
  r.sll_el_db = -22.0;
  r.eirp_dbw = 62.0;
  r.point_el_deg = 3.0;
  r.point_az_deg = -5.0;
  return r;
}

}  // namespace

TEST_CASE("feature vector round trips in canonical order") {
  const BeamRequirement r = sample_req();
  const VectorXd f = r.features();
  REQUIRE(f.size() == 7);
  CHECK(f(0) == 0.8);
  CHECK(f(1) == 1.1);
  CHECK(f(2) == -27.0);
  CHECK(f(3) == -22.0);
  CHECK(f(4) == 62.0);
  CHECK(f(5) == 3.0);
  CHECK(f(6) == -5.0);

  const BeamRequirement back = BeamRequirement::from_features(f);
  CHECK(back.bw_az_deg == r.bw_az_deg);
  CHECK(back.point_az_deg == r.point_az_deg);

  CHECK(std::string(BeamRequirement::kFeatureNames[0]) == "bw_az_deg");
  CHECK(std::string(BeamRequirement::kFeatureNames[6]) == "point_az_deg");
}

TEST_CASE("from_features insists on 7 entries") {
  CHECK_THROWS_AS(BeamRequirement::from_features(VectorXd::Zero(6)),
                  DomainError);
  CHECK_THROWS_AS(BeamRequirement::from_features(VectorXd::Zero(8)),
                  DomainError);
}

TEST_CASE("requirement validation") {
  CHECK_NOTHROW(sample_req().validate());
  auto tweak = [](auto mutate) {
    BeamRequirement r = sample_req();
    mutate(r);
    return r;
  };
  CHECK_THROWS_AS(tweak([](BeamRequirement& r) { r.bw_az_deg = 0.0; })
                      .validate(),
                  DomainError);
  CHECK_THROWS_AS(tweak([](BeamRequirement& r) { r.bw_el_deg = -1.0; })
                      .validate(),
                  DomainError);
  CHECK_THROWS_AS(tweak([](BeamRequirement& r) { r.sll_az_db = 0.0; })
                      .validate(),
                  DomainError);
  CHECK_THROWS_AS(tweak([](BeamRequirement& r) { r.sll_el_db = 3.0; })
                      .validate(),
                  DomainError);
  CHECK_THROWS_AS(tweak([](BeamRequirement& r) { r.point_el_deg = 95.0; })
                      .validate(),
                  DomainError);
  CHECK_THROWS_AS(
      tweak([](BeamRequirement& r) { r.eirp_dbw = 1.0 / 0.0; }).validate(),
      DomainError);
}

TEST_CASE("cost weights validation") {
  CHECK_NOTHROW(CostWeights{}.validate());
  CHECK_THROWS_AS((CostWeights{-1.0, 1.0, 1.0}).validate(), DomainError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((CostWeights{1.0, nan, 1.0}).validate(), DomainError);
}

TEST_CASE("zero error means zero cost") {
  const BeamRequirement r = sample_req();
  PatternMetrics m;
  m.beamwidth_az_deg = r.bw_az_deg;
  m.beamwidth_el_deg = r.bw_el_deg;
  m.sll_az_db = r.sll_az_db;
  m.sll_el_db = r.sll_el_db;
  m.eirp_dbw = r.eirp_dbw;
  const CostBreakdown c = evaluate_cost(r, m, CostWeights{});
  CHECK(c.z1 == 0.0);
  CHECK(c.z2 == 0.0);
  CHECK(c.z3 == 0.0);
  CHECK(c.total == 0.0);
}

TEST_CASE("cost terms computed by hand") {
  BeamRequirement r = sample_req();
  r.bw_az_deg = 1.0;
  r.bw_el_deg = 2.0;
  r.sll_az_db = -20.0;
  r.sll_el_db = -25.0;
  r.eirp_dbw = 50.0;
  PatternMetrics m;
  m.beamwidth_az_deg = 1.1;   // +10% of 1.0
  m.beamwidth_el_deg = 1.9;   // -5% of 2.0
  m.sll_az_db = -22.0;        // 2 dB over 20
  m.sll_el_db = -24.0;        // 1 dB over 25
  m.eirp_dbw = 47.0;          // 3 dB under 50

  const CostBreakdown c =
      evaluate_cost(r, m, CostWeights{2.0, 3.0, 4.0});
  CHECK(c.z1 == doctest::Approx(0.10 + 0.05));
  CHECK(c.z2 == doctest::Approx(2.0 / 20.0 + 1.0 / 25.0));
  CHECK(c.z3 == doctest::Approx(3.0 / 50.0));
  CHECK(c.total ==
        doctest::Approx(2.0 * c.z1 + 3.0 * c.z2 + 4.0 * c.z3));

  const CostBreakdown s =
      evaluate_cost(r, m, CostWeights{2.0, 3.0, 4.0}, EirpMode::signed_diff);
  CHECK(s.z3 == doctest::Approx(-3.0 / 50.0));
  CHECK(s.total == doctest::Approx(2.0 * s.z1 + 3.0 * s.z2 - 4.0 * 3.0 / 50.0));
}

TEST_CASE("cost agrees with an independent evaluation on random inputs") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    BeamRequirement r;
    r.bw_az_deg = rng.next_double(0.3, 2.0);
    r.bw_el_deg = rng.next_double(0.3, 2.0);
    r.sll_az_db = rng.next_double(-35.0, -15.0);
    r.sll_el_db = rng.next_double(-35.0, -15.0);
    r.eirp_dbw = rng.next_double(40.0, 80.0);
    PatternMetrics m;
    m.beamwidth_az_deg = rng.next_double(0.2, 2.5);
    m.beamwidth_el_deg = rng.next_double(0.2, 2.5);
    m.sll_az_db = rng.next_double(-40.0, -10.0);
    m.sll_el_db = rng.next_double(-40.0, -10.0);
    m.eirp_dbw = rng.next_double(35.0, 85.0);
    const CostWeights kw{rng.next_double(0.0, 3.0), rng.next_double(0.0, 3.0),
                         rng.next_double(0.0, 3.0)};

    const bool signed_mode = trial % 2 == 1;
    const CostBreakdown got = evaluate_cost(
        r, m, kw, signed_mode ? EirpMode::signed_diff : EirpMode::absolute);
    const double want = oracles::ref_cost(r, m, kw, signed_mode);
    CHECK(got.total == doctest::Approx(want).epsilon(1e-12));
  }
}
