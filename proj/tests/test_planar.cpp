#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pann/model.hpp"
#include "pann/planar.hpp"

using namespace pann;
using planar::CycleMode;
using planar::EquilibriumClass;
using planar::PlanarSystem;

TEST_CASE("planar equilibrium classification") {
  CHECK(planar::classify_planar_equilibrium(0.1, 0.1) ==
        EquilibriumClass::UnstableFocusNode);  // (1-0.1)/2 = 0.45 > 0.1
  CHECK(planar::classify_planar_equilibrium(0.9, 0.3) ==
        EquilibriumClass::StableFocusNode);
  CHECK(planar::classify_planar_equilibrium(0.06, 0.163) ==
        EquilibriumClass::UnstableFocusNode);
}

TEST_CASE("uniqueness-theorem monotonicity audit") {
  PlanarSystem sys{0.1, 0.1, planar::Form::Restriction1};
  const auto rep = planar::cycle_uniqueness_audit(sys, 1000);
  CHECK(rep.pass);
  CHECK(rep.sign_condition_ok);

  SUBCASE("grid refinement is self-consistent") {
    const auto fine = planar::cycle_uniqueness_audit(sys, 10000);
    CHECK(std::abs(fine.max_violation_left - rep.max_violation_left) < 1e-7);
    CHECK(std::abs(fine.max_violation_right - rep.max_violation_right) < 1e-7);
  }
  SUBCASE("sign condition is structural") {
    PlanarSystem stable{0.9, 0.3, planar::Form::Restriction1};
    const auto r2 = planar::cycle_uniqueness_audit(stable, 1000);
    CHECK(r2.sign_condition_ok);
  }
}

TEST_CASE("stable limit cycle of comparison system 1 at a = lambda = 0.1") {
  PlanarSystem sys{0.1, 0.1, planar::Form::Comparison1};
  const auto res = planar::find_limit_cycle(sys, CycleMode::Stable);
  REQUIRE(planar::found(res));
  const auto& cyc = std::get<planar::LimitCycle>(res);
  CHECK(cyc.stable);
  CHECK(cyc.period > 0.0);
  CHECK(std::abs(cyc.multiplier) < 1.0);
  CHECK(cyc.polyline.size() > 100);

  // Invariance: re-integrating one period from the anchor returns to it.
  planar::CycleSearchOptions opt;
  const auto back = planar::run_section_circuit(sys, false, cyc.section_s, +1,
                                                opt, cyc.anchor[0]);
  REQUIRE(back.ok);
  CHECK(std::abs(back.m_next - cyc.anchor[0]) < 1e-7);
}

TEST_CASE("rescaled form reaches the same cycle anchor") {
  // Time rescaling changes the clock, not the orbit.
  PlanarSystem plain{0.2, 0.15, planar::Form::Comparison1, false};
  PlanarSystem scaled{0.2, 0.15, planar::Form::Comparison1, true};
  const auto r1 = planar::find_limit_cycle(plain, CycleMode::Stable);
  const auto r2 = planar::find_limit_cycle(scaled, CycleMode::Stable);
  REQUIRE(planar::found(r1));
  REQUIRE(planar::found(r2));
  CHECK(std::abs(std::get<planar::LimitCycle>(r1).anchor[0] -
                 std::get<planar::LimitCycle>(r2).anchor[0]) < 1e-7);
}

TEST_CASE("no cycle around a stable equilibrium") {
  PlanarSystem sys{0.9, 0.3, planar::Form::Comparison1};
  const auto res = planar::find_limit_cycle(sys, CycleMode::Stable);
  REQUIRE_FALSE(planar::found(res));
  CHECK(std::get<planar::CycleFailure>(res).kind ==
        planar::CycleFailure::Kind::NotFound);
}

TEST_CASE("pure comparison systems carry no unstable cycle") {
  // reversed-time returns settle on the equilibrium instead and the
  // search reports that rather than inventing a cycle
  PlanarSystem sys{0.1, 0.1, planar::Form::Comparison1};
  const auto res = planar::find_limit_cycle(sys, CycleMode::Unstable);
  REQUIRE_FALSE(planar::found(res));
}

TEST_CASE("cycle location is independent of the start (20 random systems)") {
  std::mt19937_64 rng(31337ull);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  planar::CycleSearchOptions opt;
  int tested = 0;
  while (tested < 20) {
    const double a = 0.05 + 0.5 * u(rng);
    const double lam_max = 0.45 * (1.0 - a);
    if (lam_max < 0.09) continue;
    const double lam = 0.08 + (lam_max - 0.08) * u(rng);
    PlanarSystem sys{a, lam, planar::Form::Comparison1};
    const auto eq = sys.equilibrium();

    std::array<double, 3> starts{eq[0] * 0.999, eq[0] * 0.6, eq[0] * 0.25};
    std::array<double, 3> anchors{};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      auto fixed = planar::locate_return_fixed_point(
          [&](double m) {
            return planar::run_section_circuit(sys, false, sys.lambda, +1, opt,
                                               m);
          },
          starts[i], opt);
      if (std::holds_alternative<planar::CycleFailure>(fixed)) {
        ok = false;
        break;
      }
      anchors[i] = std::get<planar::ReturnMapCycle>(fixed).m_fixed;
    }
    REQUIRE(ok);
    CHECK(std::abs(anchors[0] - anchors[1]) < 1e-6 * (1.0 + anchors[0]));
    CHECK(std::abs(anchors[0] - anchors[2]) < 1e-6 * (1.0 + anchors[0]));
    ++tested;
  }
}

TEST_CASE("tangency crossings of a synthetic cycle") {
  // Circle of radius 1 around (m,s) = (2, 0.5) against the line m = 2:
  // crossings at s = 1.5 and s = -0.5.
  auto field = [](double, const ode::Vec<2>& y, ode::Vec<2>& dy) {
    dy[0] = -(y[1] - 0.5);
    dy[1] = y[0] - 2.0;
  };
  ode::Options<2> opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  const auto tr = ode::integrate<2>(field, {2.0, 1.5}, 0.0,
                                    2.0 * 3.14159265358979323846, opt);
  REQUIRE(tr.status == ode::Status::Completed);
  planar::LimitCycle cyc;
  cyc.dense = tr.steps;
  cyc.period = tr.t_end;
  const auto roots =
      planar::cycle_tangency_crossings(cyc, [](double) { return 2.0; });
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(roots[1] == doctest::Approx(-0.5).epsilon(1e-8));
}
