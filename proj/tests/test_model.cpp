#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pann/integrator.hpp"
#include "pann/model.hpp"

using namespace pann;
using model::Params;
using model::State;

namespace {

const Params kBase = model::base_params();

// Rejection-sample a parameter set satisfying the full assumption chain.
Params random_valid_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Params p;
    p.lambda1 = 0.05 + 0.6 * u(rng);
    p.lambda2 = p.lambda1 * (0.05 + 0.85 * u(rng));
    p.a1 = 0.02 + 0.6 * u(rng);
    p.a2 = p.a1 * (0.02 + 0.9 * u(rng));
    if (model::audit_assumptions(p).all_pass()) return p;
  }
}

}  // namespace

TEST_CASE("field vanishes at the boundary equilibria") {
  auto is_zero = [](const std::array<double, 3>& v) {
    return std::abs(v[0]) < 1e-10 && std::abs(v[1]) < 1e-10 &&
           std::abs(v[2]) < 1e-10;
  };
  CHECK(is_zero(model::eval_field(kBase, {0.0, 0.0, 1.0})));
  CHECK(is_zero(model::eval_field(kBase, {0.0, 0.0, 0.0})));
  // x1^0 = (1 - lambda1)(lambda1 + a1) = 0.18
  CHECK(is_zero(model::eval_field(kBase, {0.18, 0.0, 0.1})));
}

TEST_CASE("assumption audit") {
  SUBCASE("base parameters pass everything") {
    const auto rep = model::audit_assumptions(kBase);
    CHECK(rep.all_pass());
  }
  SUBCASE("swapped roles fail A5 and A7") {
    const auto rep = model::audit_assumptions(Params{0.0075, 0.1, 0.01, 0.1});
    CHECK_FALSE(rep.get("A5").pass);
    CHECK_FALSE(rep.get("A7").pass);
  }
  SUBCASE("lambda2 close to lambda1: tau computed by the audit") {
    // tau = (lambda2 a1 - lambda1 a2)/kappa0 = 0.00924/0.0926
    const Params p{0.1, 0.0075, 0.1, 0.0999};
    const auto d = model::derived(p);
    CHECK(d.tau == doctest::Approx(0.00924 / 0.0926).epsilon(1e-10));
    CHECK(model::audit_assumptions(p).get("A7").pass);  // tau < 0.0999 barely
  }
}

TEST_CASE("derived quantities of the base set") {
  const auto d = model::derived(kBase);
  CHECK(std::abs(d.tau - 0.00137) < 1e-5);
  CHECK(std::abs(d.kappa - 2.028) < 2e-3);
  CHECK(d.kappa0 == doctest::Approx(0.1825).epsilon(1e-14));
  CHECK(d.gamma_ratio == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // exact values
  CHECK(d.tau == doctest::Approx(0.00025 / 0.1825).epsilon(1e-14));
  CHECK(d.kappa == doctest::Approx(0.1825 / 0.09).epsilon(1e-14));
}

TEST_CASE("gamma ratio of one forces tau to zero") {
  // a2 = a1 lambda2 / lambda1
  const Params p{0.1, 0.01, 0.1, 0.01};
  const auto d = model::derived(p);
  CHECK(std::abs(d.tau) < 1e-16);
}

TEST_CASE("derived rejects degenerate parameters") {
  CHECK_THROWS_AS(model::derived(Params{0.1, 0.0075, 0.1, 0.1}),
                  std::domain_error);
}

TEST_CASE("scalar field bundle") {
  const model::FieldBundle f(kBase);
  SUBCASE("tangency curve meets the first isocline at its break-even level") {
    CHECK(std::abs(f.mstar(kBase.lambda1) - f.isocline(1, kBase.lambda1)) <
          1e-12);
    CHECK(f.mstar(kBase.lambda1) == doctest::Approx(0.18).epsilon(1e-12));
  }
  SUBCASE("curve roots at tau and 1") {
    CHECK(std::abs(f.mstar(f.d.tau)) < 1e-15);
    CHECK(std::abs(f.mstar(1.0)) < 1e-15);
  }
  SUBCASE("omega at s = 1/2") {
    CHECK(f.omega(0.5) == doctest::Approx(0.045 / 0.3045).epsilon(1e-12));
    CHECK(std::abs(f.omega(0.5) - 0.14778) < 1e-5);
  }
  SUBCASE("mstar(1/2) = 91/180") {
    CHECK(f.mstar(0.5) == doctest::Approx(91.0 / 180.0).epsilon(1e-12));
  }
  SUBCASE("negative s rejected") {
    CHECK_THROWS_AS(f.omega(-0.1), std::domain_error);
  }
}

TEST_CASE("omega positive on (0,1] when lambda1 > lambda2") {
  const model::FieldBundle f(kBase);
  for (int j = 1; j <= 1000; ++j) {
    const double s = static_cast<double>(j) / 1000.0;
    CHECK(f.omega(s) > 0.0);
  }
}

TEST_CASE("isocline and tangency-curve ordering") {
  const model::FieldBundle f(kBase);
  const double tau = f.d.tau;
  const double l1 = kBase.lambda1, l2 = kBase.lambda2;
  for (int j = 1; j < 1000; ++j) {
    const double s = static_cast<double>(j) / 1000.0;
    CHECK(f.isocline(1, s) > f.isocline(2, s));
    if (s > l1 && s < 1.0) CHECK(f.mstar(s) > f.isocline(1, s));
    if (s > l2 && s < l1) {
      CHECK(f.mstar(s) < f.isocline(1, s));
      CHECK(f.mstar(s) > f.isocline(2, s));
    }
    if (s > tau && s < l2) CHECK(f.mstar(s) < f.isocline(2, s));
  }
}

TEST_CASE("curve/isocline identity for 100 random valid parameter sets") {
  std::mt19937_64 rng(20250811ull);
  for (int k = 0; k < 100; ++k) {
    const Params p = random_valid_params(rng);
    const model::FieldBundle f(p);
    const double scale = std::max(1.0, f.mstar(p.lambda1));
    CHECK(std::abs(f.mstar(p.lambda1) - f.isocline(1, p.lambda1)) <
          1e-12 * scale);
    CHECK(std::abs(f.mstar(p.lambda2) - f.isocline(2, p.lambda2)) <
          1e-12 * scale);
  }
}

TEST_CASE("equilibria of the base set") {
  const auto eqs = model::equilibria(kBase);
  REQUIRE(eqs.size() == 4);

  for (const auto& e : eqs) {
    const auto v = model::eval_field(kBase, e.location);
    CHECK(std::hypot(v[0], v[1], v[2]) < 1e-10);
  }

  const auto& O = eqs[0];
  CHECK(O.kind == model::EquilibriumKind::O);
  CHECK(O.eigenvalues[0].real() < 0.0);  // x1 direction stable in s=0
  CHECK(O.eigenvalues[1].real() < 0.0);
  CHECK(O.eigenvalues[2].real() > 0.0);  // s direction unstable
  CHECK(O.classification.find("saddle") != std::string::npos);

  const auto& O1 = eqs[1];
  CHECK(O1.eigenvalues[0].real() > 0.0);
  CHECK(O1.eigenvalues[1].real() > 0.0);
  CHECK(O1.eigenvalues[2].real() < 0.0);

  const auto& P1 = eqs[2];
  CHECK(P1.location.x1 == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(P1.location.s == doctest::Approx(0.1).epsilon(1e-15));
  const auto& P2 = eqs[3];
  CHECK(P2.location.x2 == doctest::Approx(0.017325).epsilon(1e-12));
  CHECK(P2.location.s == doctest::Approx(0.01).epsilon(1e-15));

  // Both planar equilibria are in-plane unstable since lambda_i < (1-a_i)/2:
  // the in-plane eigenvalue pair has positive real part.
  CHECK(P1.eigenvalues[0].real() > 0.0);
  CHECK(P2.eigenvalues[0].real() > 0.0);
}

TEST_CASE("eigenvalue signs match the diagonal predictors") {
  std::mt19937_64 rng(414243ull);
  for (int k = 0; k < 25; ++k) {
    const Params p = random_valid_params(rng);
    const model::RationalFamily fam{p};
    const auto eqs = model::equilibria(p);
    // P1 transverse eigenvalue is phi2(lambda1); in-plane pair's real-part
    // sign follows h'(lambda1) - psi1'(lambda1) x1^0 when complex.
    const auto& P1 = eqs[2];
    CHECK(P1.eigenvalues[2].real() * fam.phi(2, p.lambda1) > 0.0);
    const auto& P2 = eqs[3];
    CHECK(P2.eigenvalues[2].real() * fam.phi(1, p.lambda2) > 0.0);
    const double d1 =
        fam.dh(p.lambda1) - fam.dpsi(1, p.lambda1) * P1.location.x1;
    if (P1.eigenvalues[0].imag() != 0.0)
      CHECK(P1.eigenvalues[0].real() * d1 > 0.0);
    const double d2 =
        fam.dh(p.lambda2) - fam.dpsi(2, p.lambda2) * P2.location.x2;
    if (P2.eigenvalues[0].imag() != 0.0)
      CHECK(P2.eigenvalues[0].real() * d2 > 0.0);
  }
}

TEST_CASE("extinction screen") {
  SUBCASE("base set is undetermined") {
    const auto r = model::extinction_check(kBase);
    CHECK(r.verdict == model::ExtinctionVerdict::Undetermined);
    // threshold = 0.0010075 / 0.009175
    CHECK(r.x1_threshold ==
          doctest::Approx(0.0010075 / 0.009175).epsilon(1e-12));
    CHECK(r.x1_threshold > kBase.lambda1);
  }
  SUBCASE("lambda1 below lambda2 kills x2") {
    const auto r = model::extinction_check(Params{0.1, 0.0075, 0.05, 0.1});
    CHECK(r.verdict == model::ExtinctionVerdict::X2Extinct);
  }
  SUBCASE("raising lambda1 past the threshold kills x1") {
    const auto r = model::extinction_check(Params{0.1, 0.0075, 0.12, 0.01});
    CHECK(r.verdict == model::ExtinctionVerdict::X1Extinct);
  }
}

TEST_CASE("iso-tangency parameter relation") {
  const auto d = model::derived(kBase);
  CHECK(model::iso_tangency_a(0.01, d.kappa, d.tau) ==
        doctest::Approx(0.0075).epsilon(1e-12));
  CHECK(model::iso_tangency_a(0.1, d.kappa, d.tau) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(model::iso_tangency_a(0.02, d.kappa, d.tau) ==
        doctest::Approx(0.0016 / 0.09).epsilon(1e-12));
  CHECK_THROWS_AS(model::iso_tangency_a(1e-5, 1.0001, 0.5),
                  std::domain_error);
}

TEST_CASE("iso-tangency round trip for 100 random valid sets") {
  std::mt19937_64 rng(777ull);
  for (int k = 0; k < 100; ++k) {
    const Params p = random_valid_params(rng);
    const auto d = model::derived(p);
    CHECK(std::abs(model::iso_tangency_a(p.lambda1, d.kappa, d.tau) - p.a1) <
          1e-12 * (1.0 + p.a1));
    CHECK(std::abs(model::iso_tangency_a(p.lambda2, d.kappa, d.tau) - p.a2) <
          1e-12 * (1.0 + p.a2));
  }
}

TEST_CASE("coordinate transform") {
  SUBCASE("single-predator axis") {
    const auto t = model::to_transformed({0.18, 0.0, 0.1});
    CHECK(t.m == doctest::Approx(0.18));
    CHECK(t.xi == doctest::Approx(1.0));
    CHECK(t.s == doctest::Approx(0.1));
  }
  SUBCASE("symmetric point") {
    const auto t = model::to_transformed({0.09, 0.09, 0.5});
    CHECK(t.m == doctest::Approx(0.18));
    CHECK(t.xi == doctest::Approx(0.5));
  }
  SUBCASE("m = 0 is rejected") {
    CHECK_THROWS_AS(model::to_transformed({0.0, 0.0, 0.3}), std::domain_error);
  }
  SUBCASE("round trip to 1e-14") {
    std::mt19937_64 rng(99ull);
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    for (int k = 0; k < 50; ++k) {
      const State st{u(rng), u(rng), u(rng)};
      const auto back = model::from_transformed(model::to_transformed(st));
      CHECK(std::abs(back.x1 - st.x1) < 1e-14 * (1.0 + st.x1));
      CHECK(std::abs(back.x2 - st.x2) < 1e-14 * (1.0 + st.x2));
      CHECK(back.s == st.s);
    }
  }
  SUBCASE("transformed field agrees with the chain-rule pushforward") {
    const State st{0.1, 0.05, 0.3};
    const auto ts = model::to_transformed(st);
    const auto dv = model::eval_field(kBase, st);
    // m' = x1' + x2'; xi' = (x1' - xi (x1'+x2'))/m; s' = s'
    const double dm = dv[0] + dv[1];
    const double dxi = (dv[0] - ts.xi * dm) / ts.m;
    const auto tv = model::eval_transformed_field(kBase, ts);
    CHECK(std::abs(tv[0] - dm) < 1e-12);
    CHECK(std::abs(tv[1] - dxi) < 1e-12);
    CHECK(std::abs(tv[2] - dv[2]) < 1e-12);
  }
}

TEST_CASE("octant invariance along trajectories") {
  std::mt19937_64 rng(5150ull);
  std::uniform_real_distribution<double> u(0.01, 0.8);
  auto field = [&](double, const ode::Vec<3>& y, ode::Vec<3>& dy) {
    const auto v = model::eval_field(kBase, {y[0], y[1], y[2]});
    dy = {v[0], v[1], v[2]};
  };
  ode::Options<3> opt;
  opt.rtol = 1e-9;
  opt.atol = 1e-60;
  opt.positive = {true, true, true};
  opt.keep_dense = false;
  for (int k = 0; k < 50; ++k) {
    const ode::Vec<3> y0{u(rng), u(rng), u(rng)};
    const auto tr = ode::integrate<3>(field, y0, 0.0, 200.0, opt);
    REQUIRE(tr.status == ode::Status::Completed);
    CHECK(tr.y_end[0] >= 0.0);
    CHECK(tr.y_end[1] >= 0.0);
    CHECK(tr.y_end[2] >= 0.0);
  }
}
