#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pann/annulus.hpp"
#include "pann/geometry.hpp"
#include "pann/model.hpp"

using namespace pann;
using annulus::GluedSystem;
using model::Params;

namespace {

const Params kBase = model::base_params();

Params iso_case(double lambda2) {
  const auto d = model::derived(kBase);
  Params p = kBase;
  p.lambda2 = lambda2;
  p.a2 = model::iso_tangency_a(lambda2, d.kappa, d.tau);
  return p;
}

}  // namespace

TEST_CASE("scalar products against the closed forms") {
  std::mt19937_64 rng(8712ull);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const model::State st{u(rng), u(rng), u(rng)};
    const auto sg = annulus::integral_surface_signs(kBase, st);
    const double scale = 1.0 + std::abs(sg.dot1_raw) + std::abs(sg.dot2_raw);
    CHECK(std::abs(sg.dot1_raw - sg.dot1_closed) < 1e-12 * scale);
    CHECK(std::abs(sg.dot2_raw - sg.dot2_closed) < 1e-12 * scale);
  }
}

TEST_CASE("scalar products vanish on the tangency curve") {
  const model::FieldBundle f(kBase);
  for (int k = 1; k < 40; ++k) {
    const double s = f.d.tau + (1.0 - f.d.tau) * k / 40.0;
    const double m = f.mstar(s);
    for (double xi : {0.25, 0.5, 0.9}) {
      const model::State st{m * xi, m * (1.0 - xi), s};
      const auto sg = annulus::integral_surface_signs(kBase, st);
      CHECK(std::abs(sg.dot1_raw) < 1e-12);
      CHECK(std::abs(sg.dot2_raw) < 1e-12);
    }
  }
}

TEST_CASE("sign pattern outside the curve") {
  const model::FieldBundle f(kBase);
  const double s = 0.5;
  const double m = f.mstar(s) * 1.5;
  const auto sg = annulus::integral_surface_signs(kBase, {0.4 * m, 0.6 * m, s});
  CHECK(sg.dot1_raw > 0.0);
  CHECK(sg.dot2_raw < 0.0);
  const auto edge = annulus::integral_surface_signs(kBase, {m, 0.0, s});
  CHECK(std::abs(edge.dot1_raw) < 1e-14);
}

TEST_CASE("glued field region selection and collinearity") {
  const auto inner = GluedSystem::make(GluedSystem::Kind::Inner, kBase);
  const auto outer = GluedSystem::make(GluedSystem::Kind::Outer, kBase);

  const double s = 0.5;
  const double above = inner.mstar(s) * 1.2;
  const double below = inner.mstar(s) * 0.8;
  {
    double dm, ds;
    inner.comparison_field(1, above, s, dm, ds);
    const auto g = inner.glued_field(above, s);
    CHECK(g[0] == dm);
    CHECK(g[1] == ds);
  }
  {
    double dm, ds;
    outer.comparison_field(2, above, s, dm, ds);
    const auto g = outer.glued_field(above, s);
    CHECK(g[0] == dm);
    CHECK(g[1] == ds);
  }
  {
    double dm, ds;
    inner.comparison_field(2, below, s, dm, ds);
    const auto g = inner.glued_field(below, s);
    CHECK(g[0] == dm);
    CHECK(g[1] == ds);
  }

  const auto d = model::derived(kBase);
  for (int k = 1; k < 1000; ++k) {
    const double sk = d.tau + (1.0 - d.tau) * k / 1000.0;
    const double mk = inner.mstar(sk);
    double d1m, d1s, d2m, d2s;
    inner.comparison_field(1, mk, sk, d1m, d1s);
    inner.comparison_field(2, mk, sk, d2m, d2s);
    const double cross = d1m * d2s - d1s * d2m;
    const double scale = std::hypot(d1m, d1s) * std::hypot(d2m, d2s);
    CHECK(std::abs(cross) <= 1e-9 * (scale > 0.0 ? scale : 1.0));
  }
}

TEST_CASE("sliding-segment endpoints are the comparison equilibria") {
  std::mt19937_64 rng(5151ull);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 40) {
    Params p;
    p.lambda1 = 0.05 + 0.6 * u(rng);
    p.lambda2 = p.lambda1 * (0.1 + 0.8 * u(rng));
    p.a1 = 0.02 + 0.6 * u(rng);
    p.a2 = p.a1 * (0.05 + 0.9 * u(rng));
    if (!model::audit_assumptions(p).all_pass()) continue;
    const auto seg = annulus::segment_a(p);
    const model::FieldBundle f(p);
    CHECK(std::abs(seg.o1[0] - f.isocline(1, p.lambda1)) < 1e-12);
    CHECK(seg.o1[1] == p.lambda1);
    CHECK(std::abs(seg.o2[0] - f.isocline(2, p.lambda2)) < 1e-12);
    ++tested;
  }
}

TEST_CASE("segment-A distance") {
  const auto sys = GluedSystem::make(GluedSystem::Kind::Inner, kBase);
  const auto seg = annulus::segment_a(kBase);
  CHECK(annulus::segment_a_distance(sys, seg.o1[0], seg.o1[1]) < 1e-14);
  const double smid = 0.5 * (kBase.lambda1 + kBase.lambda2);
  const double d0 =
      annulus::segment_a_distance(sys, sys.mstar(smid) + 0.01, smid);
  CHECK(d0 <= 0.01 + 1e-12);
  CHECK(d0 > 1e-4);
  geom::Pt cl;
  annulus::segment_a_distance(sys, 1.0, 0.9, &cl);
  CHECK(cl[1] == doctest::Approx(kBase.lambda1));
}

TEST_CASE("outer boundary construction at the base parameters") {
  const auto res = annulus::build_outer_boundary(kBase);
  REQUIRE(std::holds_alternative<annulus::OuterBoundary>(res));
  const auto& b = std::get<annulus::OuterBoundary>(res);

  CHECK(b.L1[1] < kBase.lambda2);
  CHECK(b.L2[1] > kBase.lambda1);
  CHECK(b.t_L1 > b.t_anchor);
  CHECK(b.t_L2 > b.t_L1);
  CHECK(b.polyline.size() > 1000);
  CHECK(b.orbit_points <= b.polyline.size());

  const auto probe = geom::decimate(b.polyline, 1e-7);
  CHECK_FALSE(geom::self_intersects(probe, 64));
  const auto seg = annulus::segment_a(kBase);
  CHECK(geom::point_in_polygon(probe, seg.o2));
  const geom::Pt mid{0.5 * (seg.o1[0] + seg.o2[0]),
                     0.5 * (seg.o1[1] + seg.o2[1])};
  CHECK(geom::point_in_polygon(probe, mid));
}

TEST_CASE("swapped gluing fails the construction (negative control)") {
  const auto res =
      annulus::build_outer_boundary(kBase, {}, GluedSystem::Kind::Inner);
  REQUIRE(std::holds_alternative<annulus::ConstructionFailure>(res));
}

TEST_CASE("inner boundary at the base parameters") {
  const auto res = annulus::build_inner_boundary(kBase);
  REQUIRE(std::holds_alternative<planar::LimitCycle>(res));
  const auto& cyc = std::get<planar::LimitCycle>(res);
  CHECK(cyc.stable);
  CHECK(std::abs(cyc.multiplier) < 1.0);
  CHECK(cyc.period > 0.0);

  const model::FieldBundle f(kBase);
  const auto roots = planar::cycle_tangency_crossings(
      cyc, [&](double s) { return f.mstar(s); });
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - 0.85) < 0.015);
}

TEST_CASE("start point M sits on the curve above the break-even band") {
  const auto m = annulus::choose_start_point_m(kBase);
  REQUIRE(std::holds_alternative<geom::Pt>(m));
  const auto pt = std::get<geom::Pt>(m);
  const model::FieldBundle f(kBase);
  CHECK(std::abs(pt[0] - f.mstar(pt[1])) < 1e-8);
  CHECK(pt[1] > kBase.lambda1);
}

TEST_CASE("spiral parameter set: orbit of M reaches the sliding segment") {
  const Params spiral{0.5, 0.002, 0.38, 0.2};
  const auto res = annulus::build_inner_boundary(spiral);
  REQUIRE(std::holds_alternative<annulus::NotCorrectEvidence>(res));
  const auto& ev = std::get<annulus::NotCorrectEvidence>(res);
  CHECK(ev.min_dist_to_a <= 1e-4);
}

TEST_CASE("inner boundary lies strictly inside the outer boundary") {
  const auto geo = annulus::annulus_geometry(kBase);
  REQUIRE(geo.outer.has_value());
  REQUIRE(geo.inner_cycle.has_value());
  const auto outer_poly = geom::decimate(geo.outer->polyline, 1e-7);
  for (std::size_t i = 0; i < geo.inner_cycle->size(); i += 5) {
    CHECK(geom::point_in_polygon(outer_poly, (*geo.inner_cycle)[i]));
  }
}

TEST_CASE("classification of the named parameter sets") {
  CHECK(annulus::classify(kBase, 1e-4, false).verdict ==
        annulus::Verdict::CorrectlyDefined);
  CHECK(annulus::classify(iso_case(0.02), 1e-4, false).verdict ==
        annulus::Verdict::CorrectlyDefined);
  CHECK(annulus::classify(Params{0.5, 0.002, 0.38, 0.2}, 1e-4, false).verdict ==
        annulus::Verdict::NotCorrect);
  CHECK(annulus::classify(Params{0.2, 0.01, 0.45, 0.2}, 1e-4, false).verdict ==
        annulus::Verdict::NotCorrect);
}

TEST_CASE("unstable cycle: reversed-time and bracketed routes agree") {
  const auto cl = annulus::classify(kBase, 1e-4, true);
  REQUIRE(cl.unstable_cycle.has_value());
  CHECK(std::abs(cl.unstable_cycle->multiplier) > 1.0);

  const auto sys = GluedSystem::make(GluedSystem::Kind::Inner, kBase);
  REQUIRE(cl.inner_cycle.has_value());
  const double m_lo = cl.inner_cycle->anchor[0] * 1.5;
  const double m_hi = (1.0 - kBase.lambda1) * (kBase.lambda1 + kBase.a2) * 0.98;
  const auto br = annulus::find_glued_cycle_bracketed(sys, m_lo, m_hi);
  REQUIRE(planar::found(br));
  const auto& bc = std::get<planar::LimitCycle>(br);
  CHECK_FALSE(bc.stable);

  // The routes anchor on different branches; compare the orbits through
  // their largest tangency crossing and the period.
  const model::FieldBundle f(kBase);
  const auto r1 = planar::cycle_tangency_crossings(
      *cl.unstable_cycle, [&](double s) { return f.mstar(s); });
  const auto r2 = planar::cycle_tangency_crossings(
      bc, [&](double s) { return f.mstar(s); });
  REQUIRE_FALSE(r1.empty());
  REQUIRE_FALSE(r2.empty());
  CHECK(std::abs(r1[0] - r2[0]) < 1e-7);
  CHECK(std::abs(cl.unstable_cycle->period - bc.period) < 1e-5);
}

TEST_CASE("boundary-orbit directionality for the lifted field") {
  // Along the outer boundary's orbit arc the full field never points
  // outward for any predator fraction: the projection is a convex
  // combination of one tangent and one inward comparison field.
  const auto res = annulus::build_outer_boundary(kBase);
  REQUIRE(std::holds_alternative<annulus::OuterBoundary>(res));
  const auto& b = std::get<annulus::OuterBoundary>(res);

  const auto probe = geom::decimate(b.polyline, 1e-7);
  const double orientation = geom::signed_area(probe) > 0.0 ? 1.0 : -1.0;

  std::mt19937_64 rng(777123ull);
  std::uniform_real_distribution<double> uxi(0.05, 0.95);
  std::size_t checked = 0;
  for (std::size_t i = 50; i + 50 < b.orbit_points && checked < 4000;
       i += 7, ++checked) {
    const auto& a = b.polyline[i];
    const auto& c = b.polyline[i + 1];
    const double tx = c[0] - a[0], ty = c[1] - a[1];
    const double nrm = std::hypot(tx, ty);
    if (nrm < 1e-12) continue;
    const double nx = orientation * ty / nrm;
    const double ny = -orientation * tx / nrm;
    const double xi = uxi(rng);
    const auto v = model::eval_transformed_field(
        kBase, model::TransformedState{a[0], xi, a[1]});
    const double dot = v[0] * nx + v[2] * ny;
    const double scale = std::hypot(v[0], v[2]);
    CHECK(dot <= 1e-9 * (1.0 + scale));
  }
  CHECK(checked > 1000);
}

TEST_CASE("random starts near the boundary stay inside (full system)") {
  const auto geo = annulus::annulus_geometry(kBase);
  REQUIRE(geo.outer.has_value());
  REQUIRE(geo.inner_cycle.has_value());
  const auto outer_poly = geom::decimate(geo.outer->polyline, 1e-6);
  const auto inner_poly = geom::decimate(*geo.inner_cycle, 1e-6);

  auto inside = [&](double m, double s) {
    const geom::Pt q{m, s};
    if (!geom::point_in_polygon(outer_poly, q)) return false;
    return !geom::point_in_polygon(inner_poly, q);
  };

  std::mt19937_64 rng(424242ull);
  std::uniform_real_distribution<double> um(0.0, 1.3), us(0.0, 1.0),
      uxi(0.05, 0.95);
  int run = 0;
  while (run < 20) {
    const double m = um(rng), s = us(rng);
    if (!inside(m, s)) continue;
    const double xi = uxi(rng);
    ode::Vec<3> y{m * xi, m * (1.0 - xi), s};
    auto field = [&](double, const ode::Vec<3>& yy, ode::Vec<3>& dy) {
      const auto v = model::eval_field(kBase, {yy[0], yy[1], yy[2]});
      dy = {v[0], v[1], v[2]};
    };
    ode::Options<3> opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-60;
    opt.positive = {true, true, true};
    opt.keep_dense = false;
    bool ok = true;
    for (int chunk = 0; chunk < 100 && ok; ++chunk) {
      const auto tr = ode::integrate<3>(field, y, 0.0, 1.0, opt);
      REQUIRE(tr.status == ode::Status::Completed);
      y = tr.y_end;
      const double mm = y[0] + y[1];
      if (!inside(mm, y[2])) {
        double dist = 1e300;
        for (std::size_t i = 0; i + 1 < outer_poly.size(); ++i)
          dist = std::min(dist,
                          geom::point_segment_dist({mm, y[2]}, outer_poly[i],
                                                   outer_poly[i + 1]));
        for (std::size_t i = 0; i + 1 < inner_poly.size(); ++i)
          dist = std::min(dist,
                          geom::point_segment_dist({mm, y[2]}, inner_poly[i],
                                                   inner_poly[i + 1]));
        ok = dist < 1e-4;
      }
    }
    CHECK(ok);
    ++run;
  }
}
