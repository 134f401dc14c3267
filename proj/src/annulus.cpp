#include "pann/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pann::annulus {

using planar::Vec2;

SurfaceSigns integral_surface_signs(const model::Params& p, const model::State& st) {
  const model::RationalFamily fam{p};
  const double m = st.x1 + st.x2;
  const auto F = model::eval_field(p, st);

  SurfaceSigns out;
  for (int i = 1; i <= 2; ++i) {
    // outer normal (-H_i, -H_i, m phi_i) of the comparison integral surface
    const double Hi = fam.h(st.s) - m * fam.psi(i, st.s);
    const double ni3 = m * fam.phi(i, st.s);
    const double dot = -Hi * F[0] - Hi * F[1] + ni3 * F[2];
    if (i == 1)
      out.dot1_raw = dot;
    else
      out.dot2_raw = dot;
  }
  const double omega =
      st.s * (p.lambda1 - p.lambda2) / ((st.s + p.a1) * (st.s + p.a2));
  const double l =
      fam.h(st.s) * (fam.phi(2, st.s) - fam.phi(1, st.s)) - omega * m;
  out.dot1_closed = -l * st.x2;
  out.dot2_closed = l * st.x1;
  return out;
}

// ---------------------------------------------------------------------------

double segment_a_distance(const GluedSystem& sys, double m, double s,
                          Pt* closest) {
  const double lo = sys.p.lambda2, hi = sys.p.lambda1;
  auto d2 = [&](double sig) {
    const double dm = m - sys.mstar(sig);
    const double ds = s - sig;
    return dm * dm + ds * ds;
  };
  // Newton on the squared-distance derivative, clamped to the arc.
  double sig = std::clamp(s, lo, hi);
  for (int it = 0; it < 6; ++it) {
    const double ms = sys.mstar(sig);
    const double msp = sys.dmstar(sig);
    const double g = -(m - ms) * msp - (s - sig);
    const double gp = msp * msp + (m - ms) * 2.0 * sys.d.kappa + 1.0;
    if (gp <= 0.0) break;
    sig = std::clamp(sig - g / gp, lo, hi);
  }
  double best = d2(sig);
  double best_sig = sig;
  for (double cand : {lo, hi, 0.5 * (lo + hi)}) {
    const double v = d2(cand);
    if (v < best) {
      best = v;
      best_sig = cand;
    }
  }
  if (closest) *closest = {sys.mstar(best_sig), best_sig};
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------

namespace {

struct LegField {
  const GluedSystem* sys;
  int comparison;
  double sign;
  void operator()(double, const Vec2& y, Vec2& dy) const {
    double dm, ds;
    sys->comparison_field(comparison, y[0], y[1], dm, ds);
    dy = {sign * dm, sign * ds};
  }
};

}  // namespace

GluedPath integrate_glued(const GluedSystem& sys, double m0, double s0,
                          std::optional<int> region0, const GluedOptions& opt) {
  GluedPath path;
  double t = 0.0;
  double m = m0, s = s0;
  int region = region0 ? *region0 : sys.region_of(m, s);

  int tiny_legs = 0;
  const bool monitor_a = opt.a_proximity_tol > 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  Pt min_pt{};

  for (int leg = 0; leg < opt.max_legs; ++leg) {
    if (t >= opt.t_max) {
      path.outcome = GluedPath::Outcome::TimeEnd;
      break;
    }
    // Correct stale region bookkeeping away from the curve.
    {
      const double g = m - sys.mstar(s);
      if (std::abs(g) > 1e-10 * (1.0 + std::abs(m)) &&
          sys.region_of(m, s) != region)
        region = sys.region_of(m, s);
    }

    LegField field{&sys, sys.comparison_for(region),
                   opt.reversed ? -1.0 : 1.0};

    ode::Options<2> o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.positive = {true, true};
    o.keep_dense = opt.keep_dense;

    std::vector<ode::EventSpec<2>> ev;
    ev.push_back(
        {[&sys](double, const Vec2& y) { return y[0] - sys.mstar(y[1]); }, 0});
    for (const auto& sec : opt.sections)
      ev.push_back(
          {[sv = sec.s_value](double, const Vec2& y) { return y[1] - sv; },
           sec.direction});
    if (monitor_a) {
      ev.push_back(
          {[&sys, &min_dist, &min_pt, tol = opt.a_proximity_tol](
               double, const Vec2& y) {
             Pt cl;
             const double dd = segment_a_distance(sys, y[0], y[1], &cl);
             if (dd < min_dist) {
               min_dist = dd;
               min_pt = {y[0], y[1]};
             }
             return dd - tol;
           },
           -1});
    }

    const auto tr = ode::integrate<2>(field, Vec2{m, s}, 0.0, opt.t_max - t, o,
                                      ev, ode::StopAtEvent{0, 1});

    const bool curve_stop = tr.status == ode::Status::EventStop;

    // First proximity entry of this leg, if any.
    std::optional<ode::EventRecord<2>> prox_hit;
    for (const auto& e : tr.events) {
      if (monitor_a && e.id == opt.sections.size() + 1 && !e.tangential &&
          e.direction < 0) {
        prox_hit = e;
        break;
      }
    }
    if (prox_hit && (!curve_stop || prox_hit->t <= tr.t_end)) {
      path.outcome = GluedPath::Outcome::AContact;
      path.t_end = t + prox_hit->t;
      path.m_end = prox_hit->y[0];
      path.s_end = prox_hit->y[1];
      path.min_dist_to_a = std::min(min_dist, opt.a_proximity_tol);
      path.closest_to_a = {prox_hit->y[0], prox_hit->y[1]};
      if (opt.keep_dense)
        for (auto ds_ : tr.steps) {
          ds_.t0 += t;
          path.dense.push_back(ds_);
        }
      return path;
    }

    for (const auto& e : tr.events) {
      if (e.id == 0 || e.tangential) continue;
      if (monitor_a && e.id == opt.sections.size() + 1) continue;
      SectionHit hit;
      hit.section_id = e.id - 1;
      hit.t = t + e.t;
      hit.m = e.y[0];
      hit.s = e.y[1];
      hit.direction = e.direction;
      path.section_hits.push_back(hit);
    }
    if (opt.keep_dense)
      for (auto ds_ : tr.steps) {
        ds_.t0 += t;
        path.dense.push_back(ds_);
      }

    // Stop-at-section policy.
    if (opt.stop_at_section) {
      const auto [target_id, occurrence] = *opt.stop_at_section;
      std::size_t count = 0;
      for (const auto& hit : path.section_hits) {
        if (hit.section_id == target_id && ++count >= occurrence) {
          path.outcome = GluedPath::Outcome::SectionStop;
          path.t_end = hit.t;
          path.m_end = hit.m;
          path.s_end = hit.s;
          const double tcut = hit.t;
          while (!path.section_hits.empty() &&
                 path.section_hits.back().t > tcut)
            path.section_hits.pop_back();
          path.min_dist_to_a = min_dist;
          path.closest_to_a = min_pt;
          return path;
        }
      }
    }

    if (!curve_stop) {
      t += tr.t_end;
      m = tr.y_end[0];
      s = tr.y_end[1];
      if (tr.status == ode::Status::Completed) {
        path.outcome = GluedPath::Outcome::TimeEnd;
      } else {
        path.outcome = GluedPath::Outcome::Failure;
        path.message = std::string("leg failed: ") + to_string(tr.status) +
                       (tr.message.empty() ? "" : " (" + tr.message + ")");
      }
      break;
    }

    const ode::EventRecord<2>* stop_rec = nullptr;
    for (const auto& e : tr.events)
      if (e.id == 0 && !e.tangential) stop_rec = &e;
    if (!stop_rec) {
      path.outcome = GluedPath::Outcome::Failure;
      path.message = "curve stop without a crossing record";
      break;
    }

    t += stop_rec->t;
    m = stop_rec->y[0];
    s = stop_rec->y[1];

    // Contact with the sliding segment: the glued orbit is undefined there.
    if (s > sys.p.lambda2 + 1e-12 && s < sys.p.lambda1 - 1e-12) {
      path.outcome = GluedPath::Outcome::AContact;
      path.t_end = t;
      path.m_end = m;
      path.s_end = s;
      path.min_dist_to_a = 0.0;
      path.closest_to_a = {m, s};
      return path;
    }

    CurveCrossing cr;
    cr.t = t;
    cr.m = m;
    cr.s = s;
    cr.direction = stop_rec->direction;
    path.crossings.push_back(cr);
    region = stop_rec->direction > 0 ? +1 : -1;

    if (stop_rec->t < 1e-12) {
      if (++tiny_legs >= 3) {
        path.outcome = GluedPath::Outcome::Failure;
        path.message = "chattering at the gluing curve";
        break;
      }
    } else {
      tiny_legs = 0;
    }

    if (opt.stop_check) {
      path.t_end = t;
      path.m_end = m;
      path.s_end = s;
      path.min_dist_to_a = min_dist;
      path.closest_to_a = min_pt;
      if (opt.stop_check(path)) {
        path.outcome = GluedPath::Outcome::CheckStop;
        return path;
      }
    }
  }

  path.t_end = t;
  path.m_end = m;
  path.s_end = s;
  path.min_dist_to_a = min_dist;
  path.closest_to_a = min_pt;
  return path;
}

// ---------------------------------------------------------------------------
// Outer boundary

OuterResult build_outer_boundary(const model::Params& p,
                                 const GluedOptions& opt_in,
                                 GluedSystem::Kind kind) {
  GluedSystem sys;
  try {
    sys = GluedSystem::make(kind, p);
  } catch (const std::exception& e) {
    return ConstructionFailure{"outer", e.what()};
  }

  // The separatrix leaves the planar saddle at (m, s) = (0, 1) along the
  // unstable eigendirection of whichever comparison field owns that side.
  const model::RationalFamily fam{p};
  double start_m = 0.0, start_s = 0.0;
  int region = 0;
  bool picked = false;
  for (int candidate_region : {-1, +1}) {
    const int c = sys.comparison_for(candidate_region);
    const double phi1 = fam.phi(c, 1.0);
    const double psi1 = fam.psi(c, 1.0);
    if (phi1 <= 0.0) continue;
    double vm = 1.0;
    double vs = -psi1 / (1.0 + phi1);
    const double nrm = std::hypot(vm, vs);
    vm /= nrm;
    vs /= nrm;
    const double offset = 1e-7;
    const double sm = offset * vm;
    const double ss = 1.0 + offset * vs;
    if (sys.region_of(sm, ss) == candidate_region) {
      start_m = sm;
      start_s = ss;
      region = candidate_region;
      picked = true;
      break;
    }
  }
  if (!picked)
    return ConstructionFailure{"outer",
                               "no consistent separatrix eigendirection"};

  GluedOptions opt = opt_in;
  opt.keep_dense = true;
  opt.sections = {{p.lambda1, -1}};  // downward passage of s = lambda1
  opt.stop_check = [](const GluedPath& pp) {
    if (pp.section_hits.empty()) return false;
    const double t_pass = pp.section_hits.front().t;
    std::size_t after = 0;
    for (const auto& c : pp.crossings)
      if (c.t > t_pass) ++after;
    return after >= 2;
  };

  const GluedPath path = integrate_glued(sys, start_m, start_s, region, opt);
  if (path.outcome == GluedPath::Outcome::AContact)
    return ConstructionFailure{"outer",
                               "separatrix reached the sliding segment"};
  if (path.outcome == GluedPath::Outcome::Failure)
    return ConstructionFailure{"outer", path.message};
  if (path.section_hits.empty())
    return ConstructionFailure{"outer", "no s = lambda1 passage"};

  const double t_pass = path.section_hits.front().t;
  const CurveCrossing* anchor = nullptr;
  const CurveCrossing* l1 = nullptr;
  const CurveCrossing* l2 = nullptr;
  for (const auto& c : path.crossings) {
    if (c.t < t_pass) {
      anchor = &c;
    } else if (!l1) {
      l1 = &c;
    } else if (!l2) {
      l2 = &c;
      break;
    }
  }
  if (!l1 || !l2)
    return ConstructionFailure{"outer",
                               "separatrix did not return to the curve"};
  if (!(l1->direction < 0 && l1->s < p.lambda2)) {
    std::ostringstream os;
    os << "first crossing after the passage is not below the sliding segment"
       << " (s = " << l1->s << ", direction = " << l1->direction << ")";
    return ConstructionFailure{"outer", os.str()};
  }
  if (!(l2->direction > 0 && l2->s > p.lambda1)) {
    std::ostringstream os;
    os << "second crossing after the passage does not exit above the sliding"
       << " segment (s = " << l2->s << ", direction = " << l2->direction
       << ")";
    return ConstructionFailure{"outer", os.str()};
  }

  OuterBoundary out;
  out.t_anchor = anchor ? anchor->t : 0.0;
  out.anchor = anchor ? Pt{anchor->m, anchor->s} : Pt{0.0, 1.0};
  out.L1 = {l1->m, l1->s};
  out.L2 = {l2->m, l2->s};
  out.t_L1 = l1->t;
  out.t_L2 = l2->t;
  const double s_close_hi = anchor ? anchor->s : 1.0;
  // The separatrix often lands back within roundoff of its departure point
  // (the loop contraction per circuit can be enormous); the closing arc then
  // degenerates to the seam itself.
  if (l2->s > s_close_hi + 1e-6)
    return ConstructionFailure{"outer", "closing curve arc is inverted"};

  // Orbit arc from the anchor to L2, then the tangency-curve arc back.
  const auto arc =
      planar::resample_polyline(path.dense, out.t_anchor, out.t_L2, 1e-3);
  for (const auto& q : arc) out.polyline.push_back({q[1], q[2]});
  out.orbit_points = out.polyline.size();
  if (l2->s < s_close_hi - 1e-7) {
    const double span = s_close_hi - l2->s;
    const double slope = std::abs(sys.dmstar(0.5 * (s_close_hi + l2->s)));
    const int n = std::max(
        32,
        static_cast<int>(std::ceil(span * std::sqrt(1.0 + slope * slope) /
                                   1e-3)));
    for (int j = 1; j < n; ++j) {
      const double s = l2->s + span * static_cast<double>(j) / n;
      out.polyline.push_back({sys.mstar(s), s});
    }
  }

  const auto probe = geom::decimate(out.polyline, 1e-7);
  if (geom::self_intersects(probe, 64))
    return ConstructionFailure{"outer", "boundary polyline self-intersects"};

  // Invariance of the closing arc: on the s > lambda1 flank the flow crosses
  // the curve from inside to outside, so the enclosed region must lie on the
  // outside of the curve there. A gluing mix-up builds a closed polyline
  // whose closing arc is crossed outward instead; reject it.
  if (s_close_hi - l2->s > 1e-3) {
    const double s_mid = 0.5 * (s_close_hi + l2->s);
    const double msp = sys.dmstar(s_mid);
    const double nrm = std::hypot(1.0, msp);
    const double offset = 5e-3;
    const Pt above{sys.mstar(s_mid) + offset / nrm,
                   s_mid - offset * msp / nrm};
    if (!geom::point_in_polygon(probe, above))
      return ConstructionFailure{
          "outer",
          "closing curve arc is crossed outward; the region is not invariant"};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Start point M and the inner boundary

std::variant<Pt, ConstructionFailure> choose_start_point_m(
    const model::Params& p, const planar::CycleSearchOptions& copt) {
  if (planar::classify_planar_equilibrium(p.a2, p.lambda2) ==
      planar::EquilibriumClass::StableFocusNode)
    return ConstructionFailure{
        "inner",
        "comparison system 2 has no planar cycle (stable equilibrium)"};

  planar::PlanarSystem comp2{p.a2, p.lambda2, planar::Form::Comparison2};
  const auto cyc =
      planar::find_limit_cycle(comp2, planar::CycleMode::Stable, copt);
  if (!planar::found(cyc))
    return ConstructionFailure{
        "inner", "comparison-2 cycle location failed: " +
                     std::get<planar::CycleFailure>(cyc).message};
  const double m_c = std::get<planar::LimitCycle>(cyc).anchor[0];

  // One circuit from just inside the planar cycle, recording every
  // tangency-curve crossing; M is the one with the largest s.
  const model::Derived d = model::derived(p);
  auto mstar = [&](double s) { return d.kappa * (1.0 - s) * (s - d.tau); };
  auto field = [&](double, const Vec2& y, Vec2& dy) {
    double dm, ds;
    comp2.field(y[0], y[1], dm, ds);
    dy = {dm, ds};
  };
  ode::Options<2> o;
  o.rtol = copt.rtol;
  o.atol = copt.atol;
  o.positive = {true, true};
  o.keep_dense = false;
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[&](double, const Vec2& y) { return y[0] - mstar(y[1]); }, 0});
  ev.push_back({[&](double, const Vec2& y) { return y[1] - p.lambda2; }, +1});
  const auto tr =
      ode::integrate<2>(field, Vec2{m_c * (1.0 + 1e-3), p.lambda2}, 0.0,
                        copt.circuit_t_max, o, ev, ode::StopAtEvent{1, 1});
  if (tr.status != ode::Status::EventStop)
    return ConstructionFailure{"inner",
                               "comparison-2 circuit for M did not close"};
  Pt best{};
  bool got = false;
  for (const auto& e : tr.events) {
    if (e.id != 0 || e.tangential) continue;
    if (!got || e.y[1] > best[1]) {
      best = {e.y[0], e.y[1]};
      got = true;
    }
  }
  if (!got)
    return ConstructionFailure{"inner",
                               "comparison-2 orbit never meets the curve"};
  return best;
}

namespace {

struct GluedCircuit {
  const GluedSystem* sys;
  bool reversed;
  int direction;
  planar::CycleSearchOptions opt;
  double proximity_tol;
  // set when a circuit ended at the sliding segment
  mutable bool a_contact = false;
  mutable double a_dist = 0.0;
  mutable Pt a_point{};

  planar::ReturnOutcome run(double m,
                            std::vector<ode::DenseStep<2>>* dense) const {
    GluedOptions g;
    g.t_max = opt.circuit_t_max;
    g.rtol = opt.rtol;
    g.atol = opt.atol;
    g.reversed = reversed;
    g.keep_dense = dense != nullptr;
    g.a_proximity_tol = proximity_tol;
    g.sections = {{sys->p.lambda1, direction}};
    g.stop_at_section = {{0, 1}};
    const GluedPath path =
        integrate_glued(*sys, m, sys->p.lambda1, std::nullopt, g);
    planar::ReturnOutcome out;
    if (path.outcome == GluedPath::Outcome::AContact) {
      a_contact = true;
      a_dist = path.min_dist_to_a;
      a_point = path.closest_to_a;
      out.error = "orbit reached the sliding-segment tolerance band";
      return out;
    }
    if (path.outcome != GluedPath::Outcome::SectionStop) {
      out.error = path.message.empty() ? "no section return" : path.message;
      return out;
    }
    out.ok = true;
    out.m_next = path.m_end;
    out.t_elapsed = path.t_end;
    if (dense) *dense = path.dense;
    return out;
  }
};

planar::CycleResult finish_glued_cycle(const GluedSystem& sys,
                                       const planar::ReturnMapCycle& rm,
                                       bool from_reversed,
                                       const planar::CycleSearchOptions& opt) {
  planar::LimitCycle cyc;
  cyc.section_s = sys.p.lambda1;
  cyc.anchor = {rm.m_fixed, sys.p.lambda1};
  cyc.stable = !from_reversed;
  cyc.multiplier = from_reversed ? 1.0 / rm.multiplier : rm.multiplier;

  const auto fwd = sys.glued_field(rm.m_fixed, sys.p.lambda1);
  GluedCircuit collect{&sys, false, fwd[1] > 0.0 ? +1 : -1, opt, 0.0};
  std::vector<ode::DenseStep<2>> dense;
  const auto out = collect.run(rm.m_fixed, &dense);
  if (!out.ok)
    return planar::CycleFailure{
        planar::CycleFailure::Kind::NonConvergence,
        "failed to integrate the refined cycle: " + out.error};
  cyc.period = out.t_elapsed;
  cyc.dense = std::move(dense);
  cyc.polyline = planar::resample_polyline(cyc.dense, 0.0, cyc.period, 1e-3);
  return cyc;
}

}  // namespace

planar::CycleResult find_glued_cycle(const GluedSystem& sys,
                                     planar::CycleMode mode, double m_start,
                                     const planar::CycleSearchOptions& opt,
                                     double proximity_tol) {
  const bool reversed = mode == planar::CycleMode::Unstable;
  GluedCircuit circuit{&sys, reversed, +1, opt,
                       reversed ? 0.0 : proximity_tol};
  auto fixed = planar::locate_return_fixed_point(
      [&](double m) { return circuit.run(m, nullptr); }, m_start, opt);
  if (std::holds_alternative<planar::CycleFailure>(fixed)) {
    auto f = std::get<planar::CycleFailure>(fixed);
    if (circuit.a_contact) f.message += " [sliding-segment contact]";
    return f;
  }
  return finish_glued_cycle(sys, std::get<planar::ReturnMapCycle>(fixed),
                            reversed, opt);
}

planar::CycleResult find_glued_cycle_bracketed(
    const GluedSystem& sys, double m_lo, double m_hi,
    const planar::CycleSearchOptions& opt, double proximity_tol) {
  GluedCircuit circuit{&sys, false, +1, opt, proximity_tol};
  // side: +1 when the orbit drifts inward toward the sliding segment
  auto side = [&](double m) -> std::optional<int> {
    circuit.a_contact = false;
    const auto out = circuit.run(m, nullptr);
    if (circuit.a_contact) return +1;
    if (!out.ok) return std::nullopt;
    return out.m_next > m ? +1 : -1;
  };
  const auto slo = side(m_lo);
  const auto shi = side(m_hi);
  if (!slo || !shi || *slo == *shi)
    return planar::CycleFailure{planar::CycleFailure::Kind::NotFound,
                                "bracket endpoints do not straddle the cycle"};
  double lo = m_lo, hi = m_hi;
  for (int it = 0; it < 80 && (hi - lo) > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto smid = side(mid);
    if (!smid)
      return planar::CycleFailure{planar::CycleFailure::Kind::NonConvergence,
                                  "circuit failed inside the bracket"};
    if (*smid == *slo)
      lo = mid;
    else
      hi = mid;
  }
  planar::ReturnMapCycle rm;
  rm.m_fixed = 0.5 * (lo + hi);
  {
    circuit.a_contact = false;
    const auto out = circuit.run(rm.m_fixed, nullptr);
    if (!out.ok)
      return planar::CycleFailure{planar::CycleFailure::Kind::NonConvergence,
                                  "refined bracket circuit failed"};
    rm.period = out.t_elapsed;
    const double delta = std::max(1e-10, 1e-7 * rm.m_fixed);
    const auto rp = circuit.run(rm.m_fixed + delta, nullptr);
    const auto rn = circuit.run(rm.m_fixed - delta, nullptr);
    if (rp.ok && rn.ok)
      rm.multiplier = (rp.m_next - rn.m_next) / (2.0 * delta);
    else
      rm.multiplier = std::numeric_limits<double>::quiet_NaN();
  }
  auto res = finish_glued_cycle(sys, rm, false, opt);
  if (planar::found(res)) std::get<planar::LimitCycle>(res).stable = false;
  return res;
}

InnerResult build_inner_boundary(const model::Params& p, double proximity_tol,
                                 const GluedOptions& opt_in) {
  GluedSystem sys;
  try {
    sys = GluedSystem::make(GluedSystem::Kind::Inner, p);
  } catch (const std::exception& e) {
    return ConstructionFailure{"inner", e.what()};
  }

  const auto m_point = choose_start_point_m(p);
  if (std::holds_alternative<ConstructionFailure>(m_point))
    return std::get<ConstructionFailure>(m_point);
  const Pt M = std::get<Pt>(m_point);
  if (M[1] >= p.lambda2 && M[1] <= p.lambda1)
    return ConstructionFailure{"inner",
                               "start point M lies on the sliding segment"};

  // Approach phase: from M to the first upward crossing of s = lambda1.
  GluedOptions approach = opt_in;
  approach.keep_dense = false;
  approach.a_proximity_tol = proximity_tol;
  approach.sections = {{p.lambda1, +1}};
  approach.stop_at_section = {{0, 1}};
  const int region0 = M[1] > p.lambda1 ? +1 : -1;
  const GluedPath ap = integrate_glued(sys, M[0], M[1], region0, approach);
  if (ap.outcome == GluedPath::Outcome::AContact)
    return NotCorrectEvidence{ap.min_dist_to_a, ap.closest_to_a,
                              "orbit of M reached the sliding segment"};
  if (ap.outcome != GluedPath::Outcome::SectionStop)
    return ConstructionFailure{
        "inner", ap.message.empty() ? "orbit of M produced no section return"
                                    : ap.message};

  planar::CycleSearchOptions copt;
  copt.rtol = opt_in.rtol;
  copt.atol = opt_in.atol;
  GluedCircuit circuit{&sys, false, +1, copt, proximity_tol};
  auto fixed = planar::locate_return_fixed_point(
      [&](double m) { return circuit.run(m, nullptr); }, ap.m_end, copt);
  if (std::holds_alternative<planar::CycleFailure>(fixed)) {
    const auto& fail = std::get<planar::CycleFailure>(fixed);
    if (circuit.a_contact)
      return NotCorrectEvidence{circuit.a_dist, circuit.a_point,
                                "orbit reached the sliding segment"};
    return ConstructionFailure{"inner", fail.message};
  }
  auto res = finish_glued_cycle(
      sys, std::get<planar::ReturnMapCycle>(fixed), false, copt);
  if (!planar::found(res))
    return ConstructionFailure{
        "inner", std::get<planar::CycleFailure>(res).message};
  return std::get<planar::LimitCycle>(res);
}

// ---------------------------------------------------------------------------

Classification classify(const model::Params& p, double proximity_tol,
                        bool locate_unstable) {
  Classification cl;
  const auto d = model::derived(p);
  auto mstar = [d](double s) { return d.kappa * (1.0 - s) * (s - d.tau); };

  auto outer = build_outer_boundary(p);
  if (std::holds_alternative<ConstructionFailure>(outer)) {
    const auto& f = std::get<ConstructionFailure>(outer);
    cl.verdict = Verdict::NotCorrect;
    cl.evidence = "outer boundary: " + f.message;
  } else {
    cl.outer = std::get<OuterBoundary>(outer);
  }

  auto inner = build_inner_boundary(p, proximity_tol);
  if (std::holds_alternative<NotCorrectEvidence>(inner)) {
    const auto& e = std::get<NotCorrectEvidence>(inner);
    cl.verdict = Verdict::NotCorrect;
    cl.min_dist_to_a = e.min_dist_to_a;
    if (!cl.evidence.empty()) cl.evidence += "; ";
    cl.evidence += "inner boundary: " + e.message;
  } else if (std::holds_alternative<ConstructionFailure>(inner)) {
    const auto& f = std::get<ConstructionFailure>(inner);
    cl.verdict = Verdict::NotCorrect;
    if (!cl.evidence.empty()) cl.evidence += "; ";
    cl.evidence += "inner boundary: " + f.message;
  } else {
    cl.inner_cycle = std::get<planar::LimitCycle>(inner);
    cl.inner_crossings =
        planar::cycle_tangency_crossings(*cl.inner_cycle, mstar);
  }

  if (cl.outer && cl.inner_cycle) {
    cl.verdict = Verdict::CorrectlyDefined;
    cl.evidence = "outer boundary closed; inner orbit converged to a cycle";
  }

  if (cl.verdict == Verdict::CorrectlyDefined && locate_unstable) {
    // Reversed-time search from midway between the cycle's upper
    // s = lambda1 crossing and the sliding-segment endpoint.
    const GluedSystem sys = GluedSystem::make(GluedSystem::Kind::Inner, p);
    double m_top = 0.0;
    for (const auto& step : cl.inner_cycle->dense) {
      const auto a = step.y_begin();
      const auto b = step.y_end();
      if ((a[1] - p.lambda1) * (b[1] - p.lambda1) < 0.0 && a[1] > b[1]) {
        auto g = [&](double th) { return step.eval(th)[1] - p.lambda1; };
        const double th = ode::refine_root(g, 0.0, 1.0, a[1] - p.lambda1,
                                           b[1] - p.lambda1, 1e-14);
        m_top = std::max(m_top, step.eval(th)[0]);
      }
    }
    if (m_top > 0.0) {
      const double m_start = 0.5 * (m_top + sys.mstar(p.lambda1));
      planar::CycleSearchOptions copt;
      auto un =
          find_glued_cycle(sys, planar::CycleMode::Unstable, m_start, copt);
      if (planar::found(un)) {
        cl.unstable_cycle = std::get<planar::LimitCycle>(un);
        cl.unstable_crossings =
            planar::cycle_tangency_crossings(*cl.unstable_cycle, mstar);
      }
    }
  }
  return cl;
}

AnnulusGeometry annulus_geometry(const model::Params& p, double proximity_tol) {
  AnnulusGeometry g;
  g.p = p;
  const auto d = model::derived(p);
  auto mstar = [d](double s) { return d.kappa * (1.0 - s) * (s - d.tau); };

  const int n = 800;
  for (int j = 0; j <= n; ++j) {
    const double s = d.tau + (1.0 - d.tau) * static_cast<double>(j) / n;
    g.tangency_curve.push_back({mstar(s), s});
  }
  for (int j = 0; j <= n; ++j) {
    const double s = static_cast<double>(j) / n;
    g.isocline1.push_back({(1.0 - s) * (s + p.a1), s});
    g.isocline2.push_back({(1.0 - s) * (s + p.a2), s});
  }
  for (int j = 0; j <= 200; ++j) {
    const double s =
        p.lambda2 + (p.lambda1 - p.lambda2) * static_cast<double>(j) / 200;
    g.segment_a_arc.push_back({mstar(s), s});
  }
  g.o1 = {mstar(p.lambda1), p.lambda1};
  g.o2 = {mstar(p.lambda2), p.lambda2};

  g.classification = classify(p, proximity_tol);
  if (g.classification.outer) g.outer = g.classification.outer;
  if (g.classification.inner_cycle) {
    std::vector<Pt> poly;
    for (const auto& q : g.classification.inner_cycle->polyline)
      poly.push_back({q[1], q[2]});
    g.inner_cycle = std::move(poly);
  }
  if (g.classification.unstable_cycle) {
    std::vector<Pt> poly;
    for (const auto& q : g.classification.unstable_cycle->polyline)
      poly.push_back({q[1], q[2]});
    g.unstable_cycle = std::move(poly);
  }
  return g;
}

}  // namespace pann::annulus
