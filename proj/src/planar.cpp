#include "pann/planar.hpp"

#include <algorithm>
#include <cmath>

namespace pann::planar {

UniquenessAuditReport cycle_uniqueness_audit(const PlanarSystem& sys, std::size_t grid_n,
                              double tol) {
  UniquenessAuditReport rep;
  rep.grid_n = grid_n;
  const double lam = sys.lambda;
  const double excl = 1e-6;

  auto ratio = [&](double s) { return sys.Fprime(s) / sys.phi_over_psi(s); };

  auto scan = [&](double lo, double hi) {
    double worst = 0.0;
    double prev = ratio(lo);
    for (std::size_t j = 1; j < grid_n; ++j) {
      const double s = lo + (hi - lo) * static_cast<double>(j) /
                                static_cast<double>(grid_n - 1);
      const double cur = ratio(s);
      worst = std::max(worst, cur - prev);
      prev = cur;
    }
    return worst;
  };

  rep.max_violation_left = scan(lam * 1e-6, lam - excl);
  rep.max_violation_right = scan(lam + excl, 1.0 - 1e-9);

  rep.sign_condition_ok = true;
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double s =
        1e-6 + (1.0 - 2e-6) * static_cast<double>(j) / static_cast<double>(grid_n - 1);
    if (std::abs(s - lam) < excl) continue;
    if (!((s - lam) * sys.phi_over_psi(s) > 0.0)) {
      rep.sign_condition_ok = false;
      break;
    }
  }
  rep.pass = rep.sign_condition_ok && rep.max_violation_left <= tol &&
             rep.max_violation_right <= tol;
  return rep;
}

// ---------------------------------------------------------------------------

ReturnOutcome run_section_circuit(const PlanarSystem& sys, bool reversed,
                                  double section_s, int direction,
                                  const CycleSearchOptions& opt, double m,
                                  std::vector<ode::DenseStep<2>>* dense) {
  auto f = [&sys, reversed](double, const Vec2& y, Vec2& dy) {
    double dm, ds;
    sys.field(y[0], y[1], dm, ds);
    dy = reversed ? Vec2{-dm, -ds} : Vec2{dm, ds};
  };
  ode::Options<2> o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  o.positive = {true, true};
  o.keep_dense = dense != nullptr;
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back(
      {[section_s](double, const Vec2& y) { return y[1] - section_s; },
       direction});
  const auto tr =
      ode::integrate<2>(f, Vec2{m, section_s}, 0.0, opt.circuit_t_max, o, ev,
                        ode::StopAtEvent{0, 1});
  ReturnOutcome out;
  if (tr.status != ode::Status::EventStop) {
    out.error = to_string(tr.status);
    if (!tr.message.empty()) out.error += ": " + tr.message;
    return out;
  }
  out.ok = true;
  out.m_next = tr.y_end[0];
  out.t_elapsed = tr.t_end;
  if (dense) *dense = tr.steps;
  return out;
}

std::variant<ReturnMapCycle, CycleFailure> locate_return_fixed_point(
    const CircuitFn& next, double m_start, const CycleSearchOptions& opt) {
  double m = m_start;
  double t_last = 0.0;
  int consecutive_close = 0;
  bool converged = false;
  for (int k = 0; k < opt.max_returns; ++k) {
    const ReturnOutcome out = next(m);
    if (!out.ok) {
      return CycleFailure{CycleFailure::Kind::NotFound,
                          "circuit " + std::to_string(k) + " failed: " + out.error};
    }
    const double dm = std::abs(out.m_next - m);
    if (dm <= opt.cauchy_tol * (1.0 + std::abs(m)))
      ++consecutive_close;
    else
      consecutive_close = 0;
    m = out.m_next;
    t_last = out.t_elapsed;
    if (consecutive_close >= 2) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    return CycleFailure{CycleFailure::Kind::NonConvergence,
                        "section returns did not settle"};
  }

  // Secant refinement of the return-map fixed point.
  auto residual = [&](double mm, double& t_out) -> std::optional<double> {
    const ReturnOutcome out = next(mm);
    if (!out.ok) return std::nullopt;
    t_out = out.t_elapsed;
    return out.m_next - mm;
  };
  double m0 = m;
  double t0 = t_last;
  auto g0 = residual(m0, t0);
  if (!g0)
    return CycleFailure{CycleFailure::Kind::NonConvergence,
                        "refinement circuit failed"};
  // Relative perturbation: relaxation cycles can anchor at denormal-scale m,
  // where any absolute offset would overshoot the basin entirely.
  double m1 = (std::abs(m0) > 1e-100) ? m0 * (1.0 + 1e-6) : m0 + 1e-9;
  double t1 = t_last;
  auto g1 = residual(m1, t1);
  if (!g1)
    return CycleFailure{CycleFailure::Kind::NonConvergence,
                        "refinement circuit failed"};
  for (int it = 0; it < 30; ++it) {
    if (std::abs(*g1) <= opt.refine_tol * (1.0 + std::abs(m1))) break;
    const double denom = *g1 - *g0;
    if (denom == 0.0) break;
    const double m2 = m1 - *g1 * (m1 - m0) / denom;
    m0 = m1;
    g0 = g1;
    t0 = t1;
    m1 = m2;
    g1 = residual(m1, t1);
    if (!g1)
      return CycleFailure{CycleFailure::Kind::NonConvergence,
                          "refinement circuit failed"};
  }
  if (std::abs(*g1) > 1e-8 * (1.0 + std::abs(m1))) {
    return CycleFailure{CycleFailure::Kind::NonConvergence,
                        "return-map residual " + std::to_string(*g1)};
  }

  ReturnMapCycle cyc;
  cyc.m_fixed = m1;
  cyc.period = t1;

  // Return-map derivative by central finite difference, step scaled to the
  // anchor so the probes stay inside the basin.
  const double delta =
      (std::abs(m1) > 1e-100) ? 1e-6 * std::abs(m1) : 1e-12;
  const ReturnOutcome rp = next(m1 + delta);
  const ReturnOutcome rm = next(m1 - delta);
  if (rp.ok && rm.ok)
    cyc.multiplier = (rp.m_next - rm.m_next) / (2.0 * delta);
  else if (rp.ok)
    cyc.multiplier = (rp.m_next - m1) / delta;
  else if (rm.ok)
    cyc.multiplier = (m1 - rm.m_next) / delta;
  else
    cyc.multiplier = std::numeric_limits<double>::quiet_NaN();
  return cyc;
}

CycleResult find_limit_cycle(const PlanarSystem& sys, CycleMode mode,
                             const CycleSearchOptions& opt) {
  const Vec2 eq = sys.equilibrium();
  if (classify_planar_equilibrium(sys.a, sys.lambda) ==
      EquilibriumClass::StableFocusNode) {
    // At most one cycle exists and it is stable; around a stable focus that
    // leaves no room for any cycle in this family.
    return CycleFailure{CycleFailure::Kind::NotFound,
                        "planar equilibrium is stable; no cycle"};
  }

  const bool reversed = (mode == CycleMode::Unstable);

  double m_start;
  if (mode == CycleMode::Stable) {
    m_start = eq[0] * (1.0 - 1e-3);
  } else {
    // Midpoint between the equilibrium and the stable cycle on the section.
    auto stable = find_limit_cycle(sys, CycleMode::Stable, opt);
    if (!found(stable))
      return CycleFailure{CycleFailure::Kind::NotFound,
                          "no stable cycle to anchor the reversed search"};
    m_start = 0.5 * (eq[0] + std::get<LimitCycle>(stable).anchor[0]);
  }

  auto fixed = locate_return_fixed_point(
      [&](double m) {
        return run_section_circuit(sys, reversed, sys.lambda, +1, opt, m);
      },
      m_start, opt);
  if (std::holds_alternative<CycleFailure>(fixed))
    return std::get<CycleFailure>(fixed);
  const auto rm = std::get<ReturnMapCycle>(fixed);

  if (std::abs(rm.m_fixed - eq[0]) < 1e-5 * (1.0 + std::abs(eq[0]))) {
    return CycleFailure{CycleFailure::Kind::NotFound,
                        "returns converged to the equilibrium"};
  }

  LimitCycle cyc;
  cyc.section_s = sys.lambda;
  cyc.anchor = {rm.m_fixed, sys.lambda};
  cyc.period = rm.period;
  cyc.stable = (mode == CycleMode::Stable);
  // The reversed return map is the inverse of the forward one, so the
  // forward multiplier is the reciprocal of the reversed-map derivative.
  cyc.multiplier = reversed ? 1.0 / rm.multiplier : rm.multiplier;

  // Collect one period of dense output along the forward flow.
  {
    double dm, ds;
    sys.field(rm.m_fixed, sys.lambda, dm, ds);
    std::vector<ode::DenseStep<2>> dense;
    const ReturnOutcome out = run_section_circuit(
        sys, false, sys.lambda, ds > 0.0 ? +1 : -1, opt, rm.m_fixed, &dense);
    if (!out.ok)
      return CycleFailure{CycleFailure::Kind::NonConvergence,
                          "failed to integrate the refined cycle"};
    cyc.dense = std::move(dense);
    cyc.period = out.t_elapsed;
    cyc.polyline = resample_polyline(cyc.dense, 0.0, cyc.period, 1e-3);
  }
  return cyc;
}

std::vector<double> cycle_tangency_crossings(
    const LimitCycle& cycle, const std::function<double(double)>& mstar) {
  std::vector<double> roots;
  constexpr std::array<double, 5> probes{0.0, 0.25, 0.5, 0.75, 1.0};
  for (const auto& step : cycle.dense) {
    if (step.t0 > cycle.period) break;
    double th_a = probes[0];
    Vec2 ya = step.eval(th_a);
    double ga = ya[0] - mstar(ya[1]);
    for (std::size_t j = 1; j < probes.size(); ++j) {
      const double th_b = probes[j];
      const Vec2 yb = step.eval(th_b);
      const double gb = yb[0] - mstar(yb[1]);
      if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
        auto g = [&](double th) {
          const Vec2 y = step.eval(th);
          return y[0] - mstar(y[1]);
        };
        const double th = ode::refine_root(g, th_a, th_b, ga, gb, 1e-14);
        const double t_root = step.t0 + th * step.h;
        if (t_root <= cycle.period) roots.push_back(step.eval(th)[1]);
      }
      th_a = th_b;
      ga = gb;
    }
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-7; }),
              roots.end());
  return roots;
}

std::vector<std::array<double, 3>> resample_polyline(
    const std::vector<ode::DenseStep<2>>& dense, double t0, double t1,
    double max_arc) {
  std::vector<std::array<double, 3>> out;
  for (const auto& step : dense) {
    if (step.t0 + step.h < t0 || step.t0 > t1) continue;
    const Vec2 y0 = step.y_begin();
    const Vec2 y1 = step.y_end();
    const double chord = std::hypot(y1[0] - y0[0], y1[1] - y0[1]);
    const int nsub = std::clamp(static_cast<int>(std::ceil(chord / max_arc)), 1, 256);
    for (int j = 0; j < nsub; ++j) {
      const double th = static_cast<double>(j) / nsub;
      const double t = step.t0 + th * step.h;
      if (t < t0 || t > t1) continue;
      const Vec2 y = step.eval(th);
      out.push_back({t, y[0], y[1]});
    }
  }
  if (!dense.empty()) {
    const auto& last = dense.back();
    const double t = std::min(t1, last.t0 + last.h);
    const Vec2 y = last.eval((t - last.t0) / last.h);
    out.push_back({t, y[0], y[1]});
  }
  return out;
}

}  // namespace pann::planar
