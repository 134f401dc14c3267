#pragma once

// Planar restrictions and projected comparison systems
//
//   m' = phi(s) m,   s' = h(s) - psi(s) m
//
// with one break-even parameter pair (a, lambda): equilibrium criteria,
// the uniqueness-theorem monotonicity audit, limit-cycle location by
// section return maps, and cycle / tangency-curve crossing measurement.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pann/integrator.hpp"

namespace pann::planar {

using Vec2 = ode::Vec<2>;  // (m, s)

enum class Form { Restriction1, Restriction2, Comparison1, Comparison2 };

struct PlanarSystem {
  double a = 0.0;
  double lambda = 0.0;
  Form form = Form::Comparison1;
  // Optional time-rescaled variant m' = (s-lambda) m, s' = s((1-s)(s+a) - m).
  // Same orbits, different clock; the unscaled form is the default.
  bool time_rescaled = false;

  void field(double m, double s, double& dm, double& ds) const {
    if (time_rescaled) {
      dm = (s - lambda) * m;
      ds = s * ((1.0 - s) * (s + a) - m);
    } else {
      dm = (s - lambda) / (s + a) * m;
      ds = s * (1.0 - s) - s / (s + a) * m;
    }
  }

  // Lienard-form accessors used by the uniqueness-theorem audit.
  double F(double s) const { return (1.0 - s) * (s + a); }   // h / psi
  double Fprime(double s) const { return 1.0 - a - 2.0 * s; }
  double phi_over_psi(double s) const { return (s - lambda) / s; }

  double isocline(double s) const { return (1.0 - s) * (s + a); }
  Vec2 equilibrium() const { return {isocline(lambda), lambda}; }
};

enum class EquilibriumClass { StableFocusNode, UnstableFocusNode };

// Planar equilibrium P((1-lambda)(lambda+a), lambda) is repelling exactly
// when lambda < (1-a)/2; a unique stable cycle then exists in the plane.
inline EquilibriumClass classify_planar_equilibrium(double a, double lambda) {
  return lambda < 0.5 * (1.0 - a) ? EquilibriumClass::UnstableFocusNode
                                  : EquilibriumClass::StableFocusNode;
}

// Monotonicity report for F'(s)/phi(s) on (0, lambda) and (lambda, 1).
struct UniquenessAuditReport {
  std::size_t grid_n = 0;
  double max_violation_left = 0.0;
  double max_violation_right = 0.0;
  bool sign_condition_ok = false;  // (s - lambda) phi(s) > 0 off s = lambda
  bool pass = false;
};

UniquenessAuditReport cycle_uniqueness_audit(const PlanarSystem& sys, std::size_t grid_n,
                              double tol = 1e-8);

// ---------------------------------------------------------------------------
// Limit cycles

struct LimitCycle {
  double period = 0.0;
  Vec2 anchor{};                          // section point (m, s)
  double section_s = 0.0;                 // section line s = const
  bool stable = true;
  double multiplier = 0.0;                // return-map derivative at anchor
  std::vector<std::array<double, 3>> polyline;  // (t, m, s), fine spacing
  std::vector<ode::DenseStep<2>> dense;         // one period of dense output
};

struct CycleFailure {
  enum class Kind { NotFound, NonConvergence } kind;
  std::string message;
};

using CycleResult = std::variant<LimitCycle, CycleFailure>;

inline bool found(const CycleResult& r) {
  return std::holds_alternative<LimitCycle>(r);
}

enum class CycleMode { Stable, Unstable };

struct CycleSearchOptions {
  double cauchy_tol = 1e-9;
  double refine_tol = 1e-11;
  int max_returns = 600;
  double circuit_t_max = 5000.0;
  double rtol = 1e-11;
  double atol = 1e-60;  // relative control dominates; keeps s > 0 honest
};

// One circuit of a section return map: from (m, section_s), the next
// same-direction crossing of the section.
struct ReturnOutcome {
  bool ok = false;
  double m_next = 0.0;
  double t_elapsed = 0.0;
  std::string error;
};

using CircuitFn = std::function<ReturnOutcome(double)>;

struct ReturnMapCycle {
  double m_fixed = 0.0;
  double period = 0.0;
  double multiplier = 0.0;
};

// Shared engine: iterate a return map to Cauchy convergence, then refine the
// fixed point by secant. Works for any circuit function (pure or glued).
std::variant<ReturnMapCycle, CycleFailure> locate_return_fixed_point(
    const CircuitFn& next, double m_start, const CycleSearchOptions& opt);

// One circuit of the section return map of a pure planar system, optionally
// time-reversed, with dense output on request.
ReturnOutcome run_section_circuit(const PlanarSystem& sys, bool reversed,
                                  double section_s, int direction,
                                  const CycleSearchOptions& opt, double m,
                                  std::vector<ode::DenseStep<2>>* dense = nullptr);

// Stable mode integrates forward from a perturbed equilibrium; unstable mode
// runs the same search on the time-reversed field.
CycleResult find_limit_cycle(const PlanarSystem& sys, CycleMode mode,
                             const CycleSearchOptions& opt = {});

// All roots of m(t) - mstar(s(t)) over one period of the cycle, bracketed on
// the stored dense output, reported as s-values sorted descending.
std::vector<double> cycle_tangency_crossings(
    const LimitCycle& cycle, const std::function<double(double)>& mstar);

// Dense-output polyline for export, resampled at arc spacing <= max_arc.
std::vector<std::array<double, 3>> resample_polyline(
    const std::vector<ode::DenseStep<2>>& dense, double t0, double t1,
    double max_arc);

}  // namespace pann::planar
