#pragma once

// Two-predator / one-prey model family
//
//   x1' = phi1(s) x1,   x2' = phi2(s) x2,   s' = h(s) - psi1(s) x1 - psi2(s) x2
//
// with the rational instance
//
//   h(s) = s (1 - s),   phi_i(s) = (s - lambda_i) / (s + a_i),
//   psi_i(s) = s / (s + a_i).
//
// The family interface (h, psi_i, phi_i and first derivatives) is kept
// explicit so that the comparison-system structure results can be tested
// generically; the rational instance is the only one shipped.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pann::model {

struct Params {
  double a1 = 0.0;
  double a2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// The standard parameter set used throughout the numerical experiments.
inline Params base_params() { return Params{0.1, 0.0075, 0.1, 0.01}; }

inline void require_positive(const Params& p) {
  if (!(p.a1 > 0.0 && p.a2 > 0.0 && p.lambda1 > 0.0 && p.lambda2 > 0.0))
    throw std::invalid_argument("params must be positive");
}

struct State {
  double x1 = 0.0;
  double x2 = 0.0;
  double s = 0.0;
};

struct TransformedState {
  double m = 0.0;   // x1 + x2
  double xi = 0.0;  // x1 / m, in [0,1]
  double s = 0.0;
};

// Rational function family with analytic derivatives.
struct RationalFamily {
  Params p;

  double h(double s) const { return s * (1.0 - s); }
  double dh(double s) const { return 1.0 - 2.0 * s; }

  double a(int i) const { return i == 1 ? p.a1 : p.a2; }
  double lambda(int i) const { return i == 1 ? p.lambda1 : p.lambda2; }

  double psi(int i, double s) const { return s / (s + a(i)); }
  double dpsi(int i, double s) const {
    const double d = s + a(i);
    return a(i) / (d * d);
  }
  double phi(int i, double s) const { return (s - lambda(i)) / (s + a(i)); }
  double dphi(int i, double s) const {
    const double d = s + a(i);
    return (a(i) + lambda(i)) / (d * d);
  }
};

// ---------------------------------------------------------------------------
// Vector fields

inline std::array<double, 3> eval_field(const Params& p, const State& st) {
  const RationalFamily f{p};
  return {f.phi(1, st.s) * st.x1, f.phi(2, st.s) * st.x2,
          f.h(st.s) - f.psi(1, st.s) * st.x1 - f.psi(2, st.s) * st.x2};
}

// Field in (m, xi, s) coordinates: m' = p(s,xi) m, xi' = sigma(s) xi (1-xi),
// s' = h(s) - q(s,xi) m.
inline std::array<double, 3> eval_transformed_field(const Params& p,
                                                    const TransformedState& st) {
  const RationalFamily f{p};
  const double phi1 = f.phi(1, st.s), phi2 = f.phi(2, st.s);
  const double psi1 = f.psi(1, st.s), psi2 = f.psi(2, st.s);
  const double growth = phi1 * st.xi + phi2 * (1.0 - st.xi);
  const double sigma = phi1 - phi2;
  const double uptake = psi1 * st.xi + psi2 * (1.0 - st.xi);
  return {growth * st.m, sigma * st.xi * (1.0 - st.xi),
          f.h(st.s) - uptake * st.m};
}

inline TransformedState to_transformed(const State& st) {
  const double m = st.x1 + st.x2;
  if (m <= 0.0)
    throw std::domain_error("predator fraction undefined at m = 0");
  return {m, st.x1 / m, st.s};
}

inline State from_transformed(const TransformedState& st) {
  return {st.m * st.xi, st.m * (1.0 - st.xi), st.s};
}

// ---------------------------------------------------------------------------
// Derived quantities of the standard system

struct Derived {
  double tau = 0.0;
  double kappa0 = 0.0;
  double kappa = 0.0;
  double gamma_ratio = 0.0;
};

inline Derived derived(const Params& p) {
  if (p.lambda1 == p.lambda2)
    throw std::domain_error("kappa undefined for lambda1 == lambda2");
  Derived d;
  d.kappa0 = p.a1 + p.lambda1 - (p.a2 + p.lambda2);
  d.kappa = d.kappa0 / (p.lambda1 - p.lambda2);
  d.gamma_ratio = (p.lambda2 * p.a1) / (p.lambda1 * p.a2);
  // tau = (gamma - 1) lambda1 a2 / kappa0, written subtraction-first.
  d.tau = (p.lambda2 * p.a1 - p.lambda1 * p.a2) / d.kappa0;
  return d;
}

// Parameter giving the same tangency curve at break-even level lambda.
inline double iso_tangency_a(double lambda, double kappa, double tau) {
  const double a = lambda * (kappa - 1.0) - tau * kappa;
  if (a <= 0.0)
    throw std::domain_error("iso-tangency parameter is nonpositive");
  return a;
}

// ---------------------------------------------------------------------------
// Scalar fields of the comparison-system construction

struct FieldBundle {
  Params p;
  Derived d;

  explicit FieldBundle(const Params& params) : p(params), d(derived(params)) {}

  static void check_s(double s) {
    if (s < 0.0) throw std::domain_error("scalar fields require s >= 0");
  }

  double omega(double s) const {
    check_s(s);
    return s * (p.lambda1 - p.lambda2) / ((s + p.a1) * (s + p.a2));
  }
  // l(m,s) = h (phi2 - phi1) - omega m; zero exactly on the tangency curve.
  double l(double m, double s) const {
    check_s(s);
    const RationalFamily f{p};
    return f.h(s) * (f.phi(2, s) - f.phi(1, s)) - omega(s) * m;
  }
  double H(const State& st) const {
    check_s(st.s);
    const RationalFamily f{p};
    return f.h(st.s) - f.psi(1, st.s) * st.x1 - f.psi(2, st.s) * st.x2;
  }
  double Hi(int i, double m, double s) const {
    check_s(s);
    const RationalFamily f{p};
    return f.h(s) - m * f.psi(i, s);
  }
  // Tangency curve m = kappa (1-s)(s-tau); meaningful on tau <= s <= 1.
  double mstar(double s) const {
    check_s(s);
    return d.kappa * (1.0 - s) * (s - d.tau);
  }
  double dmstar(double s) const {
    check_s(s);
    return d.kappa * (1.0 + d.tau - 2.0 * s);
  }
  // Main isoclines S_i(s) = h/psi_i = (1-s)(s+a_i).
  double isocline(int i, double s) const {
    check_s(s);
    return (1.0 - s) * (s + (i == 1 ? p.a1 : p.a2));
  }
};

// ---------------------------------------------------------------------------
// Assumption audit

struct AssumptionCheck {
  std::string id;
  bool pass = false;
  std::string witness;
};

struct AuditReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const AssumptionCheck& get(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return c;
    throw std::out_of_range("no such assumption: " + id);
  }
};

AuditReport audit_assumptions(const Params& p);

// ---------------------------------------------------------------------------
// Equilibria

enum class EquilibriumKind { O, O1, P1, P2 };

struct Equilibrium {
  EquilibriumKind kind;
  State location;
  std::array<std::complex<double>, 3> eigenvalues;
  std::string classification;
};

std::vector<Equilibrium> equilibria(const Params& p);

// ---------------------------------------------------------------------------
// Boundary-plane extinction screen

enum class ExtinctionVerdict { X1Extinct, X2Extinct, Undetermined };

struct ExtinctionResult {
  ExtinctionVerdict verdict;
  double x1_threshold = 0.0;  // x1 extinct when lambda1 exceeds this
};

ExtinctionResult extinction_check(const Params& p);

inline const char* to_string(ExtinctionVerdict v) {
  switch (v) {
    case ExtinctionVerdict::X1Extinct: return "x1-extinct";
    case ExtinctionVerdict::X2Extinct: return "x2-extinct";
    case ExtinctionVerdict::Undetermined: return "undetermined";
  }
  return "unknown";
}

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::O: return "O";
    case EquilibriumKind::O1: return "O1";
    case EquilibriumKind::P1: return "P1";
    case EquilibriumKind::P2: return "P2";
  }
  return "unknown";
}

}  // namespace pann::model
