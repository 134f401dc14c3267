#include "pann/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pann::model {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

AuditReport audit_assumptions(const Params& p) {
  AuditReport r;
  const bool positive =
      p.a1 > 0.0 && p.a2 > 0.0 && p.lambda1 > 0.0 && p.lambda2 > 0.0;

  // A1-A4 hold structurally for the rational family with positive
  // parameters; they are still reported so the schema is fixed.
  r.checks.push_back({"A1", positive, "rational family is C^2 on the octant"});
  r.checks.push_back(
      {"A2", positive, "psi_i(0)=0, psi_i'(s)=a_i/(s+a_i)^2 > 0"});
  r.checks.push_back(
      {"A3", positive,
       "phi_i'(s)=(a_i+lambda_i)/(s+a_i)^2 > 0, phi_i(lambda_i)=0"});
  r.checks.push_back({"A4", true, "h(s)=s(1-s): h(0)=h(1)=0, h''=-2"});

  const bool a5 = p.a1 > p.a2;
  r.checks.push_back(
      {"A5", a5, "psi1 < psi2 iff a1 > a2: a1=" + fmt(p.a1) + " a2=" + fmt(p.a2)});

  const double kappa0 = p.a1 + p.lambda1 - (p.a2 + p.lambda2);
  const double gamma = (p.lambda2 * p.a1) / (p.lambda1 * p.a2);
  double tau = std::numeric_limits<double>::quiet_NaN();
  if (kappa0 != 0.0) tau = (p.lambda2 * p.a1 - p.lambda1 * p.a2) / kappa0;
  const bool a6 = kappa0 > 0.0 && tau > 0.0;
  r.checks.push_back({"A6", a6,
                      "kappa0=" + fmt(kappa0) + " tau=" + fmt(tau) +
                          " gamma=" + fmt(gamma)});

  const bool a7 = tau > 0.0 && tau < p.lambda2 && p.lambda2 < p.lambda1 &&
                  p.lambda1 < 1.0;
  r.checks.push_back({"A7", a7,
                      "0 < tau(" + fmt(tau) + ") < lambda2(" + fmt(p.lambda2) +
                          ") < lambda1(" + fmt(p.lambda1) + ") < 1"});

  // omega(s) = s (lambda1 - lambda2) / ((s+a1)(s+a2)) is nonzero for s > 0
  // exactly when the break-even levels differ; positive when lambda1 > lambda2.
  const bool b1 = p.lambda1 > p.lambda2;
  r.checks.push_back(
      {"B1", b1, "omega > 0 for s > 0 iff lambda1 > lambda2"});
  return r;
}

namespace {

// Eigenvalues of the in-plane 2x2 block [[0, b],[c, d]] at P_i.
std::array<std::complex<double>, 2> planar_block_eigs(double b, double c,
                                                      double d) {
  const double tr = d;
  const double det = -b * c;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double rt = std::sqrt(disc);
    return {std::complex<double>(0.5 * (tr + rt), 0.0),
            std::complex<double>(0.5 * (tr - rt), 0.0)};
  }
  const double rt = std::sqrt(-disc);
  return {std::complex<double>(0.5 * tr, 0.5 * rt),
          std::complex<double>(0.5 * tr, -0.5 * rt)};
}

}  // namespace

std::vector<Equilibrium> equilibria(const Params& p) {
  require_positive(p);
  const RationalFamily f{p};
  std::vector<Equilibrium> out;

  {
    Equilibrium e;
    e.kind = EquilibriumKind::O;
    e.location = {0.0, 0.0, 0.0};
    e.eigenvalues = {std::complex<double>(f.phi(1, 0.0), 0.0),
                     std::complex<double>(f.phi(2, 0.0), 0.0),
                     std::complex<double>(f.dh(0.0), 0.0)};
    e.classification =
        "saddle: 2-d stable manifold in s=0, 1-d unstable along the s-axis";
    out.push_back(e);
  }
  {
    Equilibrium e;
    e.kind = EquilibriumKind::O1;
    e.location = {0.0, 0.0, 1.0};
    e.eigenvalues = {std::complex<double>(f.phi(1, 1.0), 0.0),
                     std::complex<double>(f.phi(2, 1.0), 0.0),
                     std::complex<double>(f.dh(1.0), 0.0)};
    e.classification =
        "saddle: 1-d stable manifold along the s-axis, 2-d unstable";
    out.push_back(e);
  }
  {
    // P1 = (x1^0, 0, lambda1), x1^0 = (1 - lambda1)(lambda1 + a1)
    Equilibrium e;
    e.kind = EquilibriumKind::P1;
    const double x0 = (1.0 - p.lambda1) * (p.lambda1 + p.a1);
    e.location = {x0, 0.0, p.lambda1};
    const double trans = f.phi(2, p.lambda1);
    const double d = f.dh(p.lambda1) - f.dpsi(1, p.lambda1) * x0;
    const auto blk =
        planar_block_eigs(f.dphi(1, p.lambda1) * x0, -f.psi(1, p.lambda1), d);
    e.eigenvalues = {blk[0], blk[1], std::complex<double>(trans, 0.0)};
    if (d > 0.0)
      e.classification = trans > 0.0
                             ? "source (in-plane unstable, transverse unstable)"
                             : "in-plane unstable, transverse stable";
    else
      e.classification =
          trans > 0.0
              ? "saddle: 2-d stable manifold in the x2=0 plane"
              : "sink";
    out.push_back(e);
  }
  {
    Equilibrium e;
    e.kind = EquilibriumKind::P2;
    const double x0 = (1.0 - p.lambda2) * (p.lambda2 + p.a2);
    e.location = {0.0, x0, p.lambda2};
    const double trans = f.phi(1, p.lambda2);
    const double d = f.dh(p.lambda2) - f.dpsi(2, p.lambda2) * x0;
    const auto blk =
        planar_block_eigs(f.dphi(2, p.lambda2) * x0, -f.psi(2, p.lambda2), d);
    e.eigenvalues = {blk[0], blk[1], std::complex<double>(trans, 0.0)};
    if (d > 0.0)
      e.classification = trans < 0.0
                             ? "saddle: 1-d stable manifold transverse to the "
                               "x1=0 plane"
                             : "source";
    else
      e.classification = trans < 0.0 ? "sink (asymptotically stable)"
                                     : "saddle";
    out.push_back(e);
  }
  return out;
}

ExtinctionResult extinction_check(const Params& p) {
  ExtinctionResult r{ExtinctionVerdict::Undetermined, 0.0};
  r.x1_threshold = p.a1 * p.lambda2 * (p.a2 + 1.0) /
                   (p.a1 * p.a2 + p.lambda2 * (p.a1 - p.a2) + p.a2);
  if (p.lambda1 < p.lambda2) {
    r.verdict = ExtinctionVerdict::X2Extinct;
    return r;
  }
  if (p.a1 > p.a2 && p.lambda1 > r.x1_threshold) {
    r.verdict = ExtinctionVerdict::X1Extinct;
    return r;
  }
  return r;
}

}  // namespace pann::model
