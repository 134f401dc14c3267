#pragma once

// Glued inner/outer planar systems, the tangency-curve sign machinery, and
// the construction and classification of the invariant annulus.
//
// The gluing curve is m = mstar(s); "outside" means m > mstar(s). The inner
// system follows comparison field 1 outside the curve and field 2 inside;
// the outer system swaps the two. Orbits are integrated leg by leg with an
// event stop at the curve and a field switch, never interpolating across
// the derivative jump.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pann/geometry.hpp"
#include "pann/integrator.hpp"
#include "pann/model.hpp"
#include "pann/planar.hpp"

namespace pann::annulus {

using geom::Pt;

struct GluedSystem {
  enum class Kind { Inner, Outer };
  Kind kind = Kind::Inner;
  model::Params p;
  model::Derived d;

  static GluedSystem make(Kind k, const model::Params& p) {
    return GluedSystem{k, p, model::derived(p)};
  }

  double mstar(double s) const { return d.kappa * (1.0 - s) * (s - d.tau); }
  double dmstar(double s) const { return d.kappa * (1.0 + d.tau - 2.0 * s); }

  // +1 outside (m > mstar), -1 inside; points on the curve count as inside.
  int region_of(double m, double s) const { return m > mstar(s) ? +1 : -1; }

  int comparison_for(int region) const {
    const bool outside = region > 0;
    if (kind == Kind::Inner) return outside ? 1 : 2;
    return outside ? 2 : 1;
  }

  void comparison_field(int i, double m, double s, double& dm,
                        double& ds) const {
    const double a = (i == 1) ? p.a1 : p.a2;
    const double lam = (i == 1) ? p.lambda1 : p.lambda2;
    dm = (s - lam) / (s + a) * m;
    ds = s * (1.0 - s) - s / (s + a) * m;
  }

  std::array<double, 2> glued_field(double m, double s) const {
    double dm, ds;
    comparison_field(comparison_for(region_of(m, s)), m, s, dm, ds);
    return {dm, ds};
  }
};

// Scalar products of the full-system field with the outer normals of the
// comparison integral surfaces, both as raw dot products and in the closed
// forms (-l x2, l x1).
struct SurfaceSigns {
  double dot1_raw = 0.0;
  double dot2_raw = 0.0;
  double dot1_closed = 0.0;
  double dot2_closed = 0.0;
};

SurfaceSigns integral_surface_signs(const model::Params& p, const model::State& st);

// ---------------------------------------------------------------------------
// Glued integration

struct CurveCrossing {
  double t = 0.0;
  double m = 0.0, s = 0.0;
  int direction = 0;  // +1: inside -> outside, -1: outside -> inside
};

struct SectionHit {
  std::size_t section_id = 0;
  double t = 0.0;
  double m = 0.0, s = 0.0;
  int direction = 0;
};

struct GluedOptions {
  double t_max = 2500.0;
  double rtol = 1e-11;
  double atol = 1e-60;
  bool reversed = false;
  bool keep_dense = false;
  double a_proximity_tol = 0.0;  // > 0 enables segment-A monitoring
  struct Section {
    double s_value = 0.0;
    int direction = 0;
  };
  std::vector<Section> sections;
  // stop at the n-th hit of a given section
  std::optional<std::pair<std::size_t, std::size_t>> stop_at_section;
  // evaluated after each leg; return true to stop
  std::function<bool(const struct GluedPath&)> stop_check;
  int max_legs = 200000;
};

struct GluedPath {
  enum class Outcome { TimeEnd, SectionStop, AContact, CheckStop, Failure };
  Outcome outcome = Outcome::TimeEnd;
  std::string message;
  double t_end = 0.0;
  double m_end = 0.0, s_end = 0.0;
  std::vector<CurveCrossing> crossings;
  std::vector<SectionHit> section_hits;
  double min_dist_to_a = std::numeric_limits<double>::infinity();
  Pt closest_to_a{};
  std::vector<ode::DenseStep<2>> dense;  // absolute time, when keep_dense
};

GluedPath integrate_glued(const GluedSystem& sys, double m0, double s0,
                          std::optional<int> region0, const GluedOptions& opt);

// Distance from a point to the sliding segment (the curve arc between the
// comparison-system equilibria).
double segment_a_distance(const GluedSystem& sys, double m, double s,
                          Pt* closest = nullptr);

struct SegmentA {
  Pt o2{};  // (mstar(lambda2), lambda2)
  Pt o1{};  // (mstar(lambda1), lambda1)
  double proximity_tol = 1e-4;
};

inline SegmentA segment_a(const model::Params& p, double tol = 1e-4) {
  const model::Derived d = model::derived(p);
  auto ms = [&](double s) { return d.kappa * (1.0 - s) * (s - d.tau); };
  return SegmentA{{ms(p.lambda2), p.lambda2}, {ms(p.lambda1), p.lambda1}, tol};
}

// ---------------------------------------------------------------------------
// Boundary construction

struct ConstructionFailure {
  std::string stage;
  std::string message;
};

struct OuterBoundary {
  std::vector<Pt> polyline;  // closed, counterclockwise in (m, s)
  std::size_t orbit_points = 0;  // leading entries belonging to the orbit arc
  Pt anchor{};               // last curve crossing before the dive (or (0,1))
  Pt L1{}, L2{};
  double t_anchor = 0.0, t_L1 = 0.0, t_L2 = 0.0;
};

using OuterResult = std::variant<OuterBoundary, ConstructionFailure>;

// kind defaults to the outer gluing; passing Inner runs the same recipe with
// the fields swapped, which must fail validation (negative control).
OuterResult build_outer_boundary(
    const model::Params& p, const GluedOptions& opt = {},
    GluedSystem::Kind kind = GluedSystem::Kind::Outer);

struct NotCorrectEvidence {
  double min_dist_to_a = 0.0;
  Pt contact_point{};
  std::string message;
};

using InnerResult =
    std::variant<planar::LimitCycle, NotCorrectEvidence, ConstructionFailure>;

// Starting point M: the largest-s tangency-curve crossing of a comparison-2
// orbit approaching its planar cycle from the inner side.
std::variant<Pt, ConstructionFailure> choose_start_point_m(
    const model::Params& p, const planar::CycleSearchOptions& copt = {});

InnerResult build_inner_boundary(const model::Params& p,
                                 double proximity_tol = 1e-4,
                                 const GluedOptions& opt = {});

// Stable (forward) or unstable (reversed-time) limit cycle of a glued system,
// anchored on the section s = lambda1.
planar::CycleResult find_glued_cycle(const GluedSystem& sys,
                                     planar::CycleMode mode, double m_start,
                                     const planar::CycleSearchOptions& opt = {},
                                     double proximity_tol = 0.0);

// Independent route to the unstable cycle: bracketed root of the forward
// return map (orbits hitting the sliding segment classify as "beyond").
planar::CycleResult find_glued_cycle_bracketed(
    const GluedSystem& sys, double m_lo, double m_hi,
    const planar::CycleSearchOptions& opt = {}, double proximity_tol = 1e-6);

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { CorrectlyDefined, NotCorrect };

struct Classification {
  Verdict verdict = Verdict::NotCorrect;
  std::string evidence;
  std::optional<double> min_dist_to_a;
  std::optional<OuterBoundary> outer;
  std::optional<planar::LimitCycle> inner_cycle;    // stable glued cycle
  std::optional<planar::LimitCycle> unstable_cycle; // reported when located
  std::vector<double> inner_crossings;              // stable-cycle s values
  std::vector<double> unstable_crossings;
};

Classification classify(const model::Params& p, double proximity_tol = 1e-4,
                        bool locate_unstable = true);

// Full geometry for export: curve, isoclines, segment A, boundaries, markers.
struct AnnulusGeometry {
  model::Params p;
  std::vector<Pt> tangency_curve;
  std::vector<Pt> isocline1;
  std::vector<Pt> isocline2;
  std::vector<Pt> segment_a_arc;
  Pt o1{}, o2{};
  std::optional<OuterBoundary> outer;
  std::optional<std::vector<Pt>> inner_cycle;
  std::optional<std::vector<Pt>> unstable_cycle;
  Classification classification;
};

AnnulusGeometry annulus_geometry(const model::Params& p,
                                 double proximity_tol = 1e-4);

inline const char* to_string(Verdict v) {
  return v == Verdict::CorrectlyDefined ? "correctly-defined" : "not-correct";
}

}  // namespace pann::annulus
