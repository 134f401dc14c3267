#pragma once

// Return map of the full three-dimensional flow on the plane s = epsilon
// inside a correctly defined annulus, attractor sampling, the iso-tangency
// bifurcation sweep, and the one-dimensional model map
//
//   f(v) = beta + v - (k1 + k2 e^v) / (1 + v) * u.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pann/annulus.hpp"
#include "pann/integrator.hpp"
#include "pann/model.hpp"

namespace pann::pmap {

using Vec3 = ode::Vec<3>;  // (m, xi, s)

struct SectionConfig {
  double epsilon = 0.1;
  enum class Rect { Outer, Inner } rect = Rect::Outer;  // outer = larger m
  // The outer rectangle is traversed downward in s, the inner one upward.
  int direction() const { return rect == Rect::Outer ? -1 : +1; }
};

// m-intervals cut out of the annulus by the plane s = epsilon.
struct SectionRects {
  double outer_lo = 0.0;
  double inner_lo = 0.0;
  double inner_hi = 0.0;
  double outer_hi = 0.0;

  std::array<double, 2> hosting(SectionConfig::Rect r) const {
    return r == SectionConfig::Rect::Outer
               ? std::array<double, 2>{inner_hi, outer_hi}
               : std::array<double, 2>{outer_lo, inner_lo};
  }
};

// Verifies that the plane cuts the annulus in exactly two rectangles.
std::variant<SectionRects, std::string> validate_section(
    const annulus::AnnulusGeometry& g, const SectionConfig& cfg);

struct MapResult {
  bool ok = false;
  double m = 0.0;
  double xi = 0.0;
  double t = 0.0;      // flight time to the next crossing
  double s_hit = 0.0;  // s at the located crossing (residual check)
  std::string error;
};

struct MapOptions {
  double t_max = 3000.0;
  double rtol = 1e-10;
  double atol = 1e-60;
};

MapResult section_map(const model::Params& p, const SectionConfig& cfg,
                      double m, double xi, const MapOptions& opt = {});

struct AttractorSample {
  std::vector<std::array<double, 2>> points;  // (m, xi) per section hit
  std::string error;  // nonempty if sampling aborted early
};

AttractorSample attractor_sample(const model::Params& p,
                                 const SectionConfig& cfg, double m0,
                                 double xi0, std::size_t burn_in,
                                 std::size_t n, const MapOptions& opt = {});

// ---------------------------------------------------------------------------
// Bifurcation sweep along the iso-tangency path lambda2 = nu * 0.01,
// a2 = lambda2 (kappa - 1) - tau kappa with kappa, tau of the base set.

struct BifurcationRecord {
  double nu = 0.0;
  double lambda2 = 0.0;
  double a2 = 0.0;
  annulus::Verdict verdict = annulus::Verdict::NotCorrect;
  std::string note;
  std::vector<std::array<double, 2>> samples;  // (m, xi); empty unless correct
};

struct SweepConfig {
  model::Params base = model::base_params();
  double nu_min = 1.0;
  double nu_max = 5.0;
  std::size_t steps = 50;
  SectionConfig section;
  std::size_t burn_in = 500;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double proximity_tol = 1e-4;
  // points to skip (already completed in a resumed run); matched on nu
  std::vector<double> skip_nu;
};

std::vector<BifurcationRecord> bifurcation_sweep(const SweepConfig& cfg);

// Cluster count of a sample column under an absolute tolerance; used for
// period detection in the sweep output.
std::size_t cluster_count(std::vector<double> values, double tol);

// ---------------------------------------------------------------------------
// One-dimensional model map

struct ModelMapParams {
  double beta = 0.0;
  double u = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

double model_map(const ModelMapParams& mp, double v);

// Iterates the map; returns the post-burn-in orbit (empty on a pole escape).
std::vector<double> model_map_orbit(const ModelMapParams& mp, double v0,
                                    std::size_t burn_in, std::size_t n);

}  // namespace pann::pmap
