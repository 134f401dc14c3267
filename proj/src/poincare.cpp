#include "pann/poincare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace pann::pmap {

namespace {

// Full flow in (m, v, s) with v = ln(x2/x1). The ratio equation
// v' = phi2(s) - phi1(s) does not depend on v, so predator-fraction
// excursions of hundreds of e-folds along relaxation loops stay exactly
// representable; xi = 1/(1 + e^v) is recovered at section hits only.
struct FullFieldLogRatio {
  double a1, a2, l1, l2;
  void operator()(double, const Vec3& y, Vec3& dy) const {
    const double m = y[0], v = y[1], s = y[2];
    const double sa1 = s + a1, sa2 = s + a2;
    const double phi1 = (s - l1) / sa1, phi2 = (s - l2) / sa2;
    const double psi1 = s / sa1, psi2 = s / sa2;
    const double xi = 1.0 / (1.0 + std::exp(v));
    const double growth = phi1 * xi + phi2 * (1.0 - xi);
    const double uptake = psi1 * xi + psi2 * (1.0 - xi);
    dy = {growth * m, phi2 - phi1, s * (1.0 - s) - uptake * m};
  }
};

ode::Options<3> full_options(const MapOptions& opt) {
  ode::Options<3> o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  o.positive = {true, false, true};
  o.keep_dense = false;
  // v is an additive walk; relative control on it is meaningless near 0
  o.atol_by_component = Vec3{opt.atol, 1e-10, opt.atol};
  return o;
}

}  // namespace

std::variant<SectionRects, std::string> validate_section(
    const annulus::AnnulusGeometry& g, const SectionConfig& cfg) {
  if (!g.outer || !g.inner_cycle)
    return std::string("annulus geometry incomplete");
  const auto outer = geom::line_crossings(g.outer->polyline, cfg.epsilon);
  const auto inner = geom::line_crossings(*g.inner_cycle, cfg.epsilon);
  if (outer.size() != 2) {
    std::ostringstream os;
    os << "outer boundary crosses s = " << cfg.epsilon << " at "
       << outer.size() << " points (need 2)";
    return os.str();
  }
  if (inner.size() != 2) {
    std::ostringstream os;
    os << "inner boundary crosses s = " << cfg.epsilon << " at "
       << inner.size() << " points (need 2)";
    return os.str();
  }
  SectionRects r;
  r.outer_lo = outer[0];
  r.inner_lo = inner[0];
  r.inner_hi = inner[1];
  r.outer_hi = outer[1];
  if (!(r.outer_lo < r.inner_lo && r.inner_lo < r.inner_hi &&
        r.inner_hi < r.outer_hi))
    return std::string(
        "section intervals are not nested (outer_lo < inner_lo < inner_hi < "
        "outer_hi fails)");
  return r;
}

MapResult section_map(const model::Params& p, const SectionConfig& cfg,
                      double m, double xi, const MapOptions& opt) {
  MapResult res;
  if (!(m > 0.0) || xi < 0.0 || xi > 1.0) {
    res.error = "start point outside the section domain";
    return res;
  }

  // The faces xi = 0 and xi = 1 are invariant coordinate planes; the map
  // there is the planar comparison return map, with xi preserved exactly.
  if (xi == 0.0 || xi == 1.0) {
    const double a = xi == 1.0 ? p.a1 : p.a2;
    const double lam = xi == 1.0 ? p.lambda1 : p.lambda2;
    auto f2 = [a, lam](double, const ode::Vec<2>& y, ode::Vec<2>& dy) {
      dy = {(y[1] - lam) / (y[1] + a) * y[0],
            y[1] * (1.0 - y[1]) - y[1] / (y[1] + a) * y[0]};
    };
    ode::Options<2> o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.positive = {true, true};
    o.keep_dense = false;
    std::vector<ode::EventSpec<2>> ev;
    ev.push_back(
        {[eps = cfg.epsilon](double, const ode::Vec<2>& y) {
           return y[1] - eps;
         },
         cfg.direction()});
    const auto tr = ode::integrate<2>(f2, ode::Vec<2>{m, cfg.epsilon}, 0.0,
                                      opt.t_max, o, ev, ode::StopAtEvent{0, 1});
    if (tr.status != ode::Status::EventStop) {
      res.error = std::string("no return: ") + to_string(tr.status);
      return res;
    }
    res.ok = true;
    res.m = tr.y_end[0];
    res.xi = xi;
    res.t = tr.t_end;
    res.s_hit = tr.y_end[1];
    return res;
  }

  FullFieldLogRatio f{p.a1, p.a2, p.lambda1, p.lambda2};
  const double v0 = std::log((1.0 - xi) / xi);
  std::vector<ode::EventSpec<3>> ev;
  ev.push_back(
      {[eps = cfg.epsilon](double, const Vec3& y) { return y[2] - eps; },
       cfg.direction()});
  const auto tr =
      ode::integrate<3>(f, Vec3{m, v0, cfg.epsilon}, 0.0, opt.t_max,
                        full_options(opt), ev, ode::StopAtEvent{0, 1});
  if (tr.status != ode::Status::EventStop) {
    if (tr.y_end[2] > 1.2 || tr.y_end[0] > 100.0) {
      std::ostringstream os;
      os << "escaped the annulus (m = " << tr.y_end[0]
         << ", v = " << tr.y_end[1] << ", s = " << tr.y_end[2] << ")";
      res.error = os.str();
    } else {
      res.error = std::string("no return: ") + to_string(tr.status);
    }
    return res;
  }
  res.ok = true;
  res.m = tr.y_end[0];
  res.xi = 1.0 / (1.0 + std::exp(tr.y_end[1]));
  res.t = tr.t_end;
  res.s_hit = tr.y_end[2];
  return res;
}

AttractorSample attractor_sample(const model::Params& p,
                                 const SectionConfig& cfg, double m0,
                                 double xi0, std::size_t burn_in,
                                 std::size_t n, const MapOptions& opt) {
  AttractorSample out;
  double m = m0, xi = xi0;
  for (std::size_t k = 0; k < burn_in + n; ++k) {
    const MapResult r = section_map(p, cfg, m, xi, opt);
    if (!r.ok) {
      out.error = r.error;
      return out;
    }
    m = r.m;
    xi = r.xi;
    if (k >= burn_in) out.points.push_back({m, xi});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t cluster_count(std::vector<double> values, double tol) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  std::size_t clusters = 1;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] - values[i - 1] > tol) ++clusters;
  return clusters;
}

std::vector<BifurcationRecord> bifurcation_sweep(const SweepConfig& cfg) {
  const auto d0 = model::derived(cfg.base);
  std::vector<BifurcationRecord> records(cfg.steps);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.steps) return;
      BifurcationRecord& rec = records[i];
      rec.nu = cfg.steps == 1
                   ? cfg.nu_min
                   : cfg.nu_min + (cfg.nu_max - cfg.nu_min) *
                                      static_cast<double>(i) /
                                      static_cast<double>(cfg.steps - 1);
      rec.lambda2 = rec.nu * 0.01;
      bool skip = false;
      for (const double nu : cfg.skip_nu)
        if (std::abs(nu - rec.nu) < 1e-12) skip = true;
      if (skip) {
        rec.note = "skipped (resume)";
        continue;
      }
      model::Params p = cfg.base;
      p.lambda2 = rec.lambda2;
      try {
        rec.a2 = model::iso_tangency_a(rec.lambda2, d0.kappa, d0.tau);
      } catch (const std::exception& e) {
        rec.note = e.what();
        continue;
      }
      p.a2 = rec.a2;
      if (!(p.lambda2 < p.lambda1)) {
        rec.note = "lambda2 >= lambda1 on the path";
        continue;
      }

      annulus::Classification cl;
      try {
        cl = annulus::classify(p, cfg.proximity_tol, false);
      } catch (const std::exception& e) {
        rec.note = e.what();
        continue;
      }
      rec.verdict = cl.verdict;
      if (cl.verdict != annulus::Verdict::CorrectlyDefined) {
        rec.note = cl.evidence;
        continue;
      }

      annulus::AnnulusGeometry g;
      g.p = p;
      g.outer = cl.outer;
      std::vector<geom::Pt> inner_poly;
      for (const auto& q : cl.inner_cycle->polyline)
        inner_poly.push_back({q[1], q[2]});
      g.inner_cycle = std::move(inner_poly);
      const auto rects = validate_section(g, cfg.section);
      if (std::holds_alternative<std::string>(rects)) {
        rec.note = std::get<std::string>(rects);
        continue;
      }
      const auto host = std::get<SectionRects>(rects).hosting(cfg.section.rect);

      std::mt19937_64 rng(cfg.seed + i);
      std::uniform_real_distribution<double> jitter(0.35, 0.65);
      const double m0 = host[0] + (host[1] - host[0]) * jitter(rng);
      const double xi0 = 0.5;
      auto sample =
          attractor_sample(p, cfg.section, m0, xi0, cfg.burn_in, cfg.samples);
      if (!sample.error.empty()) {
        rec.note = sample.error;
        rec.samples = std::move(sample.points);
        continue;
      }
      rec.samples = std::move(sample.points);
    }
  };

  const unsigned jobs = std::max(1u, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------

double model_map(const ModelMapParams& mp, double v) {
  const double denom = 1.0 + v;
  if (std::abs(denom) < 1e-12)
    throw std::domain_error("model map pole at v = -1");
  return mp.beta + v - (mp.k1 + mp.k2 * std::exp(v)) / denom * mp.u;
}

std::vector<double> model_map_orbit(const ModelMapParams& mp, double v0,
                                    std::size_t burn_in, std::size_t n) {
  std::vector<double> out;
  double v = v0;
  for (std::size_t k = 0; k < burn_in + n; ++k) {
    if (std::abs(1.0 + v) < 1e-9 || !std::isfinite(v)) return {};
    v = model_map(mp, v);
    if (k >= burn_in) out.push_back(v);
  }
  return out;
}

}  // namespace pann::pmap
