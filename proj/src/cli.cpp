#include "pann/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pann/planar.hpp"
#include "pann/poincare.hpp"
#include "pann/svg.hpp"

namespace pann::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool wants(const io::RunConfig& cfg, const std::string& fmt) {
  for (const auto& f : cfg.formats)
    if (f == fmt) return true;
  return false;
}

fs::path out_path(const io::RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void write_json(const io::RunConfig& cfg, const std::string& name, json j) {
  j["meta"] = {{"tool", io::kToolName},
               {"version", io::kToolVersion},
               {"config_hash", cfg.config_hash()},
               {"seed", cfg.seed}};
  io::write_text_file(out_path(cfg, name), j.dump(2) + "\n");
}

json cycle_summary(const planar::LimitCycle& cyc,
                   const std::vector<double>& crossings) {
  return json{{"period", cyc.period},
              {"anchor_m", cyc.anchor[0]},
              {"section_s", cyc.section_s},
              {"stable", cyc.stable},
              {"multiplier", cyc.multiplier},
              {"crossings", crossings}};
}

}  // namespace

int cmd_audit(const io::RunConfig& cfg) {
  try {
    model::derived(cfg.params);
  } catch (const std::exception& e) {
    std::cerr << "audit: " << e.what() << "\n";
    return 1;
  }
  const json report = io::audit_report_json(cfg.params);
  if (wants(cfg, "json")) write_json(cfg, "audit.json", report);
  const auto rep = model::audit_assumptions(cfg.params);
  std::cout << "assumptions:";
  for (const auto& c : rep.checks)
    std::cout << ' ' << c.id << (c.pass ? "+" : "-");
  const auto d = model::derived(cfg.params);
  std::cout << "\ntau = " << d.tau << ", kappa = " << d.kappa
            << ", kappa0 = " << d.kappa0 << ", gamma = " << d.gamma_ratio
            << "\nextinction: "
            << model::to_string(model::extinction_check(cfg.params).verdict)
            << "\n";
  return 0;
}

int cmd_planar(const io::RunConfig& cfg) {
  json out;
  bool failed = false;
  for (int i = 1; i <= 2; ++i) {
    const double a = i == 1 ? cfg.params.a1 : cfg.params.a2;
    const double lam = i == 1 ? cfg.params.lambda1 : cfg.params.lambda2;
    planar::PlanarSystem sys{a, lam,
                             i == 1 ? planar::Form::Comparison1
                                    : planar::Form::Comparison2};
    json sj;
    sj["a"] = a;
    sj["lambda"] = lam;
    sj["equilibrium_class"] =
        planar::classify_planar_equilibrium(a, lam) ==
                planar::EquilibriumClass::UnstableFocusNode
            ? "unstable-focus-node"
            : "stable-focus-node";
    const auto th2 = planar::cycle_uniqueness_audit(sys, 1000);
    sj["uniqueness_audit"] = {
        {"max_violation_left", th2.max_violation_left},
        {"max_violation_right", th2.max_violation_right},
        {"sign_condition_ok", th2.sign_condition_ok},
        {"pass", th2.pass}};

    planar::CycleSearchOptions copt;
    copt.rtol = cfg.rtol;
    const auto res = planar::find_limit_cycle(sys, planar::CycleMode::Stable,
                                              copt);
    if (planar::found(res)) {
      const auto& cyc = std::get<planar::LimitCycle>(res);
      const model::FieldBundle fb(cfg.params);
      const auto crossings = planar::cycle_tangency_crossings(
          cyc, [&](double s) { return fb.mstar(s); });
      sj["stable_cycle"] = cycle_summary(cyc, crossings);
      if (wants(cfg, "csv"))
        io::write_text_file(
            out_path(cfg, "cycle_comparison" + std::to_string(i) + ".csv"),
            io::csv_cycle(cfg, cyc));
    } else {
      const auto& f = std::get<planar::CycleFailure>(res);
      sj["stable_cycle"] = {{"found", false}, {"reason", f.message}};
      if (f.kind == planar::CycleFailure::Kind::NonConvergence) failed = true;
    }
    out["comparison" + std::to_string(i)] = sj;
  }
  if (wants(cfg, "json")) write_json(cfg, "planar.json", out);
  std::cout << out.dump(2) << "\n";
  return failed ? 1 : 0;
}

int cmd_annulus(const io::RunConfig& cfg) {
  annulus::AnnulusGeometry g;
  try {
    g = annulus::annulus_geometry(cfg.params, cfg.proximity_tol);
  } catch (const std::exception& e) {
    std::cerr << "annulus: " << e.what() << "\n";
    return 1;
  }
  const auto& cl = g.classification;
  if (wants(cfg, "json")) {
    json j = io::classification_json(cl);
    j["params"] = io::params_to_json(cfg.params);
    write_json(cfg, "classification.json", j);
  }
  if (wants(cfg, "csv")) {
    io::write_text_file(out_path(cfg, "tangency_curve.csv"),
                        io::csv_polyline(cfg, g.tangency_curve));
    io::write_text_file(out_path(cfg, "isocline1.csv"),
                        io::csv_polyline(cfg, g.isocline1));
    io::write_text_file(out_path(cfg, "isocline2.csv"),
                        io::csv_polyline(cfg, g.isocline2));
    io::write_text_file(out_path(cfg, "segment_a.csv"),
                        io::csv_polyline(cfg, g.segment_a_arc));
    if (g.outer)
      io::write_text_file(out_path(cfg, "outer_boundary.csv"),
                          io::csv_polyline(cfg, g.outer->polyline));
    if (g.inner_cycle)
      io::write_text_file(out_path(cfg, "inner_boundary.csv"),
                          io::csv_polyline(cfg, *g.inner_cycle));
    if (g.unstable_cycle)
      io::write_text_file(out_path(cfg, "unstable_cycle.csv"),
                          io::csv_polyline(cfg, *g.unstable_cycle));
  }
  if (wants(cfg, "svg")) {
    double m_hi = 0.6;
    if (g.outer)
      for (const auto& q : g.outer->polyline) m_hi = std::max(m_hi, q[0]);
    svg::DataRect rect{0.0, 1.0, 0.0, 1.05 * m_hi};
    svg::Canvas canvas(860, 560, rect,
                       std::string("config ") + cfg.config_hash());
    canvas.axes("s", "m");
    canvas.polyline(g.isocline1, "#88aa88", 1.0);
    canvas.polyline(g.isocline2, "#aaccaa", 1.0);
    canvas.polyline(g.tangency_curve, "#cc8800", 1.2);
    canvas.polyline(g.segment_a_arc, "#cc0000", 2.4);
    if (g.outer) canvas.polyline(g.outer->polyline, "#2244cc", 1.2);
    if (g.inner_cycle) canvas.polyline(*g.inner_cycle, "#008888", 1.2);
    if (g.unstable_cycle) canvas.polyline(*g.unstable_cycle, "#8800aa", 1.0);
    canvas.circle(g.o1[1], g.o1[0], 3.0, "#cc0000");
    canvas.text(g.o1[1] + 0.01, g.o1[0], "O1");
    canvas.circle(g.o2[1], g.o2[0], 3.0, "#cc0000");
    canvas.text(g.o2[1] + 0.01, g.o2[0], "O2");
    if (g.outer) {
      canvas.circle(g.outer->L1[1], g.outer->L1[0], 3.0, "#2244cc");
      canvas.text(g.outer->L1[1] + 0.01, g.outer->L1[0] + 0.02, "L1");
      canvas.circle(g.outer->L2[1], g.outer->L2[0], 3.0, "#2244cc");
      canvas.text(g.outer->L2[1] + 0.01, g.outer->L2[0] + 0.02, "L2");
    }
    io::write_text_file(out_path(cfg, "annulus.svg"), canvas.finish());
  }
  std::cout << "classification: " << annulus::to_string(cl.verdict) << "\n"
            << "evidence: " << cl.evidence << "\n";
  if (!cl.inner_crossings.empty()) {
    std::cout << "inner-cycle tangency crossings:";
    for (double r : cl.inner_crossings) std::cout << ' ' << r;
    std::cout << "\n";
  }
  if (!cl.unstable_crossings.empty()) {
    std::cout << "unstable-cycle tangency crossings:";
    for (double r : cl.unstable_crossings) std::cout << ' ' << r;
    std::cout << "\n";
  }
  return 0;
}

int cmd_poincare(const io::RunConfig& cfg) {
  const auto cl = annulus::classify(cfg.params, cfg.proximity_tol, false);
  if (cl.verdict != annulus::Verdict::CorrectlyDefined) {
    std::cerr << "poincare: map is not correctly defined: " << cl.evidence
              << "\n";
    return 1;
  }
  annulus::AnnulusGeometry g;
  g.p = cfg.params;
  g.outer = cl.outer;
  std::vector<geom::Pt> inner;
  for (const auto& q : cl.inner_cycle->polyline)
    inner.push_back({q[1], q[2]});
  g.inner_cycle = std::move(inner);

  pmap::SectionConfig sc;
  sc.epsilon = cfg.epsilon;
  sc.rect = cfg.rect == "inner" ? pmap::SectionConfig::Rect::Inner
                                : pmap::SectionConfig::Rect::Outer;
  const auto rects = pmap::validate_section(g, sc);
  if (std::holds_alternative<std::string>(rects)) {
    std::cerr << "poincare: " << std::get<std::string>(rects) << "\n";
    return 1;
  }
  const auto host = std::get<pmap::SectionRects>(rects).hosting(sc.rect);
  const double m0 = 0.5 * (host[0] + host[1]);

  pmap::MapOptions mopt;
  mopt.rtol = cfg.rtol;
  const auto sample = pmap::attractor_sample(cfg.params, sc, m0, 0.5,
                                             cfg.burn_in, cfg.samples, mopt);
  if (!sample.error.empty()) {
    std::cerr << "poincare: " << sample.error << "\n";
    return 1;
  }

  json j;
  j["params"] = io::params_to_json(cfg.params);
  j["epsilon"] = sc.epsilon;
  j["rect"] = cfg.rect;
  j["rectangles"] = {
      {"outer_lo", std::get<pmap::SectionRects>(rects).outer_lo},
      {"inner_lo", std::get<pmap::SectionRects>(rects).inner_lo},
      {"inner_hi", std::get<pmap::SectionRects>(rects).inner_hi},
      {"outer_hi", std::get<pmap::SectionRects>(rects).outer_hi}};
  j["burn_in"] = cfg.burn_in;
  j["samples"] = sample.points.size();
  std::vector<double> xi;
  for (const auto& q : sample.points) xi.push_back(q[1]);
  j["xi_clusters_1e-4"] = pmap::cluster_count(xi, 1e-4);
  if (wants(cfg, "json")) write_json(cfg, "poincare.json", j);

  if (wants(cfg, "csv")) {
    std::ostringstream os;
    os << io::metadata_comment(cfg) << "iterate,m,xi\n";
    for (std::size_t k = 0; k < sample.points.size(); ++k) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k,
                    sample.points[k][0], sample.points[k][1]);
      os << buf;
    }
    io::write_text_file(out_path(cfg, "attractor.csv"), os.str());

    // one exemplar circuit, dumped per accepted step, events separately
    const double xi0 =
        sample.points.empty() ? 0.5 : sample.points.back()[1];
    const double mc = sample.points.empty() ? m0 : sample.points.back()[0];
    const double v0 = std::log((1.0 - std::clamp(xi0, 1e-12, 1.0 - 1e-12)) /
                               std::clamp(xi0, 1e-12, 1.0 - 1e-12));
    auto f = [&](double, const ode::Vec<3>& y, ode::Vec<3>& dy) {
      const auto& p = cfg.params;
      const double xi = 1.0 / (1.0 + std::exp(y[1]));
      const auto v = model::eval_transformed_field(
          p, model::TransformedState{y[0], xi, y[2]});
      const double phi1 = (y[2] - p.lambda1) / (y[2] + p.a1);
      const double phi2 = (y[2] - p.lambda2) / (y[2] + p.a2);
      dy = {v[0], phi2 - phi1, v[2]};
    };
    ode::Options<3> o;
    o.rtol = cfg.rtol;
    o.atol = 1e-60;
    o.atol_by_component = ode::Vec<3>{1e-60, 1e-10, 1e-60};
    o.positive = {true, false, true};
    std::vector<ode::EventSpec<3>> ev;
    ev.push_back(
        {[&](double, const ode::Vec<3>& y) { return y[2] - sc.epsilon; },
         sc.direction()});
    const auto tr = ode::integrate<3>(f, {mc, v0, sc.epsilon}, 0.0, 3000.0, o,
                                      ev, ode::StopAtEvent{0, 1});
    std::vector<std::array<double, 4>> rows;
    for (const auto& st : tr.steps) {
      const auto y = st.y_end();
      rows.push_back(
          {st.t0 + st.h, y[0], 1.0 / (1.0 + std::exp(y[1])), y[2]});
    }
    io::write_text_file(out_path(cfg, "circuit.csv"),
                        io::csv_trajectory3(cfg, rows));
    std::ostringstream es;
    es << io::metadata_comment(cfg) << "event_id,t,m,xi,s,direction\n";
    for (const auto& e : tr.events) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", e.id,
                    e.t, e.y[0], 1.0 / (1.0 + std::exp(e.y[1])), e.y[2],
                    e.direction);
      es << buf;
    }
    io::write_text_file(out_path(cfg, "circuit_events.csv"), es.str());
  }
  std::cout << "section hits recorded: " << sample.points.size()
            << " (xi clusters at 1e-4: " << pmap::cluster_count(xi, 1e-4)
            << ")\n";
  return 0;
}

int cmd_sweep(const io::RunConfig& cfg) {
  if (cfg.steps == 0) {
    std::cerr << "sweep: --steps must be positive\n";
    return 2;
  }
  pmap::SweepConfig sw;
  sw.base = cfg.params;
  sw.nu_min = cfg.nu_min;
  sw.nu_max = cfg.nu_max;
  sw.steps = cfg.steps;
  sw.section.epsilon = cfg.epsilon;
  sw.section.rect = cfg.rect == "inner" ? pmap::SectionConfig::Rect::Inner
                                        : pmap::SectionConfig::Rect::Outer;
  sw.burn_in = cfg.burn_in;
  sw.samples = cfg.samples;
  sw.seed = cfg.seed;
  sw.jobs = cfg.jobs;
  sw.proximity_tol = cfg.proximity_tol;

  const auto csv_path = out_path(cfg, "sweep.csv");
  std::vector<double> completed;
  std::string old_rows;
  if (cfg.resume && fs::exists(csv_path)) {
    std::ifstream in(csv_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    completed = io::sweep_csv_completed(content);
    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("nu,", 0) == 0)
        continue;
      old_rows += line + "\n";
    }
  }

  sw.skip_nu = completed;
  auto records = pmap::bifurcation_sweep(sw);
  // resume: keep previously completed rows, emit only the fresh ones
  if (!completed.empty()) {
    std::vector<pmap::BifurcationRecord> fresh;
    for (auto& r : records) {
      bool done = false;
      for (double nu : completed)
        if (std::abs(nu - r.nu) < 1e-12) done = true;
      if (!done) fresh.push_back(std::move(r));
    }
    std::string out = io::metadata_comment(cfg);
    out += "# burn_in: " + std::to_string(cfg.burn_in) +
           " samples: " + std::to_string(cfg.samples) + "\n";
    out += "nu,lambda2,a2,verdict,xi_sample,m_sample\n";
    out += old_rows;
    const std::string fresh_csv = io::csv_sweep(cfg, fresh);
    std::istringstream lines(fresh_csv);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("nu,", 0) == 0)
        continue;
      out += line + "\n";
    }
    io::write_text_file(csv_path, out);
  } else if (wants(cfg, "csv")) {
    io::write_text_file(csv_path, io::csv_sweep(cfg, records));
  }

  if (wants(cfg, "svg")) {
    svg::DataRect rect{cfg.nu_min, cfg.nu_max, 0.0, 1.0};
    svg::Canvas canvas(900, 540, rect,
                       std::string("config ") + cfg.config_hash());
    canvas.axes("nu", "xi");
    std::vector<std::array<double, 2>> pts;
    for (const auto& r : records)
      for (const auto& s : r.samples) pts.push_back({r.nu, s[1]});
    canvas.scatter(pts, "#223388", 1.0);
    io::write_text_file(out_path(cfg, "sweep.svg"), canvas.finish());
  }

  std::size_t correct = 0;
  for (const auto& r : records)
    if (r.verdict == annulus::Verdict::CorrectlyDefined) ++correct;
  std::cout << "sweep points: " << records.size()
            << ", correctly defined: " << correct;
  if (!completed.empty())
    std::cout << " (reused from resume: " << completed.size() << ")";
  std::cout << "\n";
  return 0;
}

int cmd_model_map(const io::RunConfig& cfg) {
  if (!cfg.mm_u || !cfg.mm_k1 || !cfg.mm_k2 || cfg.mm_steps == 0) {
    std::cerr << "model-map: --u, --k1, --k2, --beta-min, --beta-max and "
                 "--steps are required (the map ships no default constants)\n";
    return 2;
  }
  std::ostringstream os;
  os << io::metadata_comment(cfg) << "beta,v_sample\n";
  std::vector<std::array<double, 2>> pts;
  std::vector<std::size_t> periods;
  for (std::size_t i = 0; i < cfg.mm_steps; ++i) {
    const double beta =
        cfg.mm_steps == 1
            ? cfg.mm_beta_min
            : cfg.mm_beta_min + (cfg.mm_beta_max - cfg.mm_beta_min) *
                                    static_cast<double>(i) /
                                    static_cast<double>(cfg.mm_steps - 1);
    pmap::ModelMapParams mp{beta, *cfg.mm_u, *cfg.mm_k1, *cfg.mm_k2};
    const auto orbit = pmap::model_map_orbit(mp, cfg.mm_v0, 2000, 64);
    periods.push_back(pmap::cluster_count(orbit, 1e-6));
    for (const double v : orbit) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", beta, v);
      os << buf;
      pts.push_back({beta, v});
    }
  }
  if (wants(cfg, "csv"))
    io::write_text_file(out_path(cfg, "model_map.csv"), os.str());
  if (wants(cfg, "svg")) {
    double vlo = 0.0, vhi = 1.0;
    if (!pts.empty()) {
      vlo = vhi = pts.front()[1];
      for (const auto& q : pts) {
        vlo = std::min(vlo, q[1]);
        vhi = std::max(vhi, q[1]);
      }
    }
    svg::DataRect rect{cfg.mm_beta_min, cfg.mm_beta_max, vlo, vhi};
    svg::Canvas canvas(900, 540, rect,
                       std::string("config ") + cfg.config_hash());
    canvas.axes("beta", "v");
    canvas.scatter(pts, "#884422", 1.0);
    io::write_text_file(out_path(cfg, "model_map.svg"), canvas.finish());
  }
  std::size_t maxp = 0;
  for (const auto p : periods) maxp = std::max(maxp, p);
  std::cout << "beta values: " << cfg.mm_steps
            << ", max cluster count: " << maxp << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
  CLI::App app{"invariant-annulus numerics for a two-predator one-prey flow"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand name

  std::string config_path;
  io::RunConfig cfg;
  // flag presence trackers; flags override config-file values
  double tol_rel = 0, tol_abs = 0, epsilon = 0, nu_min = 0, nu_max = 0;
  double proximity = 0;
  std::size_t steps = 0, burn_in = 0, samples = 0;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out_dir, rect;
  bool resume = false;
  double mm_u = 0, mm_k1 = 0, mm_k2 = 0, mm_beta_min = 0, mm_beta_max = 0,
         mm_v0 = 0.5;
  std::size_t mm_steps = 0;

  app.add_option("--config", config_path, "config file (JSON or key=value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "worker threads for sweeps");
  app.add_option("--tol-rel", tol_rel, "relative tolerance");
  app.add_option("--tol-abs", tol_abs, "absolute tolerance");
  app.add_option("--epsilon", epsilon, "section level s = epsilon");
  app.add_option("--rect", rect, "hosting rectangle: outer|inner");
  app.add_option("--nu-min", nu_min, "sweep start");
  app.add_option("--nu-max", nu_max, "sweep end");
  app.add_option("--steps", steps, "sweep points");
  app.add_option("--burn-in", burn_in, "discarded section hits");
  app.add_option("--samples", samples, "recorded section hits");
  app.add_option("--seed", seed, "rng seed echoed to outputs");
  app.add_option("--proximity-tol", proximity,
                 "sliding-segment proximity tolerance");
  app.add_flag("--resume", resume, "reuse completed sweep rows");

  auto* audit = app.add_subcommand("audit", "assumption and parameter audit");
  auto* planar_cmd =
      app.add_subcommand("planar", "planar comparison-system analysis");
  auto* annulus_cmd =
      app.add_subcommand("annulus", "invariant-annulus construction");
  auto* poincare_cmd =
      app.add_subcommand("poincare", "section-map attractor sampling");
  auto* sweep = app.add_subcommand("sweep", "iso-tangency bifurcation sweep");
  auto* mm = app.add_subcommand("model-map", "one-dimensional model map");
  mm->add_option("--u", mm_u, "map constant u")->required();
  mm->add_option("--k1", mm_k1, "map constant k1")->required();
  mm->add_option("--k2", mm_k2, "map constant k2")->required();
  mm->add_option("--beta-min", mm_beta_min, "beta sweep start")->required();
  mm->add_option("--beta-max", mm_beta_max, "beta sweep end")->required();
  mm->add_option("--map-steps", mm_steps, "beta sweep points")->required();
  mm->add_option("--v0", mm_v0, "initial v");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) cfg = io::load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }

  if (app.count("--out")) cfg.out_dir = out_dir;
  if (app.count("--jobs")) cfg.jobs = jobs;
  if (app.count("--tol-rel")) cfg.rtol = tol_rel;
  if (app.count("--tol-abs")) cfg.atol = tol_abs;
  if (app.count("--epsilon")) cfg.epsilon = epsilon;
  if (app.count("--rect")) cfg.rect = rect;
  if (app.count("--nu-min")) cfg.nu_min = nu_min;
  if (app.count("--nu-max")) cfg.nu_max = nu_max;
  if (app.count("--steps")) cfg.steps = steps;
  if (app.count("--burn-in")) cfg.burn_in = burn_in;
  if (app.count("--samples")) cfg.samples = samples;
  if (app.count("--seed")) cfg.seed = seed;
  if (app.count("--proximity-tol")) cfg.proximity_tol = proximity;
  if (resume) cfg.resume = true;
  if (mm->count("--u")) cfg.mm_u = mm_u;
  if (mm->count("--k1")) cfg.mm_k1 = mm_k1;
  if (mm->count("--k2")) cfg.mm_k2 = mm_k2;
  if (mm->count("--beta-min")) cfg.mm_beta_min = mm_beta_min;
  if (mm->count("--beta-max")) cfg.mm_beta_max = mm_beta_max;
  if (mm->count("--map-steps")) cfg.mm_steps = mm_steps;
  if (mm->count("--v0")) cfg.mm_v0 = mm_v0;

  const bool needs_params = audit->parsed() || planar_cmd->parsed() ||
                            annulus_cmd->parsed() || poincare_cmd->parsed();
  if (needs_params && !cfg.params_given) {
    std::cerr << "a parameter set is required: pass --config with keys "
                 "a1, a2, lambda1, lambda2\n";
    return 2;
  }

  try {
    if (audit->parsed()) {
      cfg.command = "audit";
      return cmd_audit(cfg);
    }
    if (planar_cmd->parsed()) {
      cfg.command = "planar";
      return cmd_planar(cfg);
    }
    if (annulus_cmd->parsed()) {
      cfg.command = "annulus";
      return cmd_annulus(cfg);
    }
    if (poincare_cmd->parsed()) {
      cfg.command = "poincare";
      return cmd_poincare(cfg);
    }
    if (sweep->parsed()) {
      cfg.command = "sweep";
      return cmd_sweep(cfg);
    }
    if (mm->parsed()) {
      cfg.command = "model-map";
      return cmd_model_map(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pann::cli
