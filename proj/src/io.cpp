#include "pann/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pann::io {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double num(const json& j, const char* key) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string("missing parameter key: ") + key);
  if (!j[key].is_number())
    throw std::invalid_argument(std::string("parameter is not numeric: ") +
                                key);
  return j[key].get<double>();
}

}  // namespace

model::Params params_from_json(const json& j) {
  model::Params p;
  p.a1 = num(j, "a1");
  p.a2 = num(j, "a2");
  p.lambda1 = num(j, "lambda1");
  p.lambda2 = num(j, "lambda2");
  model::require_positive(p);
  return p;
}

nlohmann::json params_to_json(const model::Params& p) {
  return json{{"a1", p.a1},
              {"a2", p.a2},
              {"lambda1", p.lambda1},
              {"lambda2", p.lambda2}};
}

model::Params parse_params_text(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    return params_from_json(json::parse(t));
  }
  json j = json::object();
  std::istringstream in(t);
  std::string line;
  while (std::getline(in, line)) {
    const std::string l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value line: " + l);
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    try {
      j[key] = std::stod(val);
    } catch (const std::exception&) {
      throw std::invalid_argument("non-numeric value for " + key);
    }
  }
  return params_from_json(j);
}

// ---------------------------------------------------------------------------

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["params"] = params_to_json(params);
  j["tolerances"] = {{"rtol", rtol}, {"atol", atol}};
  j["epsilon"] = epsilon;
  j["rect"] = rect;
  j["sweep"] = {{"nu_min", nu_min},
                {"nu_max", nu_max},
                {"steps", steps},
                {"burn_in", burn_in},
                {"samples", samples}};
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["proximity_tol"] = proximity_tol;
  j["out"] = out_dir;
  j["formats"] = formats;
  j["resume"] = resume;
  if (mm_u) {
    j["model_map"] = {{"u", *mm_u},         {"k1", *mm_k1},
                      {"k2", *mm_k2},       {"beta_min", mm_beta_min},
                      {"beta_max", mm_beta_max}, {"steps", mm_steps},
                      {"v0", mm_v0}};
  }
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  if (j.contains("command")) c.command = j["command"].get<std::string>();
  if (j.contains("params")) {
    c.params = params_from_json(j["params"]);
    c.params_given = true;
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("rtol")) c.rtol = t["rtol"].get<double>();
    if (t.contains("atol")) c.atol = t["atol"].get<double>();
  }
  if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
  if (j.contains("rect")) c.rect = j["rect"].get<std::string>();
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (s.contains("nu_min")) c.nu_min = s["nu_min"].get<double>();
    if (s.contains("nu_max")) c.nu_max = s["nu_max"].get<double>();
    if (s.contains("steps")) c.steps = s["steps"].get<std::size_t>();
    if (s.contains("burn_in")) c.burn_in = s["burn_in"].get<std::size_t>();
    if (s.contains("samples")) c.samples = s["samples"].get<std::size_t>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("jobs")) c.jobs = j["jobs"].get<unsigned>();
  if (j.contains("proximity_tol"))
    c.proximity_tol = j["proximity_tol"].get<double>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("formats"))
    c.formats = j["formats"].get<std::vector<std::string>>();
  if (j.contains("resume")) c.resume = j["resume"].get<bool>();
  if (j.contains("model_map")) {
    const auto& m = j["model_map"];
    if (m.contains("u")) c.mm_u = m["u"].get<double>();
    if (m.contains("k1")) c.mm_k1 = m["k1"].get<double>();
    if (m.contains("k2")) c.mm_k2 = m["k2"].get<double>();
    if (m.contains("beta_min")) c.mm_beta_min = m["beta_min"].get<double>();
    if (m.contains("beta_max")) c.mm_beta_max = m["beta_max"].get<double>();
    if (m.contains("steps")) c.mm_steps = m["steps"].get<std::size_t>();
    if (m.contains("v0")) c.mm_v0 = m["v0"].get<double>();
  }
  return c;
}

std::string RunConfig::config_hash() const {
  // Pin the computation, not the output location.
  json j = to_json();
  j.erase("out");
  j.erase("resume");
  return hash_hex(j.dump());
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = trim(buf.str());
  if (!text.empty() && text.front() == '{') {
    const json j = json::parse(text);
    RunConfig c = RunConfig::from_json(j);
    return c;
  }
  RunConfig c;
  c.params = parse_params_text(text);
  c.params_given = true;
  return c;
}

// ---------------------------------------------------------------------------

json audit_report_json(const model::Params& p) {
  json j;
  j["params"] = params_to_json(p);
  j["assumptions"] = json::array();
  for (const auto& c : model::audit_assumptions(p).checks)
    j["assumptions"].push_back(
        {{"id", c.id}, {"pass", c.pass}, {"witness", c.witness}});
  try {
    const auto d = model::derived(p);
    j["derived"] = {{"tau", d.tau},
                    {"kappa0", d.kappa0},
                    {"kappa", d.kappa},
                    {"gamma_ratio", d.gamma_ratio}};
  } catch (const std::exception& e) {
    j["derived"] = {{"error", e.what()}};
  }
  try {
    j["equilibria"] = json::array();
    for (const auto& e : model::equilibria(p)) {
      json eigs = json::array();
      for (const auto& ev : e.eigenvalues)
        eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
      j["equilibria"].push_back({{"kind", model::to_string(e.kind)},
                                 {"x1", e.location.x1},
                                 {"x2", e.location.x2},
                                 {"s", e.location.s},
                                 {"eigenvalues", eigs},
                                 {"class", e.classification}});
    }
  } catch (const std::exception& e) {
    j["equilibria"] = {{"error", e.what()}};
  }
  const auto ext = model::extinction_check(p);
  j["extinction"] = {{"verdict", model::to_string(ext.verdict)},
                     {"x1_threshold", ext.x1_threshold}};
  return j;
}

json classification_json(const annulus::Classification& cl) {
  json j;
  j["verdict"] = annulus::to_string(cl.verdict);
  j["evidence"] = cl.evidence;
  if (cl.min_dist_to_a) j["min_dist_to_segment_a"] = *cl.min_dist_to_a;
  if (cl.inner_cycle) {
    j["inner_cycle"] = {{"period", cl.inner_cycle->period},
                        {"anchor_m", cl.inner_cycle->anchor[0]},
                        {"section_s", cl.inner_cycle->section_s},
                        {"multiplier", cl.inner_cycle->multiplier},
                        {"tangency_crossings", cl.inner_crossings}};
  }
  if (cl.unstable_cycle) {
    j["unstable_cycle"] = {{"period", cl.unstable_cycle->period},
                           {"anchor_m", cl.unstable_cycle->anchor[0]},
                           {"multiplier", cl.unstable_cycle->multiplier},
                           {"tangency_crossings", cl.unstable_crossings}};
  }
  if (cl.outer) {
    j["outer_boundary"] = {
        {"anchor", {cl.outer->anchor[0], cl.outer->anchor[1]}},
        {"L1", {cl.outer->L1[0], cl.outer->L1[1]}},
        {"L2", {cl.outer->L2[0], cl.outer->L2[1]}},
        {"points", cl.outer->polyline.size()}};
  }
  return j;
}

// ---------------------------------------------------------------------------

std::string metadata_comment(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# tool: " << kToolName << " " << kToolVersion << "\n";
  os << "# config_hash: " << cfg.config_hash() << "\n";
  os << "# seed: " << cfg.seed << "\n";
  return os.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

void fmt_g17(std::ostringstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

std::string csv_polyline(const RunConfig& cfg,
                         const std::vector<geom::Pt>& pts) {
  std::ostringstream os;
  os << metadata_comment(cfg) << "m,s\n";
  for (const auto& p : pts) {
    fmt_g17(os, p[0]);
    os << ',';
    fmt_g17(os, p[1]);
    os << '\n';
  }
  return os.str();
}

std::string csv_cycle(const RunConfig& cfg, const planar::LimitCycle& cyc) {
  std::ostringstream os;
  os << metadata_comment(cfg) << "t,m,s\n";
  for (const auto& q : cyc.polyline) {
    fmt_g17(os, q[0]);
    os << ',';
    fmt_g17(os, q[1]);
    os << ',';
    fmt_g17(os, q[2]);
    os << '\n';
  }
  return os.str();
}

std::string csv_sweep(const RunConfig& cfg,
                      const std::vector<pmap::BifurcationRecord>& recs) {
  std::ostringstream os;
  os << metadata_comment(cfg);
  os << "# burn_in: " << cfg.burn_in << " samples: " << cfg.samples << "\n";
  os << "nu,lambda2,a2,verdict,xi_sample,m_sample\n";
  for (const auto& r : recs) {
    if (r.samples.empty()) {
      fmt_g17(os, r.nu);
      os << ',';
      fmt_g17(os, r.lambda2);
      os << ',';
      fmt_g17(os, r.a2);
      os << ',' << annulus::to_string(r.verdict) << ",,\n";
      continue;
    }
    for (const auto& smp : r.samples) {
      fmt_g17(os, r.nu);
      os << ',';
      fmt_g17(os, r.lambda2);
      os << ',';
      fmt_g17(os, r.a2);
      os << ',' << annulus::to_string(r.verdict) << ',';
      fmt_g17(os, smp[1]);
      os << ',';
      fmt_g17(os, smp[0]);
      os << '\n';
    }
  }
  return os.str();
}

std::string csv_trajectory3(const RunConfig& cfg,
                            const std::vector<std::array<double, 4>>& rows) {
  std::ostringstream os;
  os << metadata_comment(cfg) << "t,m,xi,s\n";
  for (const auto& r : rows) {
    fmt_g17(os, r[0]);
    for (int i = 1; i < 4; ++i) {
      os << ',';
      fmt_g17(os, r[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<double> sweep_csv_completed(const std::string& content) {
  std::vector<double> done;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("nu,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      const double nu = std::stod(line.substr(0, comma));
      if (done.empty() || std::abs(done.back() - nu) > 1e-12)
        done.push_back(nu);
    } catch (const std::exception&) {
    }
  }
  return done;
}

}  // namespace pann::io
