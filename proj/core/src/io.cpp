#include "entropylab/io.hpp"

#include "entropylab/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace elab {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " from '" + s + "'");
  }
  if (pos != s.size()) throw ValidationError("cannot parse " + what + " from '" + s + "'");
  return v;
}

std::vector<double> numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(p, what));
  return out;
}

void require_count(const std::vector<double>& v, size_t lo, size_t hi, const std::string& what) {
  if (v.size() < lo || v.size() > hi) throw ValidationError(what + ": wrong number of parameters");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "' in " + where);
}

double num(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw ValidationError(std::string("parameter '") + key + "' must be a number");
  return p[key].get<double>();
}

AnalyticDomain analytic_from(const std::string& variant, const json& p) {
  AnalyticDomain d;
  if (variant == "disk") {
    reject_unknown(p, {"R", "cx", "cy"}, "disk params");
    d = Disk{num(p, "R", 1.0), Vec2(num(p, "cx", 0.0), num(p, "cy", 0.0))};
  } else if (variant == "half_plane") {
    reject_unknown(p, {"a"}, "half_plane params");
    d = HalfPlane{num(p, "a", 0.0)};
  } else if (variant == "slab") {
    reject_unknown(p, {"d", "dim"}, "slab params");
    d = Slab{num(p, "d", 1.0), static_cast<int>(num(p, "dim", 2))};
  } else if (variant == "grim_reaper_2d") {
    reject_unknown(p, {}, "grim_reaper_2d params");
    d = GrimReaper2D{};
  } else if (variant == "grim_reaper_product") {
    reject_unknown(p, {"n"}, "grim_reaper_product params");
    d = GrimReaperProduct{static_cast<int>(num(p, "n", 1))};
  } else if (variant == "catenoid" || variant == "catenoid_3d") {
    reject_unknown(p, {}, "catenoid params");
    d = Catenoid3D{};
  } else if (variant == "ball") {
    reject_unknown(p, {"R", "dim"}, "ball params");
    d = Ball{num(p, "R", 1.0), static_cast<int>(num(p, "dim", 2))};
  } else if (variant == "ellipse") {
    reject_unknown(p, {"a", "b"}, "ellipse params");
    d = Ellipse{num(p, "a", 1.0), num(p, "b", 1.0)};
  } else {
    throw ValidationError("unknown analytic variant '" + variant + "'");
  }
  validate(d);
  return d;
}

AnalyticDomain analytic_shorthand(const std::string& rest) {
  const auto colon = rest.find(':');
  const std::string variant = rest.substr(0, colon);
  const std::vector<double> v = colon == std::string::npos ? std::vector<double>{} : numbers(rest.substr(colon + 1), variant);
  json p = json::object();
  if (variant == "disk") {
    require_count(v, 1, 3, variant);
    p["R"] = v[0];
    if (v.size() > 1) p["cx"] = v[1];
    if (v.size() > 2) p["cy"] = v[2];
  } else if (variant == "half_plane") {
    require_count(v, 0, 1, variant);
    if (!v.empty()) p["a"] = v[0];
  } else if (variant == "slab") {
    require_count(v, 1, 2, variant);
    p["d"] = v[0];
    if (v.size() > 1) p["dim"] = v[1];
  } else if (variant == "grim_reaper_product") {
    require_count(v, 1, 1, variant);
    p["n"] = v[0];
  } else if (variant == "ball") {
    require_count(v, 1, 2, variant);
    p["R"] = v[0];
    if (v.size() > 1) p["dim"] = v[1];
  } else if (variant == "ellipse") {
    require_count(v, 2, 2, variant);
    p["a"] = v[0];
    p["b"] = v[1];
  } else {
    require_count(v, 0, 0, variant);
  }
  return analytic_from(variant, p);
}

}  // namespace

CollapseDomain parse_domain_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("domain file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("domain file needs a string \"type\"");
  const std::string type = j["type"];
  if (type == "polyline") {
    reject_unknown(j, {"type", "vertices"}, "polyline domain");
    if (!j.contains("vertices") || !j["vertices"].is_array()) throw ValidationError("polyline needs \"vertices\"");
    std::vector<Vec2> v;
    for (const auto& p : j["vertices"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ValidationError("polyline vertices must be [x, y] pairs");
      v.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    if (v.size() > 1 && v.front() == v.back()) v.pop_back();
    Curve c(std::move(v));
    if (!c.counter_clockwise()) c = c.reversed();
    c.require_simple_ccw();
    return c;
  }
  if (type == "analytic") {
    reject_unknown(j, {"type", "variant", "params"}, "analytic domain");
    if (!j.contains("variant") || !j["variant"].is_string()) throw ValidationError("analytic domain needs \"variant\"");
    return analytic_from(j["variant"], j.value("params", json::object()));
  }
  throw ValidationError("unknown domain type '" + type + "'");
}

CollapseDomain parse_domain(const std::string& spec, int vertices) {
  if (vertices < 8) throw ValidationError("at least 8 vertices are needed");
  if (spec.rfind("analytic:", 0) == 0) return analytic_shorthand(spec.substr(9));
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    const std::vector<double> v = numbers(spec.substr(colon + 1), kind);
    if (kind == "disk") {
      require_count(v, 1, 1, kind);
      if (!(v[0] > 0.0)) throw ValidationError("disk radius must be positive");
      return Curve::circle(v[0], vertices);
    }
    if (kind == "ellipse") {
      require_count(v, 2, 2, kind);
      if (!(v[0] > 0.0 && v[1] > 0.0)) throw ValidationError("ellipse axes must be positive");
      return Curve::ellipse(v[0], v[1], vertices);
    }
    if (kind == "rounded_square") {
      require_count(v, 2, 2, kind);
      return Curve::rounded_square(v[0], v[1], vertices);
    }
  }
  if (!std::filesystem::exists(spec)) throw ValidationError("unknown domain '" + spec + "'");
  return parse_domain_json(read_file(spec));
}

Curve domain_curve(const CollapseDomain& domain, int vertices) {
  if (const Curve* c = std::get_if<Curve>(&domain)) return *c;
  return boundary_curve(std::get<AnalyticDomain>(domain), vertices);
}

std::vector<double> parse_radii(const std::string& spec) {
  if (spec.rfind("geometric:", 0) == 0) {
    const auto v = numbers(spec.substr(10), "radii");
    require_count(v, 2, 3, "geometric radii");
    return geometric_radii(v[0], v[1], v.size() > 2 ? v[2] : 2.0);
  }
  auto v = numbers(spec, "radii");
  if (v.empty()) throw ValidationError("no radii given");
  for (double r : v)
    if (!(r > 0.0)) throw ValidationError("radii must be positive");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw ValidationError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string mesh_json(const TriMesh& mesh) {
  json j;
  json nodes = json::array(), tris = json::array(), loop = json::array();
  for (const auto& p : mesh.nodes) nodes.push_back({p.x(), p.y()});
  for (const auto& t : mesh.tris) tris.push_back({t[0], t[1], t[2]});
  for (int k = 0; k < mesh.n_boundary; ++k) loop.push_back(k);
  j["vertices"] = nodes;
  j["triangles"] = tris;
  j["boundary_loop"] = loop;
  j["curve_vertex"] = mesh.curve_vertex;
  j["h"] = mesh.h;
  return j.dump() + "\n";
}

std::string trajectory_jsonl(const FlowTrajectory& tr) {
  std::string out;
  json head{{"a", tr.a},          {"T_est", tr.T_est},           {"dt", tr.dt},     {"steps", tr.steps},
            {"truncated", tr.truncated}, {"stationary", tr.stationary}, {"note", tr.note}, {"snapshots", tr.size()}};
  out += head.dump() + "\n";
  for (const auto& s : tr.snapshots) {
    json v = json::array();
    for (const auto& p : s.curve.vertices()) v.push_back({p.x(), p.y()});
    json line{{"t", s.t}, {"tau", s.tau}, {"area", s.area}, {"length", s.length}, {"vertices", v}};
    out += line.dump() + "\n";
  }
  return out;
}

FlowTrajectory parse_trajectory_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FlowTrajectory tr;
  bool head = true;
  int expected = -1;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (head) {
        reject_unknown(j, {"a", "T_est", "dt", "steps", "truncated", "stationary", "note", "snapshots"},
                       "trajectory header");
        tr.a = j.at("a");
        tr.T_est = j.at("T_est");
        tr.dt = j.value("dt", 0.0);
        tr.steps = j.value("steps", 0L);
        tr.truncated = j.value("truncated", false);
        tr.stationary = j.value("stationary", false);
        tr.note = j.value("note", std::string());
        expected = j.value("snapshots", -1);
        head = false;
        continue;
      }
      reject_unknown(j, {"t", "tau", "area", "length", "vertices"}, "trajectory snapshot");
      Snapshot s;
      s.t = j.at("t");
      s.tau = j.at("tau");
      std::vector<Vec2> v;
      for (const auto& p : j.at("vertices")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      s.curve = Curve(std::move(v));
      s.area = j.value("area", s.curve.signed_area());
      s.length = j.value("length", s.curve.length());
      tr.snapshots.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed trajectory: ") + e.what());
  }
  if (head) throw ValidationError("trajectory file is empty");
  if (expected >= 0 && expected != tr.size()) throw ValidationError("trajectory is missing snapshots");
  for (int k = 1; k < tr.size(); ++k)
    if (!(tr[k].t > tr[k - 1].t)) throw ValidationError("trajectory times must increase");
  return tr;
}

std::string entropy_json(const EntropyReport& r, double tau) {
  json j{{"tau", tau},
         {"W_beta", r.W_beta},
         {"normalization", r.normalization},
         {"shift", r.shift},
         {"ibp_value", r.ibp_value},
         {"ibp_gap", r.ibp_gap},
         {"gradient_integral", r.gradient_integral},
         {"potential_integral", r.potential_integral},
         {"boundary_integral", r.boundary_integral}};
  return j.dump(2) + "\n";
}

std::string minimizer_json(const MinimizerResult& r, double tau, const ElReport* el) {
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"label", s.label}, {"energy", s.energy}, {"iterations", s.iterations}, {"converged", s.converged}});
  json j{{"tau", tau},
         {"mu", r.mu},
         {"mu_multiplier", r.mu_multiplier},
         {"energy", r.energy},
         {"el_residual", r.el_residual},
         {"W_constancy", r.W_constancy},
         {"uniqueness_distance", r.uniqueness_distance},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"floor_hits", r.floor_hits},
         {"starts", starts},
         {"warnings", r.warnings}};
  if (el) j["euler_lagrange"] = {{"weak_residual", el->weak_residual}, {"bc_residual", el->bc_residual},
                                 {"multiplier_gap", el->multiplier_gap}};
  return j.dump(2) + "\n";
}

std::string harnack_csv(const HarnackReport& rep) {
  std::string s =
      "index,t,tau,W_beta,dW_dt_fd,volume_term,boundary_term_direct,boundary_term_harnack,identity_gap_a,"
      "identity_gap_gradw,conjecture_value,one_sided,retained\n";
  for (const auto& r : rep.records) {
    s += std::to_string(r.index) + "," + fmt17(r.t) + "," + fmt17(r.tau) + "," + fmt17(r.W_beta) + "," +
         fmt17(r.dW_dt_fd) + "," + fmt17(r.volume_term) + "," + fmt17(r.boundary_term_direct) + "," +
         fmt17(r.boundary_term_harnack) + "," + fmt17(r.identity_gap_a) + "," + fmt17(r.identity_gap_gradw) + "," +
         fmt17(r.conjecture_value) + "," + (r.one_sided ? "1" : "0") + "," + (r.retained ? "1" : "0") + "\n";
  }
  return s;
}

std::string scan_csv(const RatioScan& scan) {
  std::string s = "x0,x1,x2,r,V_half,V_full,beta_integral,c1,ratio,mc_error,h_term,mu_upper,half_empty\n";
  for (const auto& r : scan.rows) {
    s += fmt17(r.center[0]) + "," + fmt17(r.center[1]) + "," + fmt17(r.center[2]) + "," + fmt17(r.r) + "," +
         fmt17(r.V_half) + "," + fmt17(r.V_full) + "," + fmt17(r.beta_integral) + "," + fmt17(r.c1) + "," +
         fmt17(r.ratio) + "," + fmt17(r.mc_error) + "," + fmt17(r.h_term) + "," + fmt17(r.mu_upper) + "," +
         (r.half_empty ? "1" : "0") + "\n";
  }
  return s;
}

std::string conservation_csv(const BackwardSolveState& st) {
  std::string s = "snapshot,t,tau,mass,drift\n";
  for (int k = 0; k < st.size(); ++k)
    s += std::to_string(k) + "," + fmt17(st.trajectory[k].t) + "," + fmt17(st.trajectory[k].tau) + "," +
         fmt17(st.mass[k]) + "," + fmt17(st.mass[k] - st.mass.back()) + "\n";
  return s;
}

std::string harnack_columns(const HarnackReport& rep) {
  std::string s =
      "# columns: t tau W_beta dW_dt_fd volume_term boundary_term_direct boundary_term_harnack identity_gap_a "
      "identity_gap_gradw\n"
      "# conjecture_value omitted: it equals boundary_term_harnack\n";
  s += "# compatibility window " + fmt17(rep.window) + "\n";
  for (const auto& r : rep.records)
    s += fmt17(r.t) + " " + fmt17(r.tau) + " " + fmt17(r.W_beta) + " " + fmt17(r.dW_dt_fd) + " " +
         fmt17(r.volume_term) + " " + fmt17(r.boundary_term_direct) + " " + fmt17(r.boundary_term_harnack) + " " +
         fmt17(r.identity_gap_a) + " " + fmt17(r.identity_gap_gradw) + "\n";
  return s;
}

std::string scan_columns(const RatioScan& scan) {
  std::string s = "# columns: r V_half V_full beta_integral c1 ratio mc_error\n";
  s += "# dim " + std::to_string(scan.dim) + ", center schedule " + scan.center_schedule + "\n";
  for (const auto& r : scan.rows)
    s += fmt17(r.r) + " " + fmt17(r.V_half) + " " + fmt17(r.V_full) + " " + fmt17(r.beta_integral) + " " +
         fmt17(r.c1) + " " + fmt17(r.ratio) + " " + fmt17(r.mc_error) + "\n";
  return s;
}

std::string manifest_json(const RunManifest& m) {
  json cfg = json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  json j{{"command", m.command},         {"config", cfg},       {"version", m.version},
         {"wall_seconds", m.wall_seconds}, {"input_hashes", m.input_hashes}, {"outputs", m.outputs},
         {"warnings", m.warnings}};
  return j.dump(2) + "\n";
}

namespace {

constexpr char kStateMagic[8] = {'E', 'L', 'B', 'S', 'T', 'A', 'T', '1'};

class Out {
 public:
  void raw(const void* p, size_t n) { buf_.append(static_cast<const char*>(p), n); }
  template <class T>
  void pod(T v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    raw(s.data(), s.size());
  }
  void field(const Field& f) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(f.size()));
    raw(f.data(), sizeof(double) * static_cast<size_t>(f.size()));
  }
  void points(const std::vector<Vec2>& v) {
    pod<std::uint64_t>(v.size());
    for (const auto& p : v) {
      pod(p.x());
      pod(p.y());
    }
  }
  void doubles(const std::vector<double>& v) {
    pod<std::uint64_t>(v.size());
    raw(v.data(), sizeof(double) * v.size());
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class In {
 public:
  explicit In(std::string b) : buf_(std::move(b)) {}
  void raw(void* p, size_t n) {
    if (pos_ + n > buf_.size()) throw ValidationError("state file is truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  template <class T>
  T pod() {
    T v{};
    raw(&v, sizeof v);
    return v;
  }
  size_t count() {
    const auto n = pod<std::uint64_t>();
    if (n > buf_.size()) throw ValidationError("state file is corrupt");
    return static_cast<size_t>(n);
  }
  std::string str() {
    std::string s(count(), '\0');
    raw(s.data(), s.size());
    return s;
  }
  Field field() {
    Field f(static_cast<Eigen::Index>(count()));
    raw(f.data(), sizeof(double) * static_cast<size_t>(f.size()));
    return f;
  }
  std::vector<Vec2> points() {
    std::vector<Vec2> v(count());
    for (auto& p : v) {
      const double x = pod<double>();
      const double y = pod<double>();
      p = Vec2(x, y);
    }
    return v;
  }
  std::vector<double> doubles() {
    std::vector<double> v(count());
    raw(v.data(), sizeof(double) * v.size());
    return v;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::string buf_;
  size_t pos_ = 0;
};

}  // namespace

void save_state(const std::filesystem::path& path, const BackwardSolveState& st) {
  Out o;
  o.raw(kStateMagic, sizeof kStateMagic);
  const FlowTrajectory& tr = st.trajectory;
  o.pod(tr.a);
  o.pod(tr.T_est);
  o.pod(tr.dt);
  o.pod<std::int64_t>(tr.steps);
  o.pod<std::uint8_t>(tr.truncated);
  o.pod<std::uint8_t>(tr.stationary);
  o.str(tr.note);
  o.pod<std::uint64_t>(tr.snapshots.size());
  for (const auto& s : tr.snapshots) {
    o.pod(s.t);
    o.pod(s.tau);
    o.pod(s.area);
    o.pod(s.length);
    o.points(s.curve.vertices());
  }
  const TriMesh& m = st.reference;
  o.points(m.nodes);
  o.pod<std::uint64_t>(m.tris.size());
  for (const auto& t : m.tris)
    for (int v : t) o.pod<std::int32_t>(v);
  o.pod<std::int32_t>(m.n_boundary);
  o.pod<std::uint64_t>(m.curve_vertex.size());
  for (int v : m.curve_vertex) o.pod<std::int32_t>(v);
  o.pod(m.h);
  o.pod<std::uint64_t>(st.nodes.size());
  for (const auto& n : st.nodes) o.points(n);
  o.pod<std::uint64_t>(st.u.size());
  for (const auto& u : st.u) o.field(u);
  o.doubles(st.mass);
  o.doubles(st.step_mass);
  o.pod(st.max_drift);
  o.pod(st.max_step_drift);
  o.pod<std::uint8_t>(st.drift_flagged);
  o.pod<std::int32_t>(st.clamped_steps);
  o.pod(st.mu_end);
  atomic_write(path, o.buffer());
}

BackwardSolveState load_state(const std::filesystem::path& path) {
  In in(read_file(path));
  char magic[sizeof kStateMagic];
  in.raw(magic, sizeof magic);
  if (std::memcmp(magic, kStateMagic, sizeof magic) != 0) throw ValidationError("not a backward-solve state file");
  BackwardSolveState st;
  FlowTrajectory& tr = st.trajectory;
  tr.a = in.pod<double>();
  tr.T_est = in.pod<double>();
  tr.dt = in.pod<double>();
  tr.steps = in.pod<std::int64_t>();
  tr.truncated = in.pod<std::uint8_t>() != 0;
  tr.stationary = in.pod<std::uint8_t>() != 0;
  tr.note = in.str();
  tr.snapshots.resize(in.count());
  for (auto& s : tr.snapshots) {
    s.t = in.pod<double>();
    s.tau = in.pod<double>();
    s.area = in.pod<double>();
    s.length = in.pod<double>();
    s.curve = Curve(in.points());
  }
  TriMesh& m = st.reference;
  m.nodes = in.points();
  m.tris.resize(in.count());
  for (auto& t : m.tris)
    for (int& v : t) v = in.pod<std::int32_t>();
  m.n_boundary = in.pod<std::int32_t>();
  m.curve_vertex.resize(in.count());
  for (int& v : m.curve_vertex) v = in.pod<std::int32_t>();
  m.h = in.pod<double>();
  st.nodes.resize(in.count());
  for (auto& n : st.nodes) n = in.points();
  st.u.resize(in.count());
  for (auto& u : st.u) u = in.field();
  st.mass = in.doubles();
  st.step_mass = in.doubles();
  st.max_drift = in.pod<double>();
  st.max_step_drift = in.pod<double>();
  st.drift_flagged = in.pod<std::uint8_t>() != 0;
  st.clamped_steps = in.pod<std::int32_t>();
  st.mu_end = in.pod<double>();
  if (!in.done()) throw ValidationError("state file has trailing bytes");
  if (st.u.size() != st.nodes.size() || st.u.size() != tr.snapshots.size())
    throw ValidationError("state file is inconsistent");
  return st;
}

}  // namespace elab
