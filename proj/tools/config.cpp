#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "torusflow/spectral.hpp"

namespace torusflow::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

// A JSON object whose keys are consumed one by one; leftovers are rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const json* v = take(key)) convert(*v, at(key), out);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  static void convert(const json& v, const std::string& p, double& out) {
    if (!v.is_number()) fail(p, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(p, "expected a finite number");
  }
  static void convert(const json& v, const std::string& p, int& out) {
    if (!v.is_number_integer()) fail(p, "expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(p, "integer out of range");
    out = static_cast<int>(x);
  }
  static void convert(const json& v, const std::string& p, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<long long>());
    } else {
      fail(p, "expected a non-negative integer");
    }
  }
  static void convert(const json& v, const std::string& p, bool& out) {
    if (!v.is_boolean()) fail(p, "expected true or false");
    out = v.get<bool>();
  }
  static void convert(const json& v, const std::string& p, std::string& out) {
    if (!v.is_string()) fail(p, "expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  static void convert(const json& v, const std::string& p, std::vector<T>& out) {
    if (!v.is_array()) fail(p, "expected an array");
    out.assign(v.size(), T{});
    for (std::size_t i = 0; i < v.size(); ++i) convert(v[i], p + "[" + std::to_string(i) + "]", out[i]);
  }
  template <class T, std::size_t N>
  static void convert(const json& v, const std::string& p, std::array<T, N>& out) {
    if (!v.is_array() || v.size() != N) fail(p, "expected an array of " + std::to_string(N) + " entries");
    for (std::size_t i = 0; i < N; ++i) convert(v[i], p + "[" + std::to_string(i) + "]", out[i]);
  }
  static void convert(const json& v, const std::string& p, ModeSpec& out) {
    Obj o(v, p);
    o.read("n1", out.n1);
    o.read("n2", out.n2);
    o.read("amplitude", out.amplitude);
    o.read("kind", out.kind);
    o.finish();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

void parse_initial(Obj& top, InitialCondition& ic) {
  const json* v = top.take("initial_condition");
  if (!v) return;
  Obj o(*v, "initial_condition");
  o.read("type", ic.type);
  o.read("seed", ic.seed);
  o.read("kmax", ic.kmax);
  o.read("amplitude", ic.amplitude);
  o.read("modes", ic.modes);
  o.read("value", ic.value);
  o.finish();
}

void parse_tolerances(Obj& top, Tolerances& t) {
  const json* v = top.take("tolerances");
  if (!v) return;
  Obj o(*v, "tolerances");
  o.read("hamiltonian_drift", t.hamiltonian_drift);
  o.read("euler_lagrange", t.euler_lagrange);
  o.read("body_momentum_drift", t.body_momentum_drift);
  o.read("curvature_agreement", t.curvature_agreement);
  o.read("closed_form", t.closed_form);
  o.read("uniqueness", t.uniqueness);
  o.read("commuting_identity", t.commuting_identity);
  o.read("metric_compatibility", t.metric_compatibility);
  o.read("negative_control", t.negative_control);
  o.read("reduction_1d", t.reduction_1d);
  o.read("mch2", t.mch2);
  o.finish();
}

void parse_sections(Obj& top, RunConfig& c) {
  if (const json* v = top.take("curvature")) {
    Obj o(*v, "curvature");
    o.read("k_range", c.curvature.k_range);
    o.read("basis", c.curvature.basis);
    o.read("pairing", c.curvature.pairing);
    o.finish();
  }
  if (const json* v = top.take("verify")) {
    Obj o(*v, "verify");
    o.read("b_list", c.verify.b_list);
    o.read("modes", c.verify.modes);
    o.read("trials", c.verify.trials);
    o.read("kmax", c.verify.kmax);
    o.read("amplitude", c.verify.amplitude);
    o.read("uniqueness_grid", c.verify.uniqueness_grid);
    o.read("mode_amplitude", c.verify.mode_amplitude);
    o.finish();
  }
  if (const json* v = top.take("geodesic")) {
    Obj o(*v, "geodesic");
    o.read("compare_euler", c.geodesic.compare_euler);
    o.read("det_floor", c.geodesic.det_floor);
    o.read("snapshots", c.geodesic.snapshots);
    o.finish();
  }
  if (const json* v = top.take("reduce1d")) {
    Obj o(*v, "reduce1d");
    o.read("b_list", c.reduce1d.b_list);
    o.read("mch2_steps", c.reduce1d.mch2_steps);
    o.finish();
  }
}

void validate(const RunConfig& c) {
  const int half = std::min(c.nx, c.ny) / 2;
  require(c.nx >= 4 && c.ny >= 4 && c.nx % 2 == 0 && c.ny % 2 == 0, "grid", "nx and ny must be even and >= 4");
  require(c.dt > 0.0, "dt", "must be positive");
  require(c.t_end >= 0.0, "t_end", "must be non-negative");
  require(c.record_stride >= 1, "record_stride", "must be >= 1");
  require(c.pad_factor >= 1, "pad_factor", "must be >= 1");
  require(c.blowup_factor > 1.0, "blowup_factor", "must exceed 1");

  const InitialCondition& ic = c.initial_condition;
  if (ic.type == "random") {
    require(ic.kmax >= 0 && ic.kmax < half, "initial_condition.kmax", "must satisfy 0 <= kmax < min(nx, ny)/2");
    require(ic.amplitude >= 0.0, "initial_condition.amplitude", "must be non-negative");
  } else if (ic.type == "modes") {
    for (std::size_t i = 0; i < ic.modes.size(); ++i) {
      const ModeSpec& m = ic.modes[i];
      const std::string p = "initial_condition.modes[" + std::to_string(i) + "]";
      require(m.kind == "sin" || m.kind == "cos", p + ".kind", "must be \"sin\" or \"cos\"");
      require(std::abs(m.n1) < c.nx / 2 && std::abs(m.n2) < c.ny / 2, p, "mode outside the grid band");
    }
  } else if (ic.type != "constant") {
    fail("initial_condition.type", "must be \"random\", \"modes\" or \"constant\"");
  }

  const Tolerances& t = c.tolerances;
  for (double x : {t.hamiltonian_drift, t.euler_lagrange, t.body_momentum_drift, t.curvature_agreement,
                   t.closed_form, t.uniqueness, t.commuting_identity, t.metric_compatibility,
                   t.negative_control, t.reduction_1d, t.mch2})
    require(x > 0.0, "tolerances", "every tolerance must be positive");

  for (int k : c.curvature.k_range) require(k >= 1, "curvature.k_range", "entries must be >= 1");
  for (int i : c.curvature.basis) require(i == 1 || i == 2, "curvature.basis", "entries must be 1 or 2");
  require(c.curvature.pairing == "metric" || c.curvature.pairing == "l2", "curvature.pairing",
          "must be \"metric\" or \"l2\"");

  const VerifySection& v = c.verify;
  require(v.trials >= 0, "verify.trials", "must be non-negative");
  require(v.kmax >= 0, "verify.kmax", "must be non-negative");
  require(v.amplitude >= 0.0, "verify.amplitude", "must be non-negative");
  require(v.uniqueness_grid >= 4 && v.uniqueness_grid % 2 == 0, "verify.uniqueness_grid",
          "must be even and >= 4");
  for (const auto& m : v.modes) {
    require(m[0] != 0 || m[1] != 0, "verify.modes", "mode (0, 0) is not admitted");
    require(2 * std::max(std::abs(m[0]), std::abs(m[1])) < v.uniqueness_grid / 2, "verify.modes",
            "mode too large for verify.uniqueness_grid");
  }
  for (double b : v.b_list) require(b != 0.0, "verify.b_list", "b = 0 is not admitted");

  require(c.geodesic.det_floor > 0.0 && c.geodesic.det_floor < 1.0, "geodesic.det_floor", "must lie in (0, 1)");
  require(c.reduce1d.mch2_steps >= 1, "reduce1d.mch2_steps", "must be >= 1");
}

json to_json(const RunConfig& c) {
  json modes = json::array();
  for (const ModeSpec& m : c.initial_condition.modes)
    modes.push_back({{"n1", m.n1}, {"n2", m.n2}, {"amplitude", m.amplitude}, {"kind", m.kind}});
  const InitialCondition& ic = c.initial_condition;
  const Tolerances& t = c.tolerances;
  return {
      {"grid", {{"nx", c.nx}, {"ny", c.ny}}},
      {"b", c.b},
      {"initial_condition",
       {{"type", ic.type}, {"seed", ic.seed}, {"kmax", ic.kmax}, {"amplitude", ic.amplitude},
        {"modes", modes}, {"value", ic.value}}},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"record_stride", c.record_stride},
      {"pad_factor", c.pad_factor},
      {"blowup_factor", c.blowup_factor},
      {"snapshots", c.snapshots},
      {"tolerances",
       {{"hamiltonian_drift", t.hamiltonian_drift}, {"euler_lagrange", t.euler_lagrange},
        {"body_momentum_drift", t.body_momentum_drift}, {"curvature_agreement", t.curvature_agreement},
        {"closed_form", t.closed_form}, {"uniqueness", t.uniqueness},
        {"commuting_identity", t.commuting_identity}, {"metric_compatibility", t.metric_compatibility},
        {"negative_control", t.negative_control}, {"reduction_1d", t.reduction_1d}, {"mch2", t.mch2}}},
      {"curvature",
       {{"k_range", c.curvature.k_range}, {"basis", c.curvature.basis}, {"pairing", c.curvature.pairing}}},
      {"verify",
       {{"b_list", c.verify.b_list}, {"modes", c.verify.modes}, {"trials", c.verify.trials},
        {"kmax", c.verify.kmax}, {"amplitude", c.verify.amplitude},
        {"uniqueness_grid", c.verify.uniqueness_grid}, {"mode_amplitude", c.verify.mode_amplitude}}},
      {"geodesic",
       {{"compare_euler", c.geodesic.compare_euler}, {"det_floor", c.geodesic.det_floor},
        {"snapshots", c.geodesic.snapshots}}},
      {"reduce1d", {{"b_list", c.reduce1d.b_list}, {"mch2_steps", c.reduce1d.mch2_steps}}},
  };
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  RunConfig c;
  Obj top(doc, "");
  if (const json* g = top.take("grid")) {
    Obj o(*g, "grid");
    o.read("nx", c.nx);
    o.read("ny", c.ny);
    o.finish();
  }
  top.read("b", c.b);
  parse_initial(top, c.initial_condition);
  top.read("dt", c.dt);
  top.read("t_end", c.t_end);
  top.read("record_stride", c.record_stride);
  top.read("pad_factor", c.pad_factor);
  top.read("blowup_factor", c.blowup_factor);
  top.read("snapshots", c.snapshots);
  parse_tolerances(top, c.tolerances);
  parse_sections(top, c);
  top.read("output_dir", c.output_dir);
  top.finish();
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& config) { return to_json(config).dump(); }

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

VectorField make_initial(const RunConfig& config) {
  const TorusGrid grid(config.nx, config.ny);
  const InitialCondition& ic = config.initial_condition;
  if (ic.type == "random") return random_bandlimited(grid, ic.seed, ic.kmax, ic.amplitude);
  if (ic.type == "constant") return VectorField::constant(grid, ic.value[0], ic.value[1]);
  VectorField u = VectorField::zero(grid);
  for (const ModeSpec& m : ic.modes) {
    const ScalarField f = ScalarField::from_function(grid, [&](double x, double y) {
      const double phase = kTwoPi * (m.n1 * x + m.n2 * y);
      return m.kind == "sin" ? std::sin(phase) : std::cos(phase);
    });
    u += VectorField(m.amplitude[0] * f, m.amplitude[1] * f);
  }
  return u;
}

void validate_for_command(const RunConfig& c, std::string_view command) {
  const int half = std::min(c.nx, c.ny) / 2;
  if (command == "curvature") {
    for (int k : c.curvature.k_range)
      require(3 * k < half, "curvature.k_range",
              "entries must satisfy 3k < min(nx, ny)/2 so that cubic terms are resolved");
  }
  if (command == "verify") {
    require(2 * c.verify.kmax < half, "verify.kmax", "must satisfy 2 kmax < min(nx, ny)/2");
  }
}

}  // namespace torusflow::cli
