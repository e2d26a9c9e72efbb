#include "yfstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "yfstab/error.hpp"

namespace yfstab {

using nlohmann::json;

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Stability: return "stability";
    case RunMode::Counterexample: return "counterexample";
    case RunMode::Both: return "both";
  }
  return "stability";
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + reason);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object; unknown keys are rejected on finish().
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) invalid(path_.empty() ? "config" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_number()) invalid(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(path(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long def) {
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) invalid(path(key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) invalid(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_string()) invalid(path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) invalid(join(path_, key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) invalid(path, "expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

SpatialEnvelope parse_envelope(const json& j, const std::string& path) {
  Fields f(j, path);
  Vec3 c;
  if (f.has("center")) {
    const auto v = number_list(f.at("center"), f.path("center"));
    if (v.size() != 3) invalid(f.path("center"), "expected 3 components");
    c = {v[0], v[1], v[2]};
  }
  const double width = f.number("width", 1.0);
  const double amplitude = f.number("amplitude", 1.0);
  f.finish();
  if (!(width > 0.0)) invalid(join(path, "width"), "must be > 0");
  return SpatialEnvelope(c, width, amplitude);
}

PacketSpec parse_packet(const json& j, const std::string& path) {
  Fields f(j, path);
  PacketSpec p;
  if (f.has("temporal")) {
    Fields t(f.at("temporal"), f.path("temporal"));
    p.kind = t.string("kind", "constant");
    if (p.kind != "regulator" && p.kind != "constant") {
      invalid(t.path("kind"), "expected \"regulator\" or \"constant\", got \"" + p.kind + "\"");
    }
    const long long n = t.integer("n", 1);
    if (n < 1 || n > 1000000) invalid(t.path("n"), "must be a positive integer");
    p.n = static_cast<int>(n);
    t.finish();
  }
  if (f.has("spatial")) p.spatial = parse_envelope(f.at("spatial"), f.path("spatial"));
  p.reference_mass = f.number("reference_mass", 1.0);
  if (!(p.reference_mass >= 0.0)) invalid(f.path("reference_mass"), "must be >= 0");
  p.reflected = f.boolean("reflected", false);
  f.finish();
  return p;
}

std::vector<PacketSpec> parse_packets(const json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected a list of packet specs");
  std::vector<PacketSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_packet(j[i], path + "[" + std::to_string(i) + "]"));
  if (!out.empty() && out.size() != 3) invalid(path, "expected exactly 3 packets (h1, h2, h3)");
  return out;
}

CurrentSpec parse_current(const json& j, const std::string& path) {
  CurrentSpec c;
  if (j.is_string()) {
    c.preset = j.get<std::string>();
  } else {
    Fields f(j, path);
    c.preset = f.string("preset", "onshell-nonzero");
    if (f.has("profile")) {
      Fields p(f.at("profile"), f.path("profile"));
      c.profile.amplitude = p.number("amplitude", 1.0);
      c.profile.kappa_width = p.number("kappa_width", 1.0);
      c.profile.momentum_width = p.number("momentum_width", 1.0);
      c.profile.onshell_vanishing = p.boolean("onshell_vanishing", false);
      p.finish();
      if (!(c.profile.kappa_width > 0.0)) invalid(p.path("kappa_width"), "must be > 0");
      if (!(c.profile.momentum_width > 0.0)) invalid(p.path("momentum_width"), "must be > 0");
    }
    f.finish();
  }
  static const std::vector<std::string> known{"onshell-nonzero", "onshell-vanishing", "zero", "inline"};
  if (std::find(known.begin(), known.end(), c.preset) == known.end()) {
    invalid(join(path, "preset"), "unknown current model \"" + c.preset +
                                      "\" (expected onshell-nonzero, onshell-vanishing, zero or inline)");
  }
  return c;
}

json packets_json(const std::vector<PacketSpec>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(p.to_json());
  return out;
}

SpectralMeasure default_rho(double m) { return SpectralMeasure::uniform(0.64 * m * m, 1.44 * m * m); }

}  // namespace

WavePacket PacketSpec::build() const {
  WavePacket p = kind == "regulator" ? bump_packet(n, spatial, Mass(reference_mass))
                                     : constant_packet(spatial, Mass(reference_mass));
  return reflected ? p.conjugate() : p;
}

json PacketSpec::to_json() const {
  return {{"temporal", {{"kind", kind}, {"n", n}}},
          {"spatial", spatial.to_json()},
          {"reference_mass", reference_mass},
          {"reflected", reflected}};
}

ModelCurrent CurrentSpec::build(Mass mass) const {
  if (preset == "onshell-nonzero") return onshell_nonzero_current(mass);
  if (preset == "onshell-vanishing") return onshell_vanishing_current(mass);
  if (preset == "zero") return zero_current();
  return gaussian_current(mass, profile);
}

json CurrentSpec::to_json() const {
  json j{{"preset", preset}};
  if (preset == "inline") {
    j["profile"] = {{"amplitude", profile.amplitude},
                    {"kappa_width", profile.kappa_width},
                    {"momentum_width", profile.momentum_width},
                    {"onshell_vanishing", profile.onshell_vanishing}};
  }
  return j;
}

json RunConfig::to_json(bool include_execution) const {
  json j{{"schema_version", kSchemaVersion},
          {"mode", to_string(mode)},
          {"masses", {{"mu", mu}, {"m", m}}},
          {"current_model", current_model.to_json()},
          {"envelope", envelope.to_json()},
          {"rho", rho.to_json()},
          {"n_ladder", n_ladder},
          {"packets", packets_json(packets)},
          {"control_packets", packets_json(control_packets)},
          {"gram_family", gram_family},
          {"mc", {{"samples", mc_samples}, {"seed", mc_seed}, {"sigma_shell_ladder", sigma_ladder}}},
          {"tolerances",
           {{"quadrature_rel", quadrature_rel},
            {"onshell_zero", onshell_zero},
            {"gram_neg", gram_neg},
            {"significance", significance}}},
          {"three_point",
           {{"pv_mode", pv_mode},
            {"delta_gap", delta_gap},
            {"hermite_nodes", hermite_nodes},
            {"polar_nodes", polar_nodes},
            {"azimuth_nodes", azimuth_nodes}}},
          {"output", {{"directory", output_directory}, {"formats", formats}}},
          {"workers", workers}};
  if (!include_execution) {
    j.erase("workers");
    j["output"].erase("directory");
  }
  return j;
}

StabilityConfig RunConfig::stability() const {
  StabilityConfig c;
  const Mass mass(m);
  c.current = current_model.build(mass);
  c.g = envelope;
  c.mass = mass;
  c.rho = rho;
  c.n_ladder = n_ladder;
  c.options.kl_rel_tol = quadrature_rel;
  c.options.shell_rel_tol = 0.1 * quadrature_rel;
  c.options.onshell_zero = onshell_zero;
  c.workers = workers;
  return c;
}

ThreePointOptions RunConfig::three_point() const {
  ThreePointOptions o;
  o.pv_mode = pv_mode;
  o.delta_gap = delta_gap;
  o.hermite_nodes = hermite_nodes;
  o.polar_nodes = polar_nodes;
  o.azimuth_nodes = azimuth_nodes;
  o.rel_tol = quadrature_rel;
  o.workers = workers;
  return o;
}

DecayOptions RunConfig::decay() const {
  DecayOptions o;
  o.samples = mc_samples;
  o.seed = mc_seed;
  o.sigma_ladder = sigma_ladder;
  o.workers = workers;
  return o;
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(const json& doc) {
  Fields f(doc, "");
  RunConfig c;
  const long long version = f.integer("schema_version", kSchemaVersion);
  if (version != kSchemaVersion) {
    invalid("schema_version", "unsupported version " + std::to_string(version) + " (this build reads " +
                                  std::to_string(kSchemaVersion) + ")");
  }
  const std::string mode = f.string("mode", "stability");
  if (mode == "stability") {
    c.mode = RunMode::Stability;
  } else if (mode == "counterexample") {
    c.mode = RunMode::Counterexample;
  } else if (mode == "both") {
    c.mode = RunMode::Both;
  } else {
    invalid("mode", "expected stability, counterexample or both, got \"" + mode + "\"");
  }

  if (f.has("masses")) {
    Fields mf(f.at("masses"), "masses");
    c.mu = mf.number("mu", c.mu);
    c.m = mf.number("m", c.m);
    mf.finish();
  }
  if (!(c.m > 0.0)) invalid("masses.m", "must be > 0");
  if (!(c.mu > 0.0)) invalid("masses.mu", "must be > 0");
  if (c.mode != RunMode::Stability && !(c.m > 2.0 * c.mu)) invalid("masses", "m must exceed 2*mu");

  if (f.has("current_model")) c.current_model = parse_current(f.at("current_model"), "current_model");
  if (f.has("envelope")) c.envelope = parse_envelope(f.at("envelope"), "envelope");

  if (f.has("rho")) {
    try {
      c.rho = SpectralMeasure::from_json(f.at("rho"));
    } catch (const Error& e) {
      std::string msg = e.what();
      const std::string prefix = "CONFIG_INVALID: rho: ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      invalid("rho", msg);
    }
  } else {
    c.rho = default_rho(c.m);
  }

  if (f.has("n_ladder")) {
    const json& v = f.at("n_ladder");
    if (!v.is_array() || v.empty()) invalid("n_ladder", "expected a non-empty list of integers");
    c.n_ladder.clear();
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long long>() < 1 || x.get<long long>() > 1000000) {
        invalid("n_ladder", "entries must be positive integers");
      }
      c.n_ladder.push_back(x.get<int>());
    }
  }
  for (std::size_t i = 1; i < c.n_ladder.size(); ++i) {
    if (c.n_ladder[i] <= c.n_ladder[i - 1]) invalid("n_ladder", "must be strictly increasing");
  }

  if (f.has("packets")) c.packets = parse_packets(f.at("packets"), "packets");
  if (f.has("control_packets")) c.control_packets = parse_packets(f.at("control_packets"), "control_packets");
  c.gram_family = f.string("gram_family", c.gram_family);
  if (c.gram_family != "witness-v1") invalid("gram_family", "unknown fixture \"" + c.gram_family + "\"");

  if (f.has("mc")) {
    Fields mc(f.at("mc"), "mc");
    const long long samples = mc.integer("samples", static_cast<long long>(c.mc_samples));
    if (samples < 10000) invalid("mc.samples", "must be >= 10000");
    c.mc_samples = static_cast<std::size_t>(samples);
    if (mc.has("seed")) {
      const json& s = mc.at("seed");
      if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
        invalid("mc.seed", "expected a non-negative integer");
      }
      c.mc_seed = s.get<std::uint64_t>();
    }
    if (mc.has("sigma_shell_ladder")) {
      const auto v = number_list(mc.at("sigma_shell_ladder"), "mc.sigma_shell_ladder");
      if (v.size() != 3) invalid("mc.sigma_shell_ladder", "expected 3 widths");
      for (double s : v) {
        if (!(s > 0.0)) invalid("mc.sigma_shell_ladder", "widths must be > 0");
      }
      if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) invalid("mc.sigma_shell_ladder", "widths must be distinct");
      c.sigma_ladder = {v[0], v[1], v[2]};
    }
    mc.finish();
  }

  if (f.has("tolerances")) {
    Fields t(f.at("tolerances"), "tolerances");
    c.quadrature_rel = t.number("quadrature_rel", c.quadrature_rel);
    c.onshell_zero = t.number("onshell_zero", c.onshell_zero);
    c.gram_neg = t.number("gram_neg", c.gram_neg);
    c.significance = t.number("significance", c.significance);
    t.finish();
    if (!(c.quadrature_rel > 0.0 && c.quadrature_rel < 0.1)) invalid("tolerances.quadrature_rel", "must lie in (0, 0.1)");
    if (!(c.onshell_zero > 0.0)) invalid("tolerances.onshell_zero", "must be > 0");
    if (!(c.gram_neg > 0.0)) invalid("tolerances.gram_neg", "must be > 0");
    if (!(c.significance > 0.0)) invalid("tolerances.significance", "must be > 0");
  }

  if (f.has("three_point")) {
    Fields t(f.at("three_point"), "three_point");
    c.pv_mode = t.boolean("pv_mode", c.pv_mode);
    c.delta_gap = t.number("delta_gap", c.delta_gap);
    c.hermite_nodes = static_cast<int>(t.integer("hermite_nodes", c.hermite_nodes));
    c.polar_nodes = static_cast<int>(t.integer("polar_nodes", c.polar_nodes));
    c.azimuth_nodes = static_cast<int>(t.integer("azimuth_nodes", c.azimuth_nodes));
    t.finish();
    if (!(c.delta_gap >= 0.0)) invalid("three_point.delta_gap", "must be >= 0");
    if (c.hermite_nodes < 2 || c.hermite_nodes > 64) invalid("three_point.hermite_nodes", "must lie in [2, 64]");
    if (c.polar_nodes < 2 || c.polar_nodes > 256) invalid("three_point.polar_nodes", "must lie in [2, 256]");
    if (c.azimuth_nodes < 2 || c.azimuth_nodes > 1024) invalid("three_point.azimuth_nodes", "must lie in [2, 1024]");
  }

  if (f.has("output")) {
    Fields o(f.at("output"), "output");
    c.output_directory = o.string("directory", c.output_directory);
    if (o.has("formats")) {
      const json& v = o.at("formats");
      if (!v.is_array() || v.empty()) invalid("output.formats", "expected a non-empty subset of [csv, json]");
      std::vector<std::string> formats;
      for (const auto& x : v) {
        if (!x.is_string() || (x != "csv" && x != "json")) invalid("output.formats", "entries must be csv or json");
        if (std::find(formats.begin(), formats.end(), x.get<std::string>()) == formats.end()) {
          formats.push_back(x.get<std::string>());
        }
      }
      std::sort(formats.begin(), formats.end());
      c.formats = formats;
    }
    o.finish();
  }

  const long long workers = f.integer("workers", c.workers);
  if (workers < 1 || workers > 256) invalid("workers", "must lie in [1, 256]");
  c.workers = static_cast<int>(workers);
  f.finish();

  if (c.mode != RunMode::Stability && c.packets.empty()) {
    invalid("packets", "counterexample mode needs the three decay packets h1, h2, h3");
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: not a valid JSON document (") + e.what() + ")");
  }
  return parse_config(doc);
}

std::vector<std::string> preset_names() { return {"onshell-nonzero", "onshell-vanishing", "counterexample-default"}; }

namespace {

json packet_json(const std::string& kind, int n, Vec3 c, double width, double ref) {
  return PacketSpec{kind, n, SpatialEnvelope(c, width, 1.0), ref, false}.to_json();
}

}  // namespace

json preset(const std::string& name) {
  if (name == "onshell-nonzero" || name == "onshell-vanishing") {
    return {{"schema_version", kSchemaVersion},
            {"mode", "stability"},
            {"masses", {{"m", 2.0}}},
            {"current_model", {{"preset", name}}},
            {"rho", {{"density", {{{"interval", {2.56, 5.76}}, {"coeffs", {1.0}}}}}}},
            {"n_ladder", {4, 16, 64, 256}}};
  }
  if (name == "counterexample-default") {
    const double k = std::sqrt(0.75);  // back-to-back momentum for m = 2, mu = 0.5
    return {{"schema_version", kSchemaVersion},
            {"mode", "counterexample"},
            {"masses", {{"mu", 0.5}, {"m", 2.0}}},
            {"packets",
             {packet_json("constant", 1, {0, 0, 0}, 0.5, 2.0), packet_json("constant", 1, {0, 0, k}, 0.3, 0.5),
              packet_json("constant", 1, {0, 0, -k}, 0.3, 0.5)}},
            {"control_packets",
             {packet_json("regulator", 16, {0, 0, 0}, 0.15, 1.2), packet_json("constant", 1, {0, 0, k}, 0.3, 0.5),
              packet_json("constant", 1, {0, 0, -k}, 0.3, 0.5)}},
            {"gram_family", "witness-v1"},
            {"mc", {{"samples", 1000000}, {"seed", 1}}}};
  }
  throw Error(ErrorCode::ConfigInvalid, "preset: unknown name \"" + name + "\"");
}

}  // namespace yfstab
