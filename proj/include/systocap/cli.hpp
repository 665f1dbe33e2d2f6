#pragma once

// Configuration parsing, command dispatch and report emission for the
// systocap command-line tool.
//
// A configuration is a JSON document:
//
//   {
//     "norm": {"family": "lp", "p": 1, "dim": 2},
//     "command": "capacity",            // optional, must match the subcommand
//     "samples": 10000, "seed": 0,
//     "assume_hz": true,
//     "minorant_gram": [[1, 0], [0, 1]],
//     "tolerances": {"fd_step": 1e-5, "fd_margin": 1e-2, "symplectic_defect": 1e-6,
//                    "collision_distance": 1e-9, "preimage_separation": 1e-6}
//   }
//
// Norm families: "lp" {p, dim, scale}, "ellipsoid" {gram}, "polytope_v"
// {vertices}, "polytope_h" {normals, offsets}; matrices are row-major nested
// arrays. Any real may be given as a string "a/b" or "a".

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "systocap/systocap.hpp"

namespace systocap::cli {

using Json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { Systole, Capacity, CertifyUpper, CertifyLower, VerifyEmbedding, Axioms };

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{
      {"systole", Command::Systole},
      {"capacity", Command::Capacity},
      {"certify-upper", Command::CertifyUpper},
      {"certify-lower", Command::CertifyLower},
      {"verify-embedding", Command::VerifyEmbedding},
      {"axioms", Command::Axioms},
  };
  return names;
}

inline std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "?";
}

inline std::optional<Command> parse_command(const std::string& name) {
  auto it = command_names().find(name);
  if (it == command_names().end()) return std::nullopt;
  return it->second;
}

struct RunConfig {
  Json norm;
  std::optional<Command> command;
  int samples = 10000;
  std::uint64_t seed = 0;
  bool assume_hz = true;
  std::optional<Matrix> minorant_gram;
  EmbeddingTolerances tolerances;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    auto tol_eq = [](const EmbeddingTolerances& x, const EmbeddingTolerances& y) {
      return x.fd_step == y.fd_step && x.fd_margin == y.fd_margin && x.max_defect == y.max_defect &&
             x.collision_distance == y.collision_distance && x.preimage_separation == y.preimage_separation;
    };
    const bool grams_eq = a.minorant_gram.has_value() == b.minorant_gram.has_value() &&
                          (!a.minorant_gram || *a.minorant_gram == *b.minorant_gram);
    return a.norm == b.norm && a.command == b.command && a.samples == b.samples && a.seed == b.seed &&
           a.assume_hz == b.assume_hz && grams_eq && tol_eq(a.tolerances, b.tolerances);
  }
};

// ---------------------------------------------------------------------------
// Strict field readers

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("field '" + path + "': " + msg);
}

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

inline double read_real(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    static const std::regex rational(R"(^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$)");
    std::smatch m;
    const std::string text = j.get<std::string>();
    if (std::regex_match(text, m, rational)) {
      const double num = std::stod(m[1].str());
      const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
      if (den == 0.0) fail(path, "zero denominator");
      return num / den;
    }
    fail(path, "expected a number or a rational string \"a/b\", got \"" + text + "\"");
  }
  fail(path, "expected a number");
}

inline Vector read_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<long>(i)] = read_real(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix read_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(path, "rows must be non-empty arrays");
  Matrix m(static_cast<long>(j.size()), static_cast<long>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) fail(row_path, "ragged matrix row");
    m.row(static_cast<long>(i)) = read_vector(j[i], row_path).transpose();
  }
  return m;
}

inline std::int64_t read_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline void check_dim(const Json& norm, long actual) {
  if (norm.contains("dim") && read_integer(norm["dim"], "norm.dim") != actual) {
    fail("norm.dim", "declared dimension " + std::to_string(read_integer(norm["dim"], "norm.dim")) +
                         " does not match the data dimension " + std::to_string(actual));
  }
}

}  // namespace detail

/// Builds a GaugeSpec from a "norm" description.
inline GaugeSpec build_gauge(const Json& norm) {
  using namespace detail;
  if (!norm.is_object()) fail("norm", "expected an object");
  if (!norm.contains("family") || !norm["family"].is_string()) fail("norm.family", "missing family name");
  const std::string family = norm["family"].get<std::string>();
  try {
    if (family == "lp") {
      reject_unknown(norm, {"family", "p", "dim", "scale"}, "norm");
      if (!norm.contains("p")) fail("norm.p", "missing exponent");
      if (!norm.contains("dim")) fail("norm.dim", "missing dimension");
      double p;
      if (norm["p"].is_string() && (norm["p"] == "inf" || norm["p"] == "infinity")) p = kInfinity;
      else p = read_real(norm["p"], "norm.p");
      if (std::isnan(p) || p < 1.0) fail("norm.p", "p < 1 is not a norm");
      const std::int64_t dim = read_integer(norm["dim"], "norm.dim");
      if (dim < 1) fail("norm.dim", "dimension must be positive");
      const double scale = norm.contains("scale") ? read_real(norm["scale"], "norm.scale") : 1.0;
      return GaugeSpec::lp(static_cast<int>(dim), p, scale);
    }
    if (family == "ellipsoid") {
      reject_unknown(norm, {"family", "gram", "dim"}, "norm");
      if (!norm.contains("gram")) fail("norm.gram", "missing Gram matrix");
      const Matrix gram = read_matrix(norm["gram"], "norm.gram");
      check_dim(norm, gram.rows());
      return GaugeSpec::ellipsoid(gram);
    }
    if (family == "polytope_v") {
      reject_unknown(norm, {"family", "vertices", "dim"}, "norm");
      if (!norm.contains("vertices")) fail("norm.vertices", "missing vertex list");
      const Matrix verts = read_matrix(norm["vertices"], "norm.vertices");
      check_dim(norm, verts.cols());
      return GaugeSpec::polytope_v(verts);
    }
    if (family == "polytope_h") {
      reject_unknown(norm, {"family", "normals", "offsets", "dim"}, "norm");
      if (!norm.contains("normals")) fail("norm.normals", "missing normals");
      if (!norm.contains("offsets")) fail("norm.offsets", "missing offsets");
      const Matrix normals = read_matrix(norm["normals"], "norm.normals");
      const Vector offsets = read_vector(norm["offsets"], "norm.offsets");
      check_dim(norm, normals.cols());
      return GaugeSpec::polytope_h(normals, offsets);
    }
  } catch (const InvalidSpec& e) {
    fail("norm", e.what());
  }
  fail("norm.family", "unknown family \"" + family + "\" (expected lp, ellipsoid, polytope_v, polytope_h)");
}

namespace detail {

inline std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed configuration at " + locate(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc, {"norm", "command", "samples", "seed", "assume_hz", "minorant_gram", "tolerances"}, "");

  RunConfig cfg;
  if (!doc.contains("norm")) fail("norm", "missing norm description");
  cfg.norm = doc["norm"];
  const GaugeSpec spec = build_gauge(cfg.norm);

  if (doc.contains("command")) {
    if (!doc["command"].is_string()) fail("command", "expected a string");
    cfg.command = parse_command(doc["command"].get<std::string>());
    if (!cfg.command) fail("command", "unknown command \"" + doc["command"].get<std::string>() + "\"");
  }
  if (doc.contains("samples")) {
    const std::int64_t s = read_integer(doc["samples"], "samples");
    if (s < 1 || s > 100000000) fail("samples", "must lie in [1, 1e8]");
    cfg.samples = static_cast<int>(s);
  }
  if (doc.contains("seed")) {
    const Json& j = doc["seed"];
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      fail("seed", "expected a non-negative integer");
    }
    cfg.seed = j.get<std::uint64_t>();
  }
  if (doc.contains("assume_hz")) {
    if (!doc["assume_hz"].is_boolean()) fail("assume_hz", "expected true or false");
    cfg.assume_hz = doc["assume_hz"].get<bool>();
  }
  if (doc.contains("minorant_gram")) {
    Matrix g = read_matrix(doc["minorant_gram"], "minorant_gram");
    if (g.rows() != spec.dim() || g.cols() != spec.dim()) fail("minorant_gram", "must be n x n");
    cfg.minorant_gram = std::move(g);
  }
  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    if (!t.is_object()) fail("tolerances", "expected an object");
    reject_unknown(t, {"fd_step", "fd_margin", "symplectic_defect", "collision_distance", "preimage_separation"},
                   "tolerances");
    auto positive = [&](const char* key, double& out) {
      if (!t.contains(key)) return;
      const double v = read_real(t[key], std::string("tolerances.") + key);
      if (!(v > 0)) fail(std::string("tolerances.") + key, "must be positive");
      out = v;
    };
    positive("fd_step", cfg.tolerances.fd_step);
    positive("fd_margin", cfg.tolerances.fd_margin);
    positive("symplectic_defect", cfg.tolerances.max_defect);
    positive("collision_distance", cfg.tolerances.collision_distance);
    positive("preimage_separation", cfg.tolerances.preimage_separation);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON views of results

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (long i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline Json to_json(const IntMatrix& m) {
  Json out = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline Json tolerances_json(const EmbeddingTolerances& t) {
  return Json{{"fd_step", t.fd_step},
              {"fd_margin", t.fd_margin},
              {"symplectic_defect", t.max_defect},
              {"collision_distance", t.collision_distance},
              {"preimage_separation", t.preimage_separation}};
}

/// The configuration echo; parse_config(emit of this) reproduces `cfg`.
inline Json config_to_json(const RunConfig& cfg) {
  Json out{{"norm", cfg.norm},
           {"samples", cfg.samples},
           {"seed", cfg.seed},
           {"assume_hz", cfg.assume_hz},
           {"tolerances", tolerances_json(cfg.tolerances)}};
  if (cfg.command) out["command"] = to_string(*cfg.command);
  if (cfg.minorant_gram) out["minorant_gram"] = to_json(*cfg.minorant_gram);
  return out;
}

inline Json to_json(const SystoleResult& r) {
  return Json{{"s", r.s}, {"u", r.u}, {"exhaustive", r.exhaustive}};
}

inline Json to_json(const EmbeddingReport& r) {
  return Json{{"samples", r.samples},
              {"symplectic_checked", r.symplectic_checked},
              {"max_symplectic_defect", r.max_symplectic_defect},
              {"containment_failures", r.containment_failures},
              {"collision_pairs", r.collision_pairs},
              {"r1", r.r1},
              {"seed", r.seed},
              {"passed", r.passed()}};
}

inline Json to_json(const LowerCertificate& c) {
  return Json{{"s", c.s},
              {"lattice_check", c.lattice_check},
              {"open_body_bound", c.s * (1.0 - 1e-12)},
              {"exhaustive", c.exhaustive},
              {"inclusion_samples", c.inclusion_samples},
              {"inclusion_failures", c.inclusion_failures},
              {"hz_constant", c.hz_constant},
              {"citation", c.citation},
              {"status", c.status()}};
}

inline Json to_json(const MinorantReport& r) {
  return Json{{"samples", r.samples},
              {"seed", r.seed},
              {"worst_violation", r.worst_violation},
              {"worst_direction", to_json(r.worst_direction)},
              {"norm_systole", r.norm_systole},
              {"minorant_systole", r.minorant_systole},
              {"pointwise_ok", r.pointwise_ok},
              {"systoles_match", r.systoles_match},
              {"passed", r.passed()}};
}

inline Json to_json(const CaseClassification& c) {
  Json out{{"case", to_string(c.tag)},
           {"equality_for_all_capacities", c.equality_for_all_capacities()},
           {"notes", c.notes}};
  if (c.minorant_gram) out["minorant_gram"] = to_json(*c.minorant_gram);
  if (c.minorant_report) out["minorant_report"] = to_json(*c.minorant_report);
  return out;
}

inline Json to_json(const AxiomReport& r) {
  return Json{{"samples", r.samples},
              {"seed", r.seed},
              {"tolerance", r.tolerance},
              {"max_homogeneity_violation", r.max_homogeneity_violation},
              {"max_reversibility_violation", r.max_reversibility_violation},
              {"max_triangle_violation", r.max_triangle_violation},
              {"positivity_failures", r.positivity_failures},
              {"violations", r.violations},
              {"passed", r.passed()}};
}

inline Json to_json(const CapacityCertificate& c) {
  return Json{{"value", c.value},
              {"value_kind", c.equality_certified() ? "capacity" : "upper_bound"},
              {"systole", to_json(c.systole)},
              {"basis", to_json(c.basis.entries())},
              {"widths", to_json(c.widths)},
              {"r1", c.r1},
              {"pi_r1_squared", kPi * c.r1 * c.r1},
              {"cylinder_identity_error", c.cylinder_identity_error()},
              {"theorem_identity_error", c.theorem_identity_error()},
              {"upper_report", to_json(c.upper_report)},
              {"lower_lattice_check", c.lower_lattice_check()},
              {"lower", to_json(c.lower)},
              {"classification", to_json(c.classification)},
              {"case", to_string(c.case_tag())},
              {"upper_certified", c.upper_certified()},
              {"equality_certified", c.equality_certified()},
              {"valid", c.valid()},
              {"notes", c.notes}};
}

// ---------------------------------------------------------------------------
// Dispatch

struct RunContext {
  double enumeration_cap = kDefaultEnumerationCap;
};

struct Report {
  Command command;
  Json body;
  bool passed = false;
};

inline Report run(const RunConfig& cfg, Command command, const RunContext& ctx = {}) {
  if (cfg.command && *cfg.command != command) {
    throw ConfigError("field 'command': configuration requests \"" + to_string(*cfg.command) +
                      "\" but the subcommand is \"" + to_string(command) + "\"");
  }
  const GaugeSpec spec = build_gauge(cfg.norm);
  Report rep{command, Json::object(), false};
  Json& body = rep.body;
  body["command"] = to_string(command);
  body["config"] = config_to_json(cfg);
  body["norm"] = Json{{"family", spec.family_name()}, {"dim", spec.dim()}, {"exact_dual", has_exact_dual(spec)}};
  body["tolerances"] = tolerances_json(cfg.tolerances);
  body["tolerances"]["enumeration_cap"] = ctx.enumeration_cap;

  switch (command) {
    case Command::Systole: {
      const SystoleResult r = systole(spec, ctx.enumeration_cap);
      body["systole"] = to_json(r);
      rep.passed = true;
      break;
    }
    case Command::Capacity: {
      CapacityOptions opts;
      opts.samples = cfg.samples;
      opts.seed = cfg.seed;
      opts.assume_hz = cfg.assume_hz;
      opts.minorant_gram = cfg.minorant_gram;
      opts.enumeration_cap = ctx.enumeration_cap;
      opts.tolerances = cfg.tolerances;
      const CapacityCertificate cert = capacity(spec, opts);
      body["certificate"] = to_json(cert);
      body["citations"] = Json{{"lagrangian_product_capacity", kLagrangianProductCitation}};
      rep.passed = cert.valid();
      break;
    }
    case Command::CertifyUpper:
    case Command::VerifyEmbedding: {
      if (cfg.samples < 2) throw PreconditionError("verify-embedding: samples must be >= 2");
      const ReducedNorm red = reduce_norm(spec, ctx.enumeration_cap);
      const Vector widths = coordinate_widths(red.spec_a);
      const EmbeddingReport er =
          verify_embedding_samples(spec, red.basis, widths, cfg.samples, cfg.seed, cfg.tolerances);
      body["embedding"] = to_json(er);
      rep.passed = er.passed();
      if (command == Command::CertifyUpper) {
        const double r1 = std::sqrt(2.0 * widths[0] / kPi);
        body["upper"] = Json{{"systole", to_json(red.systole)},
                             {"basis", to_json(red.basis.entries())},
                             {"widths", to_json(widths)},
                             {"r1", r1},
                             {"pi_r1_squared", kPi * r1 * r1},
                             {"upper_bound", 2.0 * widths[0]}};
      }
      break;
    }
    case Command::CertifyLower: {
      const SystoleResult sys = systole(spec, ctx.enumeration_cap);
      const LowerCertificate lc = lower_certificate(spec, sys.s, 1000, cfg.seed, ctx.enumeration_cap);
      ClassifyOptions copts;
      copts.user_gram = cfg.minorant_gram;
      copts.assume_hz = cfg.assume_hz;
      copts.seed = cfg.seed;
      copts.enumeration_cap = ctx.enumeration_cap;
      const CaseClassification cls = classify_case(spec, sys.s, copts);
      body["systole"] = to_json(sys);
      body["lower"] = to_json(lc);
      body["classification"] = to_json(cls);
      body["lower_bound"] = sys.s / 2.0 * kLagrangianProductCapacity;
      body["citations"] = Json{{"lagrangian_product_capacity", kLagrangianProductCitation}};
      rep.passed = lc.holds();
      break;
    }
    case Command::Axioms: {
      const AxiomReport ar = check_gauge_axioms(spec, cfg.samples, cfg.seed);
      body["axioms"] = to_json(ar);
      rep.passed = ar.passed();
      break;
    }
  }
  body["passed"] = rep.passed;
  return rep;
}

inline Json error_block(const std::string& type, const std::string& message) {
  return Json{{"error", Json{{"type", type}, {"message", message}}}, {"passed", false}};
}

// ---------------------------------------------------------------------------
// Emission

enum class Format { Human, Machine };

inline Format parse_format(const std::string& s) {
  if (s == "human") return Format::Human;
  if (s == "machine") return Format::Machine;
  throw ConfigError("unknown format \"" + s + "\" (expected human or machine)");
}

namespace detail {

/// 17 significant digits, always in exponent form so reals never read back
/// as integers.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline void write_machine(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, val] : j.items()) {  // nlohmann::json keeps keys sorted
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write_machine(val, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_machine(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_real(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

inline std::string human_scalar(const Json& j) {
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", j.get<double>());
    return buf;
  }
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + human_scalar(j[i]);
    return s + "]";
  }
  return j.dump();
}

inline void write_human(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) write_human(val, prefix.empty() ? key : prefix + "." + key, out);
    return;
  }
  out += prefix + " = " + human_scalar(j) + "\n";
}

}  // namespace detail

inline std::string emit_report(const Json& body, Format format) {
  std::string out;
  if (format == Format::Machine) {
    detail::write_machine(body, out);
    out += '\n';
    return out;
  }
  if (body.contains("certificate")) {
    const Json& c = body["certificate"];
    out += "value = 2·systole\n";
    out += "  value      = " + detail::human_scalar(c["value"]) + " (" + c["value_kind"].get<std::string>() + ")\n";
    out += "  systole    = " + detail::human_scalar(c["systole"]["s"]) + " at u = " +
           detail::human_scalar(c["systole"]["u"]) + "\n";
    out += "  case       = " + c["case"].get<std::string>() + "\n";
    out += "  valid      = " + detail::human_scalar(c["valid"]) + "\n";
    out += "\n";
  }
  detail::write_human(body, "", out);
  return out;
}

}  // namespace systocap::cli
