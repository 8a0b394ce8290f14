#include "lslab/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lslab {

namespace {

using nlohmann::json;

ScalarExpr expression_field(const json& j, const std::string& where) {
  if (j.is_number()) return ScalarExpr::constant(j.get<double>());
  if (!j.is_string()) throw SchemaError(where + ": expected an expression string or a number");
  try {
    return parse_expression(j.get<std::string>());
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.offset(), where + ": " + e.detail());
  }
}

const json& require_object(const json& parent, const char* key, const std::string& where) {
  if (!parent.contains(key)) throw SchemaError(where + ": missing key '" + key + "'");
  const json& j = parent.at(key);
  if (!j.is_object()) throw SchemaError(where + "." + key + ": expected an object");
  return j;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(where + ": unknown key '" + key + "'");
  }
}

BoundaryCurve curve(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("radius")) throw SchemaError(where + ": expected {\"radius\": <expr>}");
  reject_unknown(j, {"radius", "kind"}, where);
  if (j.contains("kind") && j.at("kind") != "polar-graph")
    throw SchemaError(where + ".kind: only \"polar-graph\" curves are supported");
  return BoundaryCurve(expression_field(j.at("radius"), where + ".radius"));
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text, const std::string& fallback_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("scenario: expected a JSON object");
  reject_unknown(root, {"name", "description", "domain", "operator", "boundary", "grid", "tolerances", "reference"},
                 "scenario");

  ScenarioSpec spec;
  spec.source = text;
  spec.name = root.contains("name") && root.at("name").is_string() ? root.at("name").get<std::string>() : fallback_name;

  const json& dom = require_object(root, "domain", "scenario");
  reject_unknown(dom, {"interior", "exterior"}, "domain");
  std::optional<BoundaryCurve> interior;
  if (dom.contains("interior") && !dom.at("interior").is_null()) interior = curve(dom.at("interior"), "domain.interior");
  if (!dom.contains("exterior")) throw SchemaError("domain: missing key 'exterior'");
  spec.domain = DomainSpec(std::move(interior), curve(dom.at("exterior"), "domain.exterior"));

  if (root.contains("operator")) {
    const json& op = require_object(root, "operator", "scenario");
    reject_unknown(op, {"a11", "a12", "a22", "b1", "b2", "c"}, "operator");
    auto coeff = [&](const char* key, ScalarExpr& out) {
      if (op.contains(key)) out = expression_field(op.at(key), std::string("operator.") + key);
    };
    coeff("a11", spec.op.a11);
    coeff("a12", spec.op.a12);
    coeff("a22", spec.op.a22);
    coeff("b1", spec.op.b1);
    coeff("b2", spec.op.b2);
    if (op.contains("c")) spec.op.c = expression_field(op.at("c"), "operator.c");
  }

  const json& bnd = require_object(root, "boundary", "scenario");
  reject_unknown(bnd, {"interior", "exterior"}, "boundary");
  if (!bnd.contains("exterior")) throw SchemaError("boundary: missing key 'exterior'");
  spec.psi_exterior = expression_field(bnd.at("exterior"), "boundary.exterior");
  if (bnd.contains("interior") && !bnd.at("interior").is_null())
    spec.psi_interior = expression_field(bnd.at("interior"), "boundary.interior");

  if (root.contains("grid")) {
    const json& g = require_object(root, "grid", "scenario");
    reject_unknown(g, {"n_theta", "n_s"}, "grid");
    if (g.contains("n_theta")) spec.grid.n_theta = integer(g.at("n_theta"), "grid.n_theta");
    if (g.contains("n_s")) spec.grid.n_s = integer(g.at("n_s"), "grid.n_s");
  }

  if (root.contains("tolerances")) {
    const json& t = require_object(root, "tolerances", "scenario");
    reject_unknown(t,
                   {"grad_zero_tol", "value_zero_tol", "dedup_radius", "equal_extrema_tol", "linear_residual_tol",
                    "interior_margin", "ellipticity_floor"},
                   "tolerances");
    auto opt = [&](const char* key, std::optional<double>& out) {
      if (t.contains(key)) out = number(t.at(key), std::string("tolerances.") + key);
    };
    auto req = [&](const char* key, double& out) {
      if (t.contains(key)) out = number(t.at(key), std::string("tolerances.") + key);
    };
    opt("grad_zero_tol", spec.tol.grad_zero_tol);
    opt("value_zero_tol", spec.tol.value_zero_tol);
    opt("dedup_radius", spec.tol.dedup_radius);
    req("equal_extrema_tol", spec.tol.equal_extrema_tol);
    req("linear_residual_tol", spec.tol.linear_residual_tol);
    req("interior_margin", spec.tol.interior_margin);
    req("ellipticity_floor", spec.tol.ellipticity_floor);
  }

  if (root.contains("reference") && !root.at("reference").is_null())
    spec.reference = expression_field(root.at("reference"), "reference");
  return spec;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

ScenarioSpec load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_scenario(text, std::filesystem::path(path).stem().string());
}

}  // namespace lslab
