#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "acrp/errors.hpp"
#include "acrp/instances.hpp"

namespace acrp {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

std::string int_list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += fmt::format("{}{}", k ? ", " : "", v[k]);
  return s + "]";
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ParseError(fmt::format("{}: unknown field '{}'", where, key));
  }
}

template <typename T>
T get(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: field '{}': {}", where, key, e.what()));
  }
}

double get_number(const json& j, const char* key, const char* where) {
  if (j.contains(key) && j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return get<double>(j, key, where);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string to_json(const Instance& inst) {
  std::string s = "{\n";
  s += fmt::format("  \"family\": {},\n", json(inst.family).dump());
  s += fmt::format("  \"seed\": {},\n", inst.seed);
  s += fmt::format("  \"d_nm\": {},\n", num(inst.d));
  s += fmt::format("  \"bounds\": {{\"q\": [{}, {}], \"theta_deg\": [{}, {}]}},\n", num(inst.bounds.q_lo),
                   num(inst.bounds.q_hi), num(inst.bounds.theta_lo * 180.0 / kPi),
                   num(inst.bounds.theta_hi * 180.0 / kPi));
  s += "  \"aircraft\": [";
  for (std::size_t i = 0; i < inst.aircraft.size(); ++i) {
    const auto& a = inst.aircraft[i];
    s += i ? ",\n    " : "\n    ";
    s += fmt::format(R"({{"x": {}, "y": {}, "speed": {}, "heading": {}, "fl": {}, "fl_set": {}}})", num(a.x), num(a.y),
                     num(a.speed), num(a.heading), a.fl ? std::to_string(*a.fl) : "null", int_list(a.fl_set));
  }
  s += inst.aircraft.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return s;
}

Instance instance_from_json(const std::string& text) {
  const json j = parse(text);
  require_keys(j, {"family", "seed", "d_nm", "bounds", "aircraft"}, "instance");
  Instance inst;
  inst.family = get<std::string>(j, "family", "instance");
  inst.seed = get<std::uint64_t>(j, "seed", "instance");
  inst.d = get<double>(j, "d_nm", "instance");
  if (!(inst.d > 0.0)) throw ParseError("instance: d_nm must be positive");

  if (!j.contains("bounds") || !j.contains("aircraft")) throw ParseError("instance: missing 'bounds' or 'aircraft'");
  const json& b = j.at("bounds");
  require_keys(b, {"q", "theta_deg"}, "bounds");
  const auto q = get<std::vector<double>>(b, "q", "bounds");
  const auto th = get<std::vector<double>>(b, "theta_deg", "bounds");
  if (q.size() != 2 || th.size() != 2) throw ParseError("bounds: expected [lo, hi] pairs");
  inst.bounds.q_lo = q[0];
  inst.bounds.q_hi = q[1];
  inst.bounds.theta_lo = th[0] * kPi / 180.0;
  inst.bounds.theta_hi = th[1] * kPi / 180.0;
  try {
    inst.bounds.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("bounds: {}", e.what()));
  }

  const json& list = j.at("aircraft");
  if (!list.is_array()) throw ParseError("instance: 'aircraft' must be an array");
  for (const json& a : list) {
    require_keys(a, {"x", "y", "speed", "heading", "fl", "fl_set"}, "aircraft");
    AircraftState s;
    s.x = get<double>(a, "x", "aircraft");
    s.y = get<double>(a, "y", "aircraft");
    s.speed = get<double>(a, "speed", "aircraft");
    s.heading = get<double>(a, "heading", "aircraft");
    if (!(s.speed > 0.0)) throw ParseError("aircraft: speed must be positive");
    if (a.contains("fl") && !a.at("fl").is_null()) s.fl = get<int>(a, "fl", "aircraft");
    if (a.contains("fl_set")) s.fl_set = get<std::vector<int>>(a, "fl_set", "aircraft");
    inst.aircraft.push_back(std::move(s));
  }
  return inst;
}

Instance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << to_json(inst);
}

SolutionDoc solution_doc(const SolveOutcome& out) {
  SolutionDoc doc;
  doc.status = to_string(out.status);
  doc.objective = out.has_incumbent() ? out.ub : std::numeric_limits<double>::quiet_NaN();
  doc.lb = out.lb;
  doc.ub = out.ub;
  doc.gap = out.has_incumbent() ? out.gap() : std::numeric_limits<double>::quiet_NaN();
  doc.controls = out.controls;
  return doc;
}

std::string to_json(const SolutionDoc& doc) {
  std::string s = "{\n";
  s += fmt::format("  \"status\": {},\n", json(doc.status).dump());
  s += fmt::format("  \"objective\": {},\n", num(doc.objective));
  s += fmt::format("  \"lb\": {},\n", num(doc.lb));
  s += fmt::format("  \"ub\": {},\n", num(doc.ub));
  s += fmt::format("  \"gap\": {},\n", num(doc.gap));
  if (doc.fl_objective >= 0) s += fmt::format("  \"fl_objective\": {},\n", doc.fl_objective);
  s += "  \"aircraft\": [";
  for (std::size_t i = 0; i < doc.controls.size(); ++i) {
    s += i ? ",\n    " : "\n    ";
    s += fmt::format(R"({{"q": {}, "theta_rad": {}, "fl": {}}})", num(doc.controls[i].q), num(doc.controls[i].theta),
                     i < doc.fl.size() ? std::to_string(doc.fl[i]) : "null");
  }
  s += doc.controls.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return s;
}

SolutionDoc solution_from_json(const std::string& text) {
  const json j = parse(text);
  require_keys(j, {"status", "objective", "lb", "ub", "gap", "fl_objective", "aircraft"}, "solution");
  SolutionDoc doc;
  doc.status = get<std::string>(j, "status", "solution");
  doc.objective = get_number(j, "objective", "solution");
  doc.lb = get_number(j, "lb", "solution");
  doc.ub = get_number(j, "ub", "solution");
  doc.gap = get_number(j, "gap", "solution");
  if (j.contains("fl_objective")) doc.fl_objective = get<int>(j, "fl_objective", "solution");
  if (!j.contains("aircraft")) throw ParseError("solution: missing field 'aircraft'");
  const json& list = j.at("aircraft");
  if (!list.is_array()) throw ParseError("solution: 'aircraft' must be an array");
  bool any_fl = false;
  std::vector<int> fl;
  for (const json& a : list) {
    require_keys(a, {"q", "theta_rad", "fl"}, "solution aircraft");
    doc.controls.push_back({get<double>(a, "q", "solution aircraft"), get<double>(a, "theta_rad", "solution aircraft")});
    if (a.contains("fl") && !a.at("fl").is_null()) {
      any_fl = true;
      fl.push_back(get<int>(a, "fl", "solution aircraft"));
    } else {
      fl.push_back(0);
    }
  }
  if (any_fl) doc.fl = std::move(fl);
  return doc;
}

}  // namespace acrp
