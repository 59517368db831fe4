#include "mgem/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mgem {
namespace {

using json = nlohmann::json;

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario parse error at " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) parse_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_error(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) parse_error(where, "expected a number");
  return v.get<double>();
}

double number(const json& obj, const char* key, const std::string& where) {
  return number(field(obj, key, where), where + "." + key);
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

int slot_index(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) parse_error(where + "." + key, "expected an integer slot");
  return v.get<int>() - 1;  // files are one-based
}

Vector vec(const json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where, "expected an array");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Vector vec_or_zero(const json& obj, const char* key, int n, const std::string& where) {
  return obj.contains(key) ? vec(obj[key], where + "." + key) : Vector::Zero(n);
}

Matrix rows(const json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where, "expected an array of rows");
  if (v.empty()) return Matrix(0, 0);
  Matrix out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vector r = vec(v[i], where + "[" + std::to_string(i) + "]");
    if (i == 0) out.resize(static_cast<Index>(v.size()), r.size());
    if (r.size() != out.cols()) parse_error(where, "rows have different lengths");
    out.row(static_cast<Index>(i)) = r.transpose();
  }
  return out;
}

const json& list(const json& root, const char* key) {
  static const json empty = json::array();
  auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_array()) parse_error(key, "expected an array");
  return *it;
}

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

Scenario from_json(const json& root) {
  if (!root.is_object()) parse_error("document", "expected a top-level object");
  Scenario s;
  s.name = root.value("name", std::string("unnamed"));

  double scale = 1.0;
  const std::string currency = root.value("currency", std::string("cent"));
  if (currency == "dollar") {
    scale = 100.0;
  } else if (currency != "cent") {
    parse_error("currency", "expected 'cent' or 'dollar'");
  }

  const json& h = field(root, "horizon", "document");
  const json& slots = field(h, "slots", "horizon");
  if (!slots.is_number_integer()) parse_error("horizon.slots", "expected an integer");
  s.horizon.slots = slots.get<int>();
  s.horizon.slot_duration = number_or(h, "slot_duration", 1.0, "horizon");
  if (h.contains("labels")) s.horizon.labels = h["labels"].get<std::vector<std::string>>();
  const int T = s.horizon.slots;

  const json& gens = list(root, "generators");
  for (std::size_t m = 0; m < gens.size(); ++m) {
    const std::string w = "generators[" + std::to_string(m) + "]";
    const json& g = gens[m];
    Generator gen;
    gen.p_min = number(g, "p_min", w);
    gen.p_max = number(g, "p_max", w);
    gen.ramp_up = number(g, "ramp_up", w);
    gen.ramp_down = number(g, "ramp_down", w);
    gen.cost_a = scale * number(g, "cost_a", w);
    gen.cost_b = scale * number(g, "cost_b", w);
    if (g.contains("initial_output") && !g["initial_output"].is_null()) {
      gen.initial_output = number(g, "initial_output", w);
    }
    s.generators.push_back(gen);
  }

  const json& c1 = list(root, "class1_loads");
  for (std::size_t n = 0; n < c1.size(); ++n) {
    const std::string w = "class1_loads[" + std::to_string(n) + "]";
    s.class1.push_back({number(c1[n], "p_min", w), number(c1[n], "p_max", w),
                        scale * number(c1[n], "util_c", w), scale * number(c1[n], "util_d", w)});
  }

  const json& c2 = list(root, "class2_loads");
  for (std::size_t q = 0; q < c2.size(); ++q) {
    const std::string w = "class2_loads[" + std::to_string(q) + "]";
    Class2Load e;
    e.p_max_per_slot = vec(field(c2[q], "p_max_per_slot", w), w + ".p_max_per_slot");
    e.energy_total = number(c2[q], "energy_total", w);
    e.start_slot = slot_index(c2[q], "start_slot", w);
    e.stop_slot = slot_index(c2[q], "stop_slot", w);
    e.util_weights = scale * vec_or_zero(c2[q], "util_weights", T, w);
    s.class2.push_back(std::move(e));
  }

  const json& st = list(root, "storage");
  for (std::size_t j = 0; j < st.size(); ++j) {
    const std::string w = "storage[" + std::to_string(j) + "]";
    StorageUnit u;
    u.b_max = number(st[j], "b_max", w);
    u.b_min_final = number(st[j], "b_min_final", w);
    u.b_initial = number(st[j], "b_initial", w);
    u.p_chg_min = number(st[j], "p_chg_min", w);
    u.p_chg_max = number(st[j], "p_chg_max", w);
    u.efficiency = number_or(st[j], "efficiency", 1.0, w);
    u.dod = number_or(st[j], "dod", 0.0, w);
    u.cost_weights = scale * vec_or_zero(st[j], "cost_weights", T, w);
    s.storage.push_back(std::move(u));
  }

  if (root.contains("uncertainty")) {
    const json& uj = root["uncertainty"];
    auto& u = s.uncertainty;
    const std::string kind = field(uj, "kind", "uncertainty").get<std::string>();
    if (kind == "joint") {
      u.kind = UncertaintyKind::Joint;
    } else if (kind == "per_facility") {
      u.kind = UncertaintyKind::PerFacility;
    } else {
      parse_error("uncertainty.kind", "expected 'joint' or 'per_facility'");
    }
    u.lower = rows(field(uj, "lower", "uncertainty"), "uncertainty.lower");
    u.upper = rows(field(uj, "upper", "uncertainty"), "uncertainty.upper");
    const json& budgets = uj.contains("budgets") ? uj["budgets"] : json::array();
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      const std::string w = "uncertainty.budgets[" + std::to_string(b) + "]";
      BudgetBlock blk;
      blk.facility = budgets[b].contains("facility") ? slot_index(budgets[b], "facility", w) : -1;
      blk.first_slot = slot_index(budgets[b], "first_slot", w);
      blk.last_slot = slot_index(budgets[b], "last_slot", w);
      blk.sum_min = number(budgets[b], "sum_min", w);
      blk.sum_max = number(budgets[b], "sum_max", w);
      u.budgets.push_back(blk);
    }
  } else {
    s.uncertainty.lower = Matrix(0, T);
    s.uncertainty.upper = Matrix(0, T);
  }

  const json& mj = field(root, "market", "document");
  auto& m = s.market;
  m.purchase_price = scale * vec(field(mj, "purchase_price", "market"), "market.purchase_price");
  m.sell_price = scale * vec(field(mj, "sell_price", "market"), "market.sell_price");
  m.fixed_load = vec(field(mj, "fixed_load", "market"), "market.fixed_load");
  m.spinning_reserve = mj.contains("spinning_reserve")
                           ? vec(mj["spinning_reserve"], "market.spinning_reserve")
                           : Vector::Zero(T);
  m.p_r_min = number_or(mj, "p_r_min", 0.0, "market");
  m.p_r_max = number_or(mj, "p_r_max", 500.0, "market");
  return s;
}

json to_json(const Scenario& s) {
  json root;
  root["name"] = s.name;
  root["currency"] = "cent";
  root["horizon"] = {{"slots", s.horizon.slots}, {"slot_duration", s.horizon.slot_duration}};
  if (!s.horizon.labels.empty()) root["horizon"]["labels"] = s.horizon.labels;

  root["generators"] = json::array();
  for (const auto& g : s.generators) {
    json j = {{"p_min", g.p_min},         {"p_max", g.p_max},   {"ramp_up", g.ramp_up},
              {"ramp_down", g.ramp_down}, {"cost_a", g.cost_a}, {"cost_b", g.cost_b}};
    if (g.initial_output) j["initial_output"] = *g.initial_output;
    root["generators"].push_back(j);
  }
  root["class1_loads"] = json::array();
  for (const auto& d : s.class1) {
    root["class1_loads"].push_back(
        {{"p_min", d.p_min}, {"p_max", d.p_max}, {"util_c", d.util_c}, {"util_d", d.util_d}});
  }
  root["class2_loads"] = json::array();
  for (const auto& e : s.class2) {
    root["class2_loads"].push_back({{"p_max_per_slot", to_json(e.p_max_per_slot)},
                                    {"energy_total", e.energy_total},
                                    {"start_slot", e.start_slot + 1},
                                    {"stop_slot", e.stop_slot + 1},
                                    {"util_weights", to_json(e.util_weights)}});
  }
  root["storage"] = json::array();
  for (const auto& u : s.storage) {
    root["storage"].push_back({{"b_max", u.b_max},
                               {"b_min_final", u.b_min_final},
                               {"b_initial", u.b_initial},
                               {"p_chg_min", u.p_chg_min},
                               {"p_chg_max", u.p_chg_max},
                               {"efficiency", u.efficiency},
                               {"dod", u.dod},
                               {"cost_weights", to_json(u.cost_weights)}});
  }
  if (s.uncertainty.facilities() > 0) {
    const auto& u = s.uncertainty;
    json uj;
    uj["kind"] = u.kind == UncertaintyKind::Joint ? "joint" : "per_facility";
    uj["lower"] = to_json(u.lower);
    uj["upper"] = to_json(u.upper);
    uj["budgets"] = json::array();
    for (const auto& b : u.budgets) {
      json bj = {{"first_slot", b.first_slot + 1},
                 {"last_slot", b.last_slot + 1},
                 {"sum_min", b.sum_min},
                 {"sum_max", b.sum_max}};
      if (b.facility >= 0) bj["facility"] = b.facility + 1;
      uj["budgets"].push_back(bj);
    }
    root["uncertainty"] = uj;
  }
  const auto& m = s.market;
  root["market"] = {{"purchase_price", to_json(m.purchase_price)},
                    {"sell_price", to_json(m.sell_price)},
                    {"fixed_load", to_json(m.fixed_load)},
                    {"spinning_reserve", to_json(m.spinning_reserve)},
                    {"p_r_min", m.p_r_min},
                    {"p_r_max", m.p_r_max}};
  return root;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  try {
    s = from_json(root);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  require_valid(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file " + path.string());
  out << dump_scenario(s);
}

Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& n : builtin_scenario_names()) {
    if (n == name_or_path) return builtin_scenario(n);
  }
  return load_scenario(name_or_path);
}

}  // namespace mgem
