#include "creamkit/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace creamkit {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(const Diagnostic& d) {
  std::string out;
  if (d.line > 0) out += "line " + std::to_string(d.line) + ": ";
  if (!d.node.empty()) out += "[" + d.node + "] ";
  out += d.message;
  return out;
}

std::string_view to_string(CognitiveFunction f) {
  switch (f) {
    case CognitiveFunction::Observation: return "Observation";
    case CognitiveFunction::Interpretation: return "Interpretation";
    case CognitiveFunction::Planning: return "Planning";
    case CognitiveFunction::Execution: return "Execution";
  }
  return "?";
}

char function_letter(CognitiveFunction f) { return to_string(f).front(); }

std::optional<CognitiveFunction> parse_function(std::string_view name) {
  for (auto f : kAllFunctions) {
    if (name == to_string(f)) return f;
  }
  if (name == "Observer") return CognitiveFunction::Observation;
  return std::nullopt;
}

std::string_view to_string(Effect e) {
  switch (e) {
    case Effect::Reduce: return "Reduce";
    case Effect::Neutral: return "Neutral";
    case Effect::Improve: return "Improve";
  }
  return "?";
}

std::optional<Effect> parse_effect(std::string_view name) {
  for (auto e : {Effect::Reduce, Effect::Neutral, Effect::Improve}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

std::string_view to_string(ControlMode m) {
  switch (m) {
    case ControlMode::Scrambled: return "Scrambled";
    case ControlMode::Opportunistic: return "Opportunistic";
    case ControlMode::Tactical: return "Tactical";
    case ControlMode::Strategic: return "Strategic";
  }
  return "?";
}

std::optional<ControlMode> parse_control_mode(std::string_view name) {
  for (auto m : kAllModes) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

const CpcState* CpcDefinition::find_state(std::string_view state_name) const {
  auto it = std::find_if(states.begin(), states.end(),
                         [&](const CpcState& s) { return s.name == state_name; });
  return it == states.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// CocomMap

CocomMap::CocomMap(int rows, int cols, std::vector<ControlMode> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {}

CocomMap CocomMap::from_score_bands(int max_reduce, int max_improve,
                                    int opportunistic_from, int tactical_from,
                                    int strategic_from) {
  std::vector<ControlMode> cells;
  cells.reserve(static_cast<std::size_t>((max_reduce + 1) * (max_improve + 1)));
  for (int r = 0; r <= max_reduce; ++r) {
    for (int i = 0; i <= max_improve; ++i) {
      const int s = i - r;
      ControlMode m = ControlMode::Scrambled;
      if (s >= strategic_from) {
        m = ControlMode::Strategic;
      } else if (s >= tactical_from) {
        m = ControlMode::Tactical;
      } else if (s >= opportunistic_from) {
        m = ControlMode::Opportunistic;
      }
      cells.push_back(m);
    }
  }
  return CocomMap(max_reduce + 1, max_improve + 1, std::move(cells));
}

bool CocomMap::contains(int sum_reduce, int sum_improve) const {
  return sum_reduce >= 0 && sum_improve >= 0 && sum_reduce < rows_ &&
         sum_improve < cols_;
}

ControlMode CocomMap::at(int sum_reduce, int sum_improve) const {
  if (!contains(sum_reduce, sum_improve)) {
    throw Error("score (reduce " + std::to_string(sum_reduce) + ", improve " +
                std::to_string(sum_improve) + ") lies outside the " +
                std::to_string(rows_) + "x" + std::to_string(cols_) + " COCOM grid");
  }
  return cells_[static_cast<std::size_t>(sum_reduce * cols_ + sum_improve)];
}

std::vector<std::string> CocomMap::check() const {
  std::vector<std::string> problems;
  if (rows_ < 1 || cols_ < 1 ||
      cells_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_)) {
    problems.emplace_back("non-total COCOM grid: expected " + std::to_string(rows_) + "x" +
                          std::to_string(cols_) + " cells, found " +
                          std::to_string(cells_.size()));
    return problems;
  }
  auto cell = [&](int r, int i) { return cells_[static_cast<std::size_t>(r * cols_ + i)]; };
  for (int r = 0; r < rows_; ++r) {
    for (int i = 0; i < cols_; ++i) {
      if (r + 1 < rows_ && cell(r + 1, i) > cell(r, i)) {
        problems.emplace_back("non-monotone COCOM grid: (" + std::to_string(r) + "," +
                              std::to_string(i) + ")->" + std::string(to_string(cell(r, i))) +
                              " but (" + std::to_string(r + 1) + "," + std::to_string(i) +
                              ")->" + std::string(to_string(cell(r + 1, i))));
      }
      if (i + 1 < cols_ && cell(r, i + 1) < cell(r, i)) {
        problems.emplace_back("non-monotone COCOM grid: (" + std::to_string(r) + "," +
                              std::to_string(i) + ")->" + std::string(to_string(cell(r, i))) +
                              " but (" + std::to_string(r) + "," + std::to_string(i + 1) +
                              ")->" + std::string(to_string(cell(r, i + 1))));
      }
    }
  }
  if (cell(rows_ - 1, 0) != ControlMode::Scrambled) {
    problems.emplace_back("COCOM corner (" + std::to_string(rows_ - 1) +
                          ",0) must map to Scrambled");
  }
  if (cell(0, cols_ - 1) != ControlMode::Strategic) {
    problems.emplace_back("COCOM corner (0," + std::to_string(cols_ - 1) +
                          ") must map to Strategic");
  }
  return problems;
}

// ---------------------------------------------------------------------------
// WeightTable

double WeightTable::weight(int cpc, std::string_view state, CognitiveFunction f) const {
  auto it = entries_.find(WeightKey{cpc, std::string(state), f});
  return it == entries_.end() ? 1.0 : it->second;
}

void WeightTable::set(int cpc, std::string state, CognitiveFunction f, double multiplier) {
  entries_[WeightKey{cpc, std::move(state), f}] = multiplier;
}

// ---------------------------------------------------------------------------
// Taxonomy

const GenericFailureType* Taxonomy::find_failure_type(std::string_view code) const {
  auto it = std::find_if(failure_types.begin(), failure_types.end(),
                         [&](const GenericFailureType& g) { return g.id == code; });
  return it == failure_types.end() ? nullptr : &*it;
}

const CpcDefinition* Taxonomy::find_cpc(int id) const {
  auto it = std::find_if(cpcs.begin(), cpcs.end(),
                         [&](const CpcDefinition& c) { return c.id == id; });
  return it == cpcs.end() ? nullptr : &*it;
}

HepInterval Taxonomy::interval(ControlMode mode) const {
  for (const auto& m : control_modes) {
    if (m.id == mode) return m.interval;
  }
  throw Error("control mode " + std::string(to_string(mode)) + " has no interval");
}

double nominal_cfp(const Taxonomy& t, std::string_view code) {
  const auto* g = t.find_failure_type(code);
  if (g == nullptr) throw Error("unknown generic failure type code '" + std::string(code) + "'");
  return g->nominal_cfp;
}

std::optional<CognitiveFunction> function_for_activity(const Taxonomy& t,
                                                       std::string_view activity) {
  for (const auto& [name, f] : t.activity_map) {
    if (name == activity) return f;
  }
  return std::nullopt;
}

int max_improve_sum(const Taxonomy& t) {
  return static_cast<int>(std::count_if(t.cpcs.begin(), t.cpcs.end(), [](const CpcDefinition& c) {
    return std::any_of(c.states.begin(), c.states.end(),
                       [](const CpcState& s) { return s.effect == Effect::Improve; });
  }));
}

int max_reduce_sum(const Taxonomy& t) {
  return static_cast<int>(std::count_if(t.cpcs.begin(), t.cpcs.end(), [](const CpcDefinition& c) {
    return std::any_of(c.states.begin(), c.states.end(),
                       [](const CpcState& s) { return s.effect == Effect::Reduce; });
  }));
}

namespace {

bool open_unit(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }
bool half_open_unit(double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; }

Taxonomy build_default() {
  using CF = CognitiveFunction;
  Taxonomy t;
  t.name = "NDT radiograph interpretation (adapted CREAM)";
  t.version = "creamkit-default-1";
  t.functions = {{CF::Observation, "Observation"},
                 {CF::Interpretation, "Interpretation"},
                 {CF::Planning, "Planning"},
                 {CF::Execution, "Execution"}};
  t.failure_types = {
      {"O1", CF::Observation, "Wrong object observed", 0.001},
      {"O2", CF::Observation, "Wrong identification", 0.007},
      {"O3", CF::Observation, "Observation not made", 0.007},
      {"I1", CF::Interpretation, "Faulty diagnosis", 0.02},
      {"I2", CF::Interpretation, "Decision error", 0.01},
      {"I3", CF::Interpretation, "Delayed interpretation", 0.01},
      {"P1", CF::Planning, "Priority error", 0.01},
      {"P2", CF::Planning, "Inadequate plan", 0.01},
      {"E1", CF::Execution, "Action of wrong type", 0.003},
      {"E2", CF::Execution, "Action at wrong time", 0.003},
      {"E3", CF::Execution, "Action on wrong object", 0.0005},
      {"E4", CF::Execution, "Action out of sequence", 0.003},
      {"E5", CF::Execution, "Missed action", 0.003},
  };

  constexpr auto kImp = Effect::Improve;
  constexpr auto kNeu = Effect::Neutral;
  constexpr auto kRed = Effect::Reduce;
  t.cpcs = {
      {1, "Procedures & technical documentation",
       "History of previous exams, examination protocols, charts, abacus. Available, "
       "displayed, up to date (indexes, revisions), manufacturing films (archiving), end of "
       "manufacturing report, design plan, welding records.",
       {{"Appropriate", kImp}, {"Acceptable", kNeu}, {"Inappropriate", kRed}}},
      {2, "Number of simultaneous objectives",
       "Number of welds to be interpreted (possibly number of films per weld). Type of "
       "problem (additional exposures, meetings). Acceptance of films. Type of weld, "
       "diversity and geometry of the controlled areas. Distribution of the workload over "
       "available interpreters.",
       {{"Less than capacity", kNeu}, {"At capacity", kNeu}, {"More than capacity", kRed}}},
      {3, "Local conditions of interpretation",
       "Interpretation room condition (dark, quiet, wall color, 0-10 lux, not used as a "
       "checkroom, twinned with the lab, multiple interpreters in parallel). Space to deposit "
       "films and fill out reports. Room temperature and illuminator fan noise.",
       {{"Advantageous", kImp}, {"Compatible", kNeu}, {"Incompatible", kRed}}},
      {4, "Available time",
       "Number of radiographs to interpret, phase of the shutdown. Need to catch up with "
       "delays (critical path). Pressure to communicate results quickly and release the "
       "material. Fatigue.",
       {{"Adequate", kImp}, {"Temporarily inadequate", kNeu}, {"Continually inadequate", kRed}}},
      {5, "Quality of the hardware",
       "Collective equipment: illuminators (foot pedal, adjustable iris, rectangular, LED) "
       "and densitometers. Individual equipment: gloves, ruler, pencil, reading table.",
       {{"Adequate, verified", kNeu}, {"Satisfactory", kNeu}, {"Inadequate", kRed}}},
      {6, "Training and experience",
       "Level of knowledge in the broadest sense, years of experience, arrangements and "
       "frequency of skill maintenance. Duration of the companionship.",
       {{"Adequate training, experienced", kImp},
        {"Adequate training, little experience", kNeu},
        {"Inadequate", kRed}}},
      {7, "Effectiveness of collaboration / communication",
       "Relations between plant, internal engineering, technical assistants and the "
       "provider. Negotiations on position and exposure. Collaboration or competition "
       "between teams. Presence of clients in the interpretation room. Exercise of free "
       "will (avoid copying the opinion of another person).",
       {{"Very efficient", kImp}, {"Efficient", kNeu}, {"Inefficient", kRed},
        {"Undesirable", kRed}}},
      {8, "Time of day / period of the week",
       "Day = 8am to 8pm; middle of week = Tuesday, Wednesday, Thursday. End of night is "
       "calm with less co-activity but more fatigue. Beginning and end of weeks are at risk "
       "(long distance driving, workload accumulation).",
       {{"Day, mid-week", kNeu}, {"Day, early or late week", kNeu}, {"Night, mid-week", kImp},
        {"Night, beginning or end of week", kRed}}},
  };

  t.control_modes = {{ControlMode::Strategic, {0.00005, 0.01}},
                     {ControlMode::Tactical, {0.001, 0.1}},
                     {ControlMode::Opportunistic, {0.01, 0.5}},
                     {ControlMode::Scrambled, {0.1, 1.0}}};

  t.cocom = CocomMap::from_score_bands(8, 6, -5, -1, 3);

  for (const auto& cpc : t.cpcs) {
    for (const auto& s : cpc.states) {
      if (s.effect == Effect::Neutral) continue;
      const double w = s.effect == Effect::Improve ? 0.5 : 5.0;
      for (auto f : kAllFunctions) t.weights.set(cpc.id, s.name, f, w);
    }
  }

  t.activity_map = {
      {"coordinate", CF::Planning},      {"communicate", CF::Execution},
      {"compare", CF::Interpretation},   {"diagnose", CF::Interpretation},
      {"evaluate", CF::Interpretation},  {"execute", CF::Execution},
      {"identify", CF::Observation},     {"maintain", CF::Execution},
      {"monitor", CF::Observation},      {"observe", CF::Observation},
      {"plan", CF::Planning},            {"record", CF::Execution},
      {"regulate", CF::Execution},       {"scan", CF::Observation},
      {"verify", CF::Execution},
  };
  return t;
}

}  // namespace

const Taxonomy& default_taxonomy() {
  static const Taxonomy kDefault = build_default();
  return kDefault;
}

std::vector<Diagnostic> validate_taxonomy(const Taxonomy& t) {
  std::vector<Diagnostic> out;
  auto fail = [&](std::string where, std::string msg) {
    out.push_back(Diagnostic{0, std::move(where), std::move(msg)});
  };

  if (t.functions.size() != kAllFunctions.size()) {
    fail("functions", "exactly four cognitive functions are required, found " +
                          std::to_string(t.functions.size()));
  }
  std::set<CognitiveFunction> seen_functions;
  for (const auto& f : t.functions) {
    if (!seen_functions.insert(f.id).second) {
      fail("functions", "duplicate id " + std::string(to_string(f.id)));
    }
  }

  if (t.failure_types.empty()) fail("failure_types", "no generic failure types");
  std::set<std::string> gft_ids;
  for (const auto& g : t.failure_types) {
    if (!gft_ids.insert(g.id).second) fail("failure_types", "duplicate id " + g.id);
    if (g.id.empty() || g.id.front() != function_letter(g.function)) {
      fail("failure_types", "GFT " + g.id + " does not match function " +
                                std::string(to_string(g.function)));
    }
    if (!open_unit(g.nominal_cfp)) {
      fail("failure_types", "probability out of range for " + g.id + ": must be in (0,1)");
    }
  }
  for (auto f : kAllFunctions) {
    bool any = std::any_of(t.failure_types.begin(), t.failure_types.end(),
                           [&](const GenericFailureType& g) { return g.function == f; });
    if (!any) fail("failure_types", "no failure type for " + std::string(to_string(f)));
  }

  std::set<int> cpc_ids;
  for (std::size_t k = 0; k < t.cpcs.size(); ++k) {
    const auto& c = t.cpcs[k];
    const std::string where = "cpc " + std::to_string(c.id);
    if (!cpc_ids.insert(c.id).second) fail("cpcs", "duplicate id " + std::to_string(c.id));
    if (c.id != static_cast<int>(k) + 1) {
      fail(where, "CPC ids must be consecutive from 1 in listing order");
    }
    if (c.states.size() < 2) fail(where, "at least two states are required");
    std::set<std::string> names;
    for (const auto& s : c.states) {
      if (s.name.empty()) fail(where, "empty state name");
      if (!names.insert(s.name).second) fail(where, "duplicate state " + s.name);
    }
  }

  for (auto m : kAllModes) {
    auto n = std::count_if(t.control_modes.begin(), t.control_modes.end(),
                           [&](const ControlModeInfo& i) { return i.id == m; });
    if (n != 1) {
      fail("control_modes", std::string(to_string(m)) + " must be listed exactly once");
    }
  }
  for (const auto& m : t.control_modes) {
    const std::string where = "control_modes " + std::string(to_string(m.id));
    if (!open_unit(m.interval.lower) || !half_open_unit(m.interval.upper)) {
      fail(where, "probability out of range");
    } else if (!(m.interval.lower < m.interval.upper)) {
      fail(where, "lower bound must be below upper bound");
    }
  }

  for (auto& p : t.cocom.check()) fail("cocom_grid", std::move(p));
  if (t.cocom.max_reduce() < max_reduce_sum(t) || t.cocom.max_improve() < max_improve_sum(t)) {
    fail("cocom_grid", "grid " + std::to_string(t.cocom.rows()) + "x" +
                           std::to_string(t.cocom.cols()) +
                           " does not cover every achievable combined score");
  }

  for (const auto& [key, w] : t.weights.entries()) {
    const std::string where = "weights " + std::to_string(key.cpc) + "/" + key.state;
    const auto* cpc = t.find_cpc(key.cpc);
    if (cpc == nullptr) {
      fail(where, "unknown CPC");
    } else if (cpc->find_state(key.state) == nullptr) {
      fail(where, "unknown state");
    }
    if (!std::isfinite(w) || w <= 0.0) fail(where, "multiplier must be positive");
  }

  std::set<std::string> activities;
  for (const auto& [name, f] : t.activity_map) {
    if (!activities.insert(name).second) fail("activity_map", "duplicate activity " + name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON document

std::string serialize_taxonomy(const Taxonomy& t) {
  ordered_json doc;
  doc["name"] = t.name;
  doc["version"] = t.version;
  doc["functions"] = ordered_json::array();
  for (const auto& f : t.functions) {
    doc["functions"].push_back({{"id", to_string(f.id)}, {"display_name", f.display_name}});
  }
  doc["failure_types"] = ordered_json::array();
  for (const auto& g : t.failure_types) {
    doc["failure_types"].push_back({{"id", g.id},
                                    {"function", to_string(g.function)},
                                    {"description", g.description},
                                    {"nominal_cfp", g.nominal_cfp}});
  }
  doc["cpcs"] = ordered_json::array();
  for (const auto& c : t.cpcs) {
    ordered_json states = ordered_json::array();
    for (const auto& s : c.states) {
      states.push_back({{"name", s.name}, {"effect", to_string(s.effect)}});
    }
    doc["cpcs"].push_back(
        {{"id", c.id}, {"name", c.name}, {"description", c.description}, {"states", states}});
  }
  doc["control_modes"] = ordered_json::array();
  for (const auto& m : t.control_modes) {
    doc["control_modes"].push_back(
        {{"id", to_string(m.id)}, {"hep_lower", m.interval.lower}, {"hep_upper", m.interval.upper}});
  }
  ordered_json grid = ordered_json::array();
  for (int r = 0; r < t.cocom.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int i = 0; i < t.cocom.cols(); ++i) row.push_back(to_string(t.cocom.at(r, i)));
    grid.push_back(row);
  }
  doc["cocom_grid"] = grid;
  doc["weights"] = ordered_json::array();
  for (const auto& [key, w] : t.weights.entries()) {
    doc["weights"].push_back({{"cpc", key.cpc},
                              {"state", key.state},
                              {"function", to_string(key.function)},
                              {"multiplier", w}});
  }
  doc["activity_map"] = ordered_json::array();
  for (const auto& [name, f] : t.activity_map) {
    doc["activity_map"].push_back({{"activity", name}, {"function", to_string(f)}});
  }
  return doc.dump(2) + "\n";
}

namespace {

// Collects structural errors while walking the document so a single load
// reports everything wrong with it.
class Reader {
 public:
  std::vector<Diagnostic> errors;

  void fail(const std::string& where, const std::string& msg) {
    errors.push_back(Diagnostic{0, where, msg});
  }

  const json* array(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
      fail(where, std::string("malformed document: '") + key + "' must be an array");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> str(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      fail(where, std::string("malformed document: '") + key + "' must be a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<double> num(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
      fail(where, std::string("malformed document: '") + key + "' must be a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<int> integer(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
      fail(where, std::string("malformed document: '") + key + "' must be an integer");
      return std::nullopt;
    }
    return it->get<int>();
  }

  std::optional<CognitiveFunction> function(const json& obj, const char* key,
                                            const std::string& where) {
    auto s = str(obj, key, where);
    if (!s) return std::nullopt;
    auto f = parse_function(*s);
    if (!f) fail(where, "unknown cognitive function '" + *s + "'");
    return f;
  }
};

}  // namespace

Result<Taxonomy> load_taxonomy(std::string_view document) {
  json doc = json::parse(document, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return std::vector<Diagnostic>{{0, "", "malformed document: not a JSON object"}};
  }
  Reader rd;
  Taxonomy t;
  if (auto s = rd.str(doc, "name", "taxonomy")) t.name = *s;
  if (auto s = rd.str(doc, "version", "taxonomy")) t.version = *s;

  if (const auto* arr = rd.array(doc, "functions", "functions")) {
    for (const auto& e : *arr) {
      auto f = rd.function(e, "id", "functions");
      auto d = rd.str(e, "display_name", "functions");
      if (f && d) t.functions.push_back({*f, *d});
    }
  }
  if (const auto* arr = rd.array(doc, "failure_types", "failure_types")) {
    for (const auto& e : *arr) {
      auto id = rd.str(e, "id", "failure_types");
      const std::string where = "failure_types " + id.value_or("?");
      auto f = rd.function(e, "function", where);
      auto d = rd.str(e, "description", where);
      auto p = rd.num(e, "nominal_cfp", where);
      if (id && f && d && p) t.failure_types.push_back({*id, *f, *d, *p});
    }
  }
  if (const auto* arr = rd.array(doc, "cpcs", "cpcs")) {
    for (const auto& e : *arr) {
      auto id = rd.integer(e, "id", "cpcs");
      const std::string where = "cpc " + (id ? std::to_string(*id) : std::string("?"));
      auto name = rd.str(e, "name", where);
      auto desc = rd.str(e, "description", where);
      CpcDefinition c{id.value_or(0), name.value_or(""), desc.value_or(""), {}};
      if (const auto* states = rd.array(e, "states", where)) {
        for (const auto& s : *states) {
          auto sn = rd.str(s, "name", where);
          auto se = rd.str(s, "effect", where);
          if (!sn || !se) continue;
          auto eff = parse_effect(*se);
          if (!eff) {
            rd.fail(where, "unknown effect '" + *se + "'");
            continue;
          }
          c.states.push_back({*sn, *eff});
        }
      }
      if (id && name && desc) t.cpcs.push_back(std::move(c));
    }
  }
  if (const auto* arr = rd.array(doc, "control_modes", "control_modes")) {
    for (const auto& e : *arr) {
      auto id = rd.str(e, "id", "control_modes");
      auto lo = rd.num(e, "hep_lower", "control_modes");
      auto hi = rd.num(e, "hep_upper", "control_modes");
      if (!id || !lo || !hi) continue;
      auto m = parse_control_mode(*id);
      if (!m) {
        rd.fail("control_modes", "unknown control mode '" + *id + "'");
        continue;
      }
      t.control_modes.push_back({*m, {*lo, *hi}});
    }
  }
  if (const auto* grid = rd.array(doc, "cocom_grid", "cocom_grid")) {
    const int rows = static_cast<int>(grid->size());
    int cols = -1;
    bool ragged = false;
    std::vector<ControlMode> cells;
    for (const auto& row : *grid) {
      if (!row.is_array()) {
        rd.fail("cocom_grid", "malformed document: grid rows must be arrays");
        ragged = true;
        break;
      }
      if (cols < 0) cols = static_cast<int>(row.size());
      if (static_cast<int>(row.size()) != cols) ragged = true;
      for (const auto& cell : row) {
        std::optional<ControlMode> m;
        if (cell.is_string()) m = parse_control_mode(cell.get<std::string>());
        if (!m) {
          rd.fail("cocom_grid", "unknown control mode in grid: " + cell.dump());
          m = ControlMode::Scrambled;
        }
        cells.push_back(*m);
      }
    }
    if (ragged) {
      rd.fail("cocom_grid", "non-total COCOM grid: rows have different lengths");
      t.cocom = CocomMap();
    } else if (rows == 0 || cols <= 0) {
      rd.fail("cocom_grid", "non-total COCOM grid: grid is empty");
    } else {
      t.cocom = CocomMap(rows, cols, std::move(cells));
    }
  }
  if (const auto* arr = rd.array(doc, "weights", "weights")) {
    for (const auto& e : *arr) {
      auto cpc = rd.integer(e, "cpc", "weights");
      auto state = rd.str(e, "state", "weights");
      auto f = rd.function(e, "function", "weights");
      auto w = rd.num(e, "multiplier", "weights");
      if (!cpc || !state || !f || !w) continue;
      if (t.weights.entries().count(WeightKey{*cpc, *state, *f}) != 0) {
        rd.fail("weights", "duplicate entry for cpc " + std::to_string(*cpc) + "/" + *state + "/" +
                               std::string(to_string(*f)));
      }
      t.weights.set(*cpc, *state, *f, *w);
    }
  }
  if (const auto* arr = rd.array(doc, "activity_map", "activity_map")) {
    for (const auto& e : *arr) {
      auto a = rd.str(e, "activity", "activity_map");
      auto f = rd.function(e, "function", "activity_map");
      if (a && f) t.activity_map.emplace_back(*a, *f);
    }
  }

  auto errors = std::move(rd.errors);
  // Semantic checks are meaningless on a grid that failed to parse.
  for (auto& d : validate_taxonomy(t)) {
    if (d.node == "cocom_grid" && std::any_of(errors.begin(), errors.end(), [](const Diagnostic& e) {
          return e.node == "cocom_grid";
        })) {
      continue;
    }
    errors.push_back(std::move(d));
  }
  if (!errors.empty()) return errors;
  return t;
}

}  // namespace creamkit
