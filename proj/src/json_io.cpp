#include "lll/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lll/errors.hpp"

namespace lll {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& context, const std::string& what,
                             json detail = json::object()) {
  detail["source"] = context;
  fail(ErrorKind::ParseError, what, std::move(detail));
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::ParseError, "cannot open file", {{"path", path}});
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorKind::ParseError, "cannot open file for writing", {{"path", path}});
  }
  out << text;
  out.flush();
  require(out.good(), ErrorKind::ParseError, "write failed");
}

json parse_text(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    parse_fail(context, "invalid JSON",
               {{"line", line}, {"column", col}, {"what", e.what()}});
  }
}

const json& need(const json& j, const char* key, const std::string& context,
                 const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    parse_fail(context, "missing required field",
               {{"field", key}, {"in", where}});
  }
  return j.at(key);
}

std::string need_string(const json& j, const char* key,
                        const std::string& context, const std::string& where) {
  const json& v = need(j, key, context, where);
  if (!v.is_string()) {
    parse_fail(context, "field must be a string", {{"field", key}, {"in", where}});
  }
  return v.get<std::string>();
}

const json& need_array(const json& j, const char* key,
                       const std::string& context, const std::string& where) {
  const json& v = need(j, key, context, where);
  if (!v.is_array()) {
    parse_fail(context, "field must be an array", {{"field", key}, {"in", where}});
  }
  return v;
}

int var_index_checked(const LllInstance& inst, const std::string& id,
                      const std::string& context) {
  int idx = inst.var_index(id);
  if (idx < 0) parse_fail(context, "unknown variable", {{"variable", id}});
  return idx;
}

int value_index_checked(const LllInstance& inst, int var,
                        const std::string& label, const std::string& context) {
  const auto& dom = inst.variables[var].domain;
  for (std::size_t y = 0; y < dom.size(); ++y) {
    if (dom[y] == label) return static_cast<int>(y);
  }
  parse_fail(context, "value label not in the variable's domain",
             {{"variable", inst.variables[var].id}, {"value", label}});
}

int event_index_checked(const LllInstance& inst, const std::string& id,
                        const std::string& context) {
  int idx = inst.event_index(id);
  if (idx < 0) parse_fail(context, "unknown event", {{"event", id}});
  return idx;
}

}  // namespace

ordered_json instance_to_json(const LllInstance& inst) {
  ordered_json j;
  j["rank_cap"] = inst.rank_cap;
  j["variables"] = ordered_json::array();
  for (const Variable& v : inst.variables) {
    ordered_json jv;
    jv["id"] = v.id;
    jv["domain"] = v.domain;
    ordered_json probs = ordered_json::array();
    for (const Rat& p : v.probs) probs.push_back(rat_str(p));
    jv["probs"] = std::move(probs);
    j["variables"].push_back(std::move(jv));
  }
  j["events"] = ordered_json::array();
  for (const BadEvent& t : inst.events) {
    ordered_json jt;
    jt["id"] = t.id;
    ordered_json vars = ordered_json::array();
    for (int x : t.vars) vars.push_back(inst.variables[x].id);
    jt["vars"] = std::move(vars);
    ordered_json occ = ordered_json::array();
    for (const auto& row : t.occurs) {
      ordered_json jrow = ordered_json::array();
      for (std::size_t i = 0; i < row.size(); ++i) {
        jrow.push_back(inst.variables[t.vars[i]].domain[row[i]]);
      }
      occ.push_back(std::move(jrow));
    }
    jt["occurs"] = std::move(occ);
    j["events"].push_back(std::move(jt));
  }
  return j;
}

LllInstance instance_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) parse_fail(context, "top level must be an object");
  int rank_cap = 3;
  if (j.contains("rank_cap")) {
    if (!j.at("rank_cap").is_number_integer()) {
      parse_fail(context, "rank_cap must be an integer");
    }
    rank_cap = j.at("rank_cap").get<int>();
  }

  std::vector<VariableSpec> vars;
  for (const json& jv : need_array(j, "variables", context, "top level")) {
    VariableSpec vs;
    vs.id = need_string(jv, "id", context, "variable");
    for (const json& d : need_array(jv, "domain", context, "variable " + vs.id)) {
      if (!d.is_string()) {
        parse_fail(context, "domain labels must be strings", {{"variable", vs.id}});
      }
      vs.domain.push_back(d.get<std::string>());
    }
    for (const json& p : need_array(jv, "probs", context, "variable " + vs.id)) {
      if (!p.is_string()) {
        parse_fail(context, "probabilities must be \"num/den\" strings",
                   {{"variable", vs.id}});
      }
      vs.probs.push_back(p.get<std::string>());
    }
    // Distribution errors in a file are diagnosed here, with the source
    // named; build() would reject them too, but as API misuse.
    Rat sum(0);
    for (const std::string& ps : vs.probs) {
      Rat p = rat_parse(ps);
      if (sgn(p) <= 0) {
        parse_fail(context, "probability must be positive",
                   {{"variable", vs.id}, {"prob", ps}});
      }
      sum += p;
    }
    if (!vs.probs.empty() && sum != 1) {
      parse_fail(context, "probabilities must sum to 1",
                 {{"variable", vs.id}, {"sum", rat_str(sum)}});
    }
    vars.push_back(std::move(vs));
  }

  std::vector<EventSpec> events;
  for (const json& jt : need_array(j, "events", context, "top level")) {
    EventSpec es;
    es.id = need_string(jt, "id", context, "event");
    for (const json& v : need_array(jt, "vars", context, "event " + es.id)) {
      if (!v.is_string()) {
        parse_fail(context, "event vars must be variable ids", {{"event", es.id}});
      }
      es.vars.push_back(v.get<std::string>());
    }
    for (const json& row : need_array(jt, "occurs", context, "event " + es.id)) {
      if (!row.is_array()) {
        parse_fail(context, "occurs rows must be arrays", {{"event", es.id}});
      }
      std::vector<std::string> srow;
      for (const json& cell : row) {
        if (!cell.is_string()) {
          parse_fail(context, "occurs entries must be value labels",
                     {{"event", es.id}});
        }
        srow.push_back(cell.get<std::string>());
      }
      es.occurs.push_back(std::move(srow));
    }
    events.push_back(std::move(es));
  }

  return build(vars, events, rank_cap);
}

LllInstance load_instance(const std::string& path) {
  return instance_from_json(parse_text(read_file(path), path), path);
}

void save_instance(const LllInstance& inst, const std::string& path) {
  write_file(path, instance_to_json(inst).dump(2) + "\n");
}

void save_assignment(const LllInstance& inst, const PartialAssignment& pa,
                     const std::string& path) {
  ordered_json entries = ordered_json::array();
  for (const auto& [var, value] : pa.order()) {
    ordered_json e;
    e["var"] = inst.variables[var].id;
    e["value"] = inst.variables[var].domain[value];
    entries.push_back(std::move(e));
  }
  ordered_json j;
  j["assignment"] = std::move(entries);
  write_file(path, j.dump(2) + "\n");
}

std::vector<std::pair<int, int>> load_assignment(const LllInstance& inst,
                                                 const std::string& path) {
  json j = parse_text(read_file(path), path);
  std::vector<std::pair<int, int>> out;
  std::set<int> seen;
  for (const json& e : need_array(j, "assignment", path, "top level")) {
    std::string vid = need_string(e, "var", path, "assignment entry");
    std::string label = need_string(e, "value", path, "assignment entry");
    int var = var_index_checked(inst, vid, path);
    int value = value_index_checked(inst, var, label, path);
    if (!seen.insert(var).second) {
      parse_fail(path, "variable assigned twice", {{"variable", vid}});
    }
    out.emplace_back(var, value);
  }
  return out;
}

void save_trace(const LllInstance& inst, const FixTrace& trace,
                const std::string& path) {
  std::ostringstream out;
  for (const TraceStep& s : trace.steps) {
    ordered_json j;
    j["var"] = inst.variables[s.var].id;
    j["value"] = inst.variables[s.var].domain[s.value];
    ordered_json incs = ordered_json::array();
    for (const auto& [event, inc] : s.inc) {
      incs.push_back(ordered_json::array({inst.events[event].id, rat_str(inc)}));
    }
    j["inc"] = std::move(incs);
    ordered_json writes = ordered_json::array();
    for (const LedgerWrite& w : s.writes) {
      ordered_json jw;
      auto [u, v] = inst.dep.edges[w.edge];
      jw["edge"] = ordered_json::array({inst.events[u].id, inst.events[v].id});
      jw["node"] = inst.events[w.node].id;
      jw["before"] = rat_str(w.before);
      jw["after"] = rat_str(w.after);
      writes.push_back(std::move(jw));
    }
    j["writes"] = std::move(writes);
    j["pstar_checked"] = s.pstar_checked;
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

FixTrace load_trace(const LllInstance& inst, const std::string& path) {
  std::string text = read_file(path);
  FixTrace trace;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_fail(path, "invalid JSON on trace line",
                 {{"line", line_no}, {"what", e.what()}});
    }
    TraceStep step;
    std::string vid = need_string(j, "var", path, "trace step");
    step.var = var_index_checked(inst, vid, path);
    step.value = value_index_checked(
        inst, step.var, need_string(j, "value", path, "trace step"), path);
    for (const json& pair : need_array(j, "inc", path, "trace step")) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
          !pair[1].is_string()) {
        parse_fail(path, "inc entries must be [event, ratio] pairs",
                   {{"line", line_no}});
      }
      int event = event_index_checked(inst, pair[0].get<std::string>(), path);
      step.inc.emplace_back(event, rat_parse(pair[1].get<std::string>()));
    }
    for (const json& jw : need_array(j, "writes", path, "trace step")) {
      const json& je = need_array(jw, "edge", path, "ledger write");
      if (je.size() != 2 || !je[0].is_string() || !je[1].is_string()) {
        parse_fail(path, "write edge must be a pair of event ids",
                   {{"line", line_no}});
      }
      int u = event_index_checked(inst, je[0].get<std::string>(), path);
      int v = event_index_checked(inst, je[1].get<std::string>(), path);
      int edge = inst.dep.edge_index(u, v);
      if (edge < 0) {
        parse_fail(path, "write names a non-edge",
                   {{"line", line_no},
                    {"events", {inst.events[u].id, inst.events[v].id}}});
      }
      LedgerWrite w;
      w.edge = edge;
      w.node = event_index_checked(
          inst, need_string(jw, "node", path, "ledger write"), path);
      if (w.node != u && w.node != v) {
        parse_fail(path, "write node must be an endpoint of its edge",
                   {{"line", line_no}});
      }
      w.before = rat_parse(need_string(jw, "before", path, "ledger write"));
      w.after = rat_parse(need_string(jw, "after", path, "ledger write"));
      step.writes.push_back(std::move(w));
    }
    const json& checked = need(j, "pstar_checked", path, "trace step");
    if (!checked.is_boolean()) {
      parse_fail(path, "pstar_checked must be boolean", {{"line", line_no}});
    }
    step.pstar_checked = checked.get<bool>();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

void save_round_log(const LllInstance& inst, const RoundLog& log,
                    const std::string& path) {
  std::ostringstream out;
  for (const RoundRecord& r : log.rounds) {
    ordered_json j;
    j["round"] = r.round;
    j["color"] = r.color;
    ordered_json nodes = ordered_json::array();
    for (int n : r.nodes) nodes.push_back(inst.events[n].id);
    j["nodes"] = std::move(nodes);
    ordered_json vars = ordered_json::array();
    for (int x : r.vars) vars.push_back(inst.variables[x].id);
    j["vars"] = std::move(vars);
    j["pstar_ok"] = r.pstar_ok;
    out << j.dump() << "\n";
  }
  ordered_json summary;
  summary["summary"] = {{"rounds", log.rounds.size()},
                        {"palette", log.palette},
                        {"coloring", log.coloring_note}};
  out << summary.dump() << "\n";
  write_file(path, out.str());
}

}  // namespace lll
