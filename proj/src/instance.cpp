#include "lll/instance.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lll/errors.hpp"

namespace lll {

int DependencyGraph::edge_index(int u, int v) const {
  for (const auto& [nbr, e] : adj[u]) {
    if (nbr == v) return e;
  }
  return -1;
}

int LllInstance::var_index(const std::string& id) const {
  auto it = var_by_id.find(id);
  return it == var_by_id.end() ? -1 : it->second;
}

int LllInstance::event_index(const std::string& id) const {
  auto it = event_by_id.find(id);
  return it == event_by_id.end() ? -1 : it->second;
}

namespace {

// Exact Pr[event] from the truth table: occurring rows are disjoint atoms,
// so the probability is the sum of their product weights.
Rat table_probability(const LllInstance& inst, const BadEvent& ev) {
  Rat total(0);
  for (const auto& row : ev.occurs) {
    Rat w(1);
    for (std::size_t i = 0; i < row.size(); ++i) {
      w *= inst.variables[ev.vars[i]].probs[row[i]];
    }
    total += w;
  }
  return total;
}

}  // namespace

LllInstance build(const std::vector<VariableSpec>& var_specs,
                  const std::vector<EventSpec>& event_specs, int rank_cap) {
  require(rank_cap >= 1 && rank_cap <= 3, ErrorKind::DomainError,
          "rank_cap must be 1, 2 or 3");

  LllInstance inst;
  inst.rank_cap = rank_cap;

  for (const auto& vs : var_specs) {
    if (inst.var_by_id.count(vs.id)) {
      fail(ErrorKind::MalformedTable, "duplicate variable id \"" + vs.id + "\"",
           {{"variable", vs.id}});
    }
    if (vs.domain.empty()) {
      fail(ErrorKind::MalformedTable,
           "variable \"" + vs.id + "\" has an empty domain",
           {{"variable", vs.id}});
    }
    if (vs.probs.size() != vs.domain.size()) {
      fail(ErrorKind::MalformedTable,
           "variable \"" + vs.id + "\" has " + std::to_string(vs.probs.size()) +
               " probabilities for " + std::to_string(vs.domain.size()) +
               " domain values",
           {{"variable", vs.id}});
    }
    std::set<std::string> labels(vs.domain.begin(), vs.domain.end());
    if (labels.size() != vs.domain.size()) {
      fail(ErrorKind::MalformedTable,
           "variable \"" + vs.id + "\" has duplicate domain values",
           {{"variable", vs.id}});
    }
    Variable v;
    v.id = vs.id;
    v.domain = vs.domain;
    Rat sum(0);
    for (const auto& ps : vs.probs) {
      Rat p = rat_parse(ps);
      // A value with zero probability can never be drawn; it does not belong
      // in the domain, and allowing it would break the increase-ratio
      // identities downstream.
      if (sgn(p) <= 0) {
        fail(ErrorKind::MalformedTable,
             "variable \"" + vs.id + "\" has a nonpositive probability " + ps,
             {{"variable", vs.id}, {"prob", ps}});
      }
      sum += p;
      v.probs.push_back(std::move(p));
    }
    if (sum != 1) {
      fail(ErrorKind::MalformedTable,
           "variable \"" + vs.id + "\" probabilities sum to " + rat_str(sum) +
               ", expected 1",
           {{"variable", vs.id}, {"sum", rat_str(sum)}});
    }
    inst.var_by_id[v.id] = static_cast<int>(inst.variables.size());
    inst.variables.push_back(std::move(v));
  }

  for (const auto& es : event_specs) {
    if (inst.event_by_id.count(es.id)) {
      fail(ErrorKind::MalformedTable, "duplicate event id \"" + es.id + "\"",
           {{"event", es.id}});
    }
    BadEvent ev;
    ev.id = es.id;
    std::set<int> seen_vars;
    for (const auto& vid : es.vars) {
      int vi = inst.var_index(vid);
      if (vi < 0) {
        fail(ErrorKind::MalformedTable,
             "event \"" + es.id + "\" references unknown variable \"" + vid + "\"",
             {{"event", es.id}, {"variable", vid}});
      }
      if (!seen_vars.insert(vi).second) {
        fail(ErrorKind::MalformedTable,
             "event \"" + es.id + "\" lists variable \"" + vid + "\" twice",
             {{"event", es.id}, {"variable", vid}});
      }
      ev.vars.push_back(vi);
    }
    for (const auto& row_labels : es.occurs) {
      if (row_labels.size() != ev.vars.size()) {
        fail(ErrorKind::MalformedTable,
             "event \"" + es.id + "\" has a table row of arity " +
                 std::to_string(row_labels.size()) + ", expected " +
                 std::to_string(ev.vars.size()),
             {{"event", es.id}});
      }
      std::vector<int> row;
      for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const Variable& v = inst.variables[ev.vars[i]];
        auto it = std::find(v.domain.begin(), v.domain.end(), row_labels[i]);
        if (it == v.domain.end()) {
          fail(ErrorKind::MalformedTable,
               "event \"" + es.id + "\": value \"" + row_labels[i] +
                   "\" is not in the domain of variable \"" + v.id + "\"",
               {{"event", es.id}, {"variable", v.id}, {"value", row_labels[i]}});
        }
        row.push_back(static_cast<int>(it - v.domain.begin()));
      }
      ev.occurs.push_back(std::move(row));
    }
    std::sort(ev.occurs.begin(), ev.occurs.end());
    if (std::adjacent_find(ev.occurs.begin(), ev.occurs.end()) != ev.occurs.end()) {
      fail(ErrorKind::MalformedTable,
           "event \"" + es.id + "\" has duplicate table rows", {{"event", es.id}});
    }
    inst.event_by_id[ev.id] = static_cast<int>(inst.events.size());
    inst.events.push_back(std::move(ev));
  }

  // Variable hyperedges, rank discipline.
  inst.hyper.events_of_var.assign(inst.variables.size(), {});
  for (std::size_t t = 0; t < inst.events.size(); ++t) {
    for (int vi : inst.events[t].vars) {
      inst.hyper.events_of_var[vi].push_back(static_cast<int>(t));
    }
  }
  for (std::size_t vi = 0; vi < inst.variables.size(); ++vi) {
    auto& evs = inst.hyper.events_of_var[vi];
    std::sort(evs.begin(), evs.end());
    if (evs.empty()) {
      fail(ErrorKind::MalformedTable,
           "variable \"" + inst.variables[vi].id + "\" affects no event",
           {{"variable", inst.variables[vi].id}});
    }
    if (static_cast<int>(evs.size()) > rank_cap) {
      fail(ErrorKind::RankExceeded,
           "variable \"" + inst.variables[vi].id + "\" affects " +
               std::to_string(evs.size()) + " events, cap is " +
               std::to_string(rank_cap),
           {{"variable", inst.variables[vi].id},
            {"rank", evs.size()},
            {"rank_cap", rank_cap}});
    }
  }

  // Dependency graph: events adjacent when they share a variable.
  inst.dep.node_count = static_cast<int>(inst.events.size());
  inst.dep.adj.assign(inst.events.size(), {});
  std::set<std::pair<int, int>> edge_set;
  for (const auto& evs : inst.hyper.events_of_var) {
    for (std::size_t i = 0; i < evs.size(); ++i) {
      for (std::size_t j = i + 1; j < evs.size(); ++j) {
        edge_set.insert({evs[i], evs[j]});
      }
    }
  }
  inst.dep.edges.assign(edge_set.begin(), edge_set.end());
  for (std::size_t e = 0; e < inst.dep.edges.size(); ++e) {
    auto [u, v] = inst.dep.edges[e];
    inst.dep.adj[u].push_back({v, static_cast<int>(e)});
    inst.dep.adj[v].push_back({u, static_cast<int>(e)});
  }
  for (const auto& nbrs : inst.dep.adj) {
    inst.dep.max_degree =
        std::max(inst.dep.max_degree, static_cast<int>(nbrs.size()));
  }

  // The exponential criterion, exactly: Pr[event] < 2^-d for every event.
  int d = inst.dep.max_degree;
  Rat bound = pow2_inv(static_cast<unsigned>(d));
  for (std::size_t t = 0; t < inst.events.size(); ++t) {
    Rat p = table_probability(inst, inst.events[t]);
    if (p >= bound) {
      fail(ErrorKind::CriterionViolated,
           "event \"" + inst.events[t].id + "\" has probability " + rat_str(p) +
               " >= 2^-" + std::to_string(d),
           {{"event", inst.events[t].id},
            {"prob", rat_str(p)},
            {"d", d},
            {"bound", rat_str(bound)}});
    }
    inst.event_prob.push_back(std::move(p));
  }

  return inst;
}

int dependency_degree(const LllInstance& inst) { return inst.dep.max_degree; }

bool event_occurs_on(const LllInstance& inst, int event,
                     const std::vector<int>& values) {
  const BadEvent& ev = inst.events[event];
  std::vector<int> row;
  row.reserve(ev.vars.size());
  for (int vi : ev.vars) {
    require(values[vi] >= 0, ErrorKind::Internal,
            "event_occurs_on requires a fully assigned scope");
    row.push_back(values[vi]);
  }
  return std::binary_search(ev.occurs.begin(), ev.occurs.end(), row);
}

namespace {

std::vector<std::string> spec_probs(const Variable& v) {
  std::vector<std::string> out;
  out.reserve(v.probs.size());
  for (const auto& p : v.probs) out.push_back(rat_str(p));
  return out;
}

}  // namespace

LllInstance merge_shared_variables(const LllInstance& inst) {
  // Group variables by hyperedge; groups of two or more merge.
  std::map<std::vector<int>, std::vector<int>> groups;
  for (std::size_t vi = 0; vi < inst.variables.size(); ++vi) {
    groups[inst.hyper.events_of_var[vi]].push_back(static_cast<int>(vi));
  }

  std::vector<int> group_of(inst.variables.size(), -1);  // -1: kept as is
  std::vector<std::vector<int>> merged_members;
  for (auto& [edge, members] : groups) {
    if (members.size() < 2) continue;
    for (int vi : members) group_of[vi] = static_cast<int>(merged_members.size());
    merged_members.push_back(members);  // already ascending
  }

  std::set<std::string> taken;
  for (const auto& v : inst.variables) taken.insert(v.id);

  // New variable list: untouched variables keep their relative order; each
  // merged group appears at its first member's position.
  std::vector<VariableSpec> var_specs;
  std::vector<std::string> merged_id(merged_members.size());
  for (std::size_t vi = 0; vi < inst.variables.size(); ++vi) {
    int g = group_of[vi];
    if (g < 0) {
      const Variable& v = inst.variables[vi];
      var_specs.push_back({v.id, v.domain, spec_probs(v)});
      continue;
    }
    if (static_cast<int>(vi) != merged_members[g][0]) continue;  // emitted earlier

    const auto& members = merged_members[g];
    std::string id = inst.variables[members[0]].id;
    for (std::size_t m = 1; m < members.size(); ++m) {
      id += "+" + inst.variables[members[m]].id;
    }
    while (taken.count(id)) id += "'";
    taken.insert(id);
    merged_id[g] = id;

    // Product domain, first member varying slowest.
    std::vector<std::string> domain{""};
    std::vector<Rat> probs{Rat(1)};
    for (std::size_t m = 0; m < members.size(); ++m) {
      const Variable& v = inst.variables[members[m]];
      std::vector<std::string> next_domain;
      std::vector<Rat> next_probs;
      for (std::size_t i = 0; i < domain.size(); ++i) {
        for (std::size_t k = 0; k < v.domain.size(); ++k) {
          next_domain.push_back(m == 0 ? v.domain[k]
                                       : domain[i] + "|" + v.domain[k]);
          next_probs.push_back(probs[i] * v.probs[k]);
        }
      }
      domain = std::move(next_domain);
      probs = std::move(next_probs);
    }
    VariableSpec spec;
    spec.id = id;
    spec.domain = std::move(domain);
    for (const auto& p : probs) spec.probs.push_back(rat_str(p));
    var_specs.push_back(std::move(spec));
  }

  // Rewrite events: group members collapse into one column at the first
  // member's position; rows recombine their values into the joint label.
  std::vector<EventSpec> event_specs;
  for (const auto& ev : inst.events) {
    EventSpec es;
    es.id = ev.id;
    std::vector<int> kept_cols;           // original column -> kept?
    std::vector<int> merged_col_group;    // per kept column: group or -1
    std::set<int> groups_done;
    for (std::size_t c = 0; c < ev.vars.size(); ++c) {
      int g = group_of[ev.vars[c]];
      if (g < 0) {
        es.vars.push_back(inst.variables[ev.vars[c]].id);
        kept_cols.push_back(static_cast<int>(c));
        merged_col_group.push_back(-1);
      } else if (!groups_done.count(g)) {
        groups_done.insert(g);
        es.vars.push_back(merged_id[g]);
        kept_cols.push_back(static_cast<int>(c));
        merged_col_group.push_back(g);
      }
    }
    // Column position of every variable in the original table.
    std::vector<int> col_of_var(inst.variables.size(), -1);
    for (std::size_t c = 0; c < ev.vars.size(); ++c) {
      col_of_var[ev.vars[c]] = static_cast<int>(c);
    }
    for (const auto& row : ev.occurs) {
      std::vector<std::string> out_row;
      for (std::size_t k = 0; k < kept_cols.size(); ++k) {
        int c = kept_cols[k];
        int g = merged_col_group[k];
        if (g < 0) {
          const Variable& v = inst.variables[ev.vars[c]];
          out_row.push_back(v.domain[row[c]]);
        } else {
          std::string label;
          for (std::size_t m = 0; m < merged_members[g].size(); ++m) {
            int member = merged_members[g][m];
            int mc = col_of_var[member];
            require(mc >= 0, ErrorKind::Internal,
                    "merge group member missing from event scope");
            const Variable& v = inst.variables[member];
            label += (m == 0 ? "" : "|") + v.domain[row[mc]];
          }
          out_row.push_back(std::move(label));
        }
      }
      es.occurs.push_back(std::move(out_row));
    }
    event_specs.push_back(std::move(es));
  }

  return build(var_specs, event_specs, inst.rank_cap);
}

bool same_instance(const LllInstance& a, const LllInstance& b) {
  if (a.rank_cap != b.rank_cap) return false;
  if (a.variables.size() != b.variables.size()) return false;
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const Variable& x = a.variables[i];
    const Variable& y = b.variables[i];
    if (x.id != y.id || x.domain != y.domain || x.probs != y.probs) return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const BadEvent& x = a.events[i];
    const BadEvent& y = b.events[i];
    if (x.id != y.id || x.vars != y.vars || x.occurs != y.occurs) return false;
  }
  return true;
}

}  // namespace lll
