#include "lll/local_sim.hpp"

#include <algorithm>
#include <set>

#include "lll/errors.hpp"

namespace lll {

namespace {

int mex(const std::set<int>& used) {
  int c = 0;
  while (used.count(c)) ++c;
  return c;
}

}  // namespace

Coloring greedy_edge_coloring(const DependencyGraph& graph) {
  Coloring col;
  col.kind = ColoringKind::edge;
  col.color.assign(graph.edges.size(), -1);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto [u, v] = graph.edges[e];
    std::set<int> used;
    for (int node : {u, v}) {
      for (const auto& [nbr, e2] : graph.adj[node]) {
        if (col.color[e2] >= 0) used.insert(col.color[e2]);
      }
    }
    col.color[e] = mex(used);
    col.palette = std::max(col.palette, col.color[e] + 1);
  }
  // Greedy never needs more than (degree of u - 1) + (degree of v - 1) + 1
  // colors for an edge, so the palette stays within 2d - 1.
  require(graph.max_degree == 0 ||
              col.palette <= 2 * graph.max_degree - 1,
          ErrorKind::Internal, "edge coloring exceeded the 2d - 1 bound");
  return col;
}

Coloring greedy_distance2_coloring(const DependencyGraph& graph) {
  Coloring col;
  col.kind = ColoringKind::distance2_vertex;
  col.color.assign(graph.node_count, -1);
  for (int v = 0; v < graph.node_count; ++v) {
    std::set<int> used;
    for (const auto& [n1, e1] : graph.adj[v]) {
      if (col.color[n1] >= 0) used.insert(col.color[n1]);
      for (const auto& [n2, e2] : graph.adj[n1]) {
        if (n2 != v && col.color[n2] >= 0) used.insert(col.color[n2]);
      }
    }
    col.color[v] = mex(used);
    col.palette = std::max(col.palette, col.color[v] + 1);
  }
  // At most d + d(d-1) = d^2 colored vertices within distance 2.
  require(col.palette <= graph.max_degree * graph.max_degree + 1,
          ErrorKind::Internal, "distance-2 coloring exceeded the d^2 + 1 bound");
  return col;
}

bool edge_coloring_proper(const DependencyGraph& graph, const Coloring& col) {
  if (col.kind != ColoringKind::edge ||
      col.color.size() != graph.edges.size()) {
    return false;
  }
  for (int v = 0; v < graph.node_count; ++v) {
    std::set<int> seen;
    for (const auto& [nbr, e] : graph.adj[v]) {
      if (col.color[e] < 0 || !seen.insert(col.color[e]).second) return false;
    }
  }
  return true;
}

bool distance2_coloring_proper(const DependencyGraph& graph,
                               const Coloring& col) {
  if (col.kind != ColoringKind::distance2_vertex ||
      col.color.size() != static_cast<std::size_t>(graph.node_count)) {
    return false;
  }
  for (int v = 0; v < graph.node_count; ++v) {
    if (col.color[v] < 0) return false;
    for (const auto& [n1, e1] : graph.adj[v]) {
      if (col.color[n1] == col.color[v]) return false;
      for (const auto& [n2, e2] : graph.adj[n1]) {
        if (n2 != v && col.color[n2] == col.color[v]) return false;
      }
    }
  }
  return true;
}

namespace {

// Audits the full invariant at a round boundary; the schedule relies on the
// per-step engine checks for anything finer.
void round_audit(FixSession& session, RoundRecord& record) {
  auto v = pstar_violation(session.instance(), session.prob(),
                           session.ledger(), session.partial());
  if (v) {
    fail(ErrorKind::Internal, "round left the invariant broken: " + *v);
  }
  record.pstar_ok = true;
}

ParallelResult finish_parallel(FixSession&& session, RoundLog&& log,
                               std::vector<int>&& induced_order) {
  session.final_checks();
  return ParallelResult{session.partial(), session.trace(), session.ledger(),
                        std::move(log), std::move(induced_order)};
}

}  // namespace

ParallelResult run_parallel_r2(const LllInstance& inst, FixOptions options) {
  const int var_count = static_cast<int>(inst.variables.size());
  std::vector<std::vector<int>> edge_vars(inst.dep.edges.size());
  std::vector<std::vector<int>> node_r1_vars(inst.dep.node_count);
  for (int var = 0; var < var_count; ++var) {
    const auto& evs = inst.hyper.events_of_var[var];
    if (evs.size() == 1) {
      node_r1_vars[evs[0]].push_back(var);
    } else if (evs.size() == 2) {
      int e = inst.dep.edge_index(evs[0], evs[1]);
      require(e >= 0, ErrorKind::Internal, "rank-2 variable without its edge");
      edge_vars[e].push_back(var);
    } else {
      fail(ErrorKind::DomainError,
           "variable \"" + inst.variables[var].id +
               "\" has rank 3; the rank-2 schedule cannot place it",
           {{"variable", inst.variables[var].id}});
    }
  }

  Coloring col = greedy_edge_coloring(inst.dep);
  require(edge_coloring_proper(inst.dep, col), ErrorKind::Internal,
          "edge coloring is not proper");

  // A node's rank-1 variables ride along its first scheduled edge; nodes
  // with no edges at all get a standalone slot in the first round.
  std::vector<int> carrier(inst.dep.node_count, -1);
  for (int v = 0; v < inst.dep.node_count; ++v) {
    for (const auto& [nbr, e] : inst.dep.adj[v]) {
      if (carrier[v] < 0 || col.color[e] < col.color[carrier[v]] ||
          (col.color[e] == col.color[carrier[v]] && e < carrier[v])) {
        carrier[v] = e;
      }
    }
  }

  std::vector<std::vector<int>> edges_by_color(col.palette);
  for (std::size_t e = 0; e < inst.dep.edges.size(); ++e) {
    edges_by_color[col.color[e]].push_back(static_cast<int>(e));
  }

  int rounds = col.palette;
  if (rounds == 0 && var_count > 0) rounds = 1;  // isolated-only instance

  FixSession session(inst, options);
  RoundLog log;
  log.palette = rounds;
  log.coloring_note =
      "greedy edge coloring (centralized stand-in; the distributed coloring "
      "phase is a separate cost, not simulated)";
  std::vector<int> induced_order;

  for (int c = 0; c < rounds; ++c) {
    RoundRecord record;
    record.round = c;
    record.color = c;
    std::set<int> round_events;
    std::set<int> round_nodes;
    auto touch = [&](int node) {
      if (!round_events.insert(node).second) {
        fail(ErrorKind::DisjointnessViolation,
             "event \"" + inst.events[node].id +
                 "\" touched twice in round " + std::to_string(c),
             {{"event", inst.events[node].id}, {"round", c}});
      }
      round_nodes.insert(node);
    };
    auto fix_var = [&](int var) {
      session.fix_step(var);
      record.vars.push_back(var);
      induced_order.push_back(var);
    };

    if (c == 0) {
      for (int v = 0; v < inst.dep.node_count; ++v) {
        if (inst.dep.adj[v].empty() && !node_r1_vars[v].empty()) {
          touch(v);
          for (int var : node_r1_vars[v]) fix_var(var);
        }
      }
    }
    if (c < col.palette) {
      for (int e : edges_by_color[c]) {
        auto [u, v] = inst.dep.edges[e];
        touch(u);
        touch(v);
        for (int node : {u, v}) {
          if (carrier[node] == e) {
            for (int var : node_r1_vars[node]) fix_var(var);
          }
        }
        for (int var : edge_vars[e]) fix_var(var);
      }
    }

    record.nodes.assign(round_nodes.begin(), round_nodes.end());
    round_audit(session, record);
    log.rounds.push_back(std::move(record));
  }

  return finish_parallel(std::move(session), std::move(log),
                         std::move(induced_order));
}

ParallelResult run_parallel_r3(const LllInstance& inst, FixOptions options,
                               const std::vector<int>* node_order) {
  const int var_count = static_cast<int>(inst.variables.size());

  // Each variable is owned by its affected event with the least id; the
  // owner's color decides the variable's round.
  std::vector<std::vector<int>> owned_vars(inst.dep.node_count);
  for (int var = 0; var < var_count; ++var) {
    const auto& evs = inst.hyper.events_of_var[var];
    int owner = evs[0];
    for (int t : evs) {
      if (inst.events[t].id < inst.events[owner].id) owner = t;
    }
    owned_vars[owner].push_back(var);
  }

  Coloring col = greedy_distance2_coloring(inst.dep);
  require(distance2_coloring_proper(inst.dep, col), ErrorKind::Internal,
          "distance-2 coloring is not proper");

  std::vector<int> node_rank(inst.dep.node_count);
  for (int v = 0; v < inst.dep.node_count; ++v) node_rank[v] = v;
  if (node_order != nullptr) {
    require(node_order->size() == static_cast<std::size_t>(inst.dep.node_count),
            ErrorKind::DomainError, "node order must rank every event");
    std::vector<bool> seen(inst.dep.node_count, false);
    for (std::size_t pos = 0; pos < node_order->size(); ++pos) {
      int node = (*node_order)[pos];
      require(node >= 0 && node < inst.dep.node_count && !seen[node],
              ErrorKind::DomainError,
              "node order must be a permutation of the events");
      seen[node] = true;
      node_rank[node] = static_cast<int>(pos);
    }
  }

  std::vector<std::vector<int>> nodes_by_color(col.palette);
  for (int v = 0; v < inst.dep.node_count; ++v) {
    nodes_by_color[col.color[v]].push_back(v);
  }
  for (auto& nodes : nodes_by_color) {
    std::sort(nodes.begin(), nodes.end(),
              [&](int a, int b) { return node_rank[a] < node_rank[b]; });
  }

  FixSession session(inst, options);
  RoundLog log;
  log.palette = col.palette;
  log.coloring_note =
      "greedy distance-2 coloring (centralized stand-in; the distributed "
      "coloring phase is a separate cost, not simulated)";
  std::vector<int> induced_order;

  for (int c = 0; c < col.palette; ++c) {
    RoundRecord record;
    record.round = c;
    record.color = c;
    std::set<int> round_events;
    for (int node : nodes_by_color[c]) {
      if (owned_vars[node].empty()) continue;
      // The node's footprint is every event its variables touch; footprints
      // of same-round nodes must be pairwise disjoint.
      std::set<int> footprint;
      for (int var : owned_vars[node]) {
        for (int t : inst.hyper.events_of_var[var]) footprint.insert(t);
      }
      for (int t : footprint) {
        if (!round_events.insert(t).second) {
          fail(ErrorKind::DisjointnessViolation,
               "event \"" + inst.events[t].id +
                   "\" touched by two nodes in round " + std::to_string(c),
               {{"event", inst.events[t].id}, {"round", c}});
        }
      }
      record.nodes.push_back(node);
      for (int var : owned_vars[node]) {
        session.fix_step(var);
        record.vars.push_back(var);
        induced_order.push_back(var);
      }
    }
    std::sort(record.nodes.begin(), record.nodes.end());
    round_audit(session, record);
    log.rounds.push_back(std::move(record));
  }

  return finish_parallel(std::move(session), std::move(log),
                         std::move(induced_order));
}

}  // namespace lll
