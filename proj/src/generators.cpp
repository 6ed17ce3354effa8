#include "lll/generators.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "lll/errors.hpp"
#include "lll/rng.hpp"

namespace lll {

namespace {

std::string orientation_label(int value) {
  // Digit j is the head position chosen by orientation j.
  std::string s(3, '0');
  s[0] = static_cast<char>('0' + value % 3);
  s[1] = static_cast<char>('0' + value / 3 % 3);
  s[2] = static_cast<char>('0' + value / 9 % 3);
  return s;
}

}  // namespace

Rat orientation_event_prob(int delta) {
  require(delta >= 1, ErrorKind::DomainError, "delta must be positive");
  Int p3 = 1;
  for (int i = 0; i < delta; ++i) p3 *= 3;
  Rat q = Rat(1) / Rat(p3);
  return 3 * q * q * (1 - q) + q * q * q;
}

LllInstance gen_hypergraph_orientation(
    int node_count, const std::vector<std::array<int, 3>>& hyperedges,
    std::uint64_t /*seed: the orientations themselves are the randomness*/) {
  require(node_count >= 1, ErrorKind::DomainError, "need at least one node");
  std::vector<std::vector<int>> edges_of_node(node_count);
  for (std::size_t h = 0; h < hyperedges.size(); ++h) {
    const auto& e = hyperedges[h];
    require(e[0] != e[1] && e[0] != e[2] && e[1] != e[2],
            ErrorKind::DomainError, "hyperedge nodes must be distinct");
    for (int v : e) {
      require(v >= 0 && v < node_count, ErrorKind::DomainError,
              "hyperedge node out of range");
      edges_of_node[v].push_back(static_cast<int>(h));
    }
  }
  for (int v = 0; v < node_count; ++v) {
    require(!edges_of_node[v].empty(), ErrorKind::DomainError,
            "every node needs at least one hyperedge");
  }

  std::vector<VariableSpec> vars;
  for (std::size_t h = 0; h < hyperedges.size(); ++h) {
    VariableSpec vs;
    vs.id = "h" + std::to_string(h);
    for (int k = 0; k < 27; ++k) {
      vs.domain.push_back(orientation_label(k));
      vs.probs.push_back("1/27");
    }
    vars.push_back(std::move(vs));
  }

  std::vector<EventSpec> events;
  for (int v = 0; v < node_count; ++v) {
    const auto& mine = edges_of_node[v];
    EventSpec es;
    es.id = "n" + std::to_string(v);
    std::vector<int> pos;  // v's slot inside each of its hyperedges
    for (int h : mine) {
      es.vars.push_back("h" + std::to_string(h));
      const auto& e = hyperedges[h];
      pos.push_back(e[0] == v ? 0 : (e[1] == v ? 1 : 2));
    }
    // Enumerate all joint orientation choices of v's hyperedges; v goes bad
    // when it is the head of every one of them in at least 2 orientations.
    std::size_t total = 1;
    for (std::size_t i = 0; i < mine.size(); ++i) total *= 27;
    std::vector<int> tuple(mine.size());
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t i = 0; i < mine.size(); ++i) {
        tuple[i] = static_cast<int>(rest % 27);
        rest /= 27;
      }
      int sink_orientations = 0;
      for (int j = 0; j < 3; ++j) {
        int pow3 = j == 0 ? 1 : (j == 1 ? 3 : 9);
        bool sink = true;
        for (std::size_t i = 0; i < mine.size(); ++i) {
          if (tuple[i] / pow3 % 3 != pos[i]) {
            sink = false;
            break;
          }
        }
        if (sink) ++sink_orientations;
      }
      if (sink_orientations >= 2) {
        std::vector<std::string> row;
        for (std::size_t i = 0; i < mine.size(); ++i) {
          row.push_back(orientation_label(tuple[i]));
        }
        es.occurs.push_back(std::move(row));
      }
    }
    events.push_back(std::move(es));
  }

  return build(vars, events, 3);
}

std::vector<std::array<int, 3>> cyclic_triple_system(int node_count) {
  require(node_count >= 7, ErrorKind::DomainError,
          "the ring family needs at least 7 nodes");
  std::vector<std::array<int, 3>> edges;
  for (int i = 0; i < node_count; ++i) {
    edges.push_back({i, (i + 1) % node_count, (i + 3) % node_count});
  }
  return edges;
}

std::vector<std::array<int, 3>> cyclic_triple_system_dense(int node_count) {
  require(node_count >= 9, ErrorKind::DomainError,
          "the dense ring family needs at least 9 nodes");
  auto edges = cyclic_triple_system(node_count);
  edges.push_back({0, 2, 4});
  return edges;
}

Rat weak_splitting_event_prob(int colors, int v_degree) {
  require(colors >= 2 && v_degree >= 1, ErrorKind::DomainError,
          "need colors >= 2 and degree >= 1");
  Rat p(colors);
  Rat div(1);
  for (int i = 0; i < v_degree; ++i) div *= colors;
  return p / div;  // colors^(1 - degree)
}

LllInstance gen_weak_splitting_relaxed(int v_count, int u_count, int v_degree,
                                       int colors, int coverage,
                                       std::uint64_t seed) {
  require(v_count >= 1 && u_count >= 1, ErrorKind::DomainError,
          "need nodes on both sides");
  require(v_degree >= 1 && v_degree <= 3, ErrorKind::DomainError,
          "left degree must be 1..3 (right capacity is 3)");
  require(v_degree <= u_count, ErrorKind::DomainError,
          "left degree exceeds the number of right nodes");
  require(colors >= 2, ErrorKind::DomainError, "need at least 2 colors");
  require(coverage >= 1 && coverage <= v_degree, ErrorKind::DomainError,
          "coverage must be between 1 and the left degree");
  if (3 * u_count < v_degree * v_count) {
    fail(ErrorKind::UsageError,
         "right-side capacity of 3 per node cannot host the left demand",
         {{"u_count", u_count}, {"v_count", v_count}, {"v_degree", v_degree}});
  }

  Rng rng(seed);
  std::vector<int> load(u_count, 0);
  std::vector<std::vector<int>> neighbors(v_count);
  for (int i = 0; i < v_count; ++i) {
    // Least-loaded first (random among ties) keeps the loads within one of
    // each other, so a feasible demand never strands a left node.
    std::vector<int> candidates;
    for (int j = 0; j < u_count; ++j) {
      if (load[j] < 3) candidates.push_back(j);
    }
    if (static_cast<int>(candidates.size()) < v_degree) {
      fail(ErrorKind::UsageError,
           "random bipartite layout ran out of right-node capacity",
           {{"left_node", i}});
    }
    for (int k = 0; k < v_degree; ++k) {
      int min_load = load[candidates[0]];
      for (int j : candidates) min_load = std::min(min_load, load[j]);
      std::vector<std::size_t> pool;
      for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        if (load[candidates[idx]] == min_load) pool.push_back(idx);
      }
      std::size_t pick = pool[rng.below(pool.size())];
      int j = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<long>(pick));
      neighbors[i].push_back(j);
      ++load[j];
    }
    std::sort(neighbors[i].begin(), neighbors[i].end());
  }

  std::vector<VariableSpec> vars;
  std::vector<bool> used(u_count, false);
  for (const auto& ns : neighbors) {
    for (int j : ns) used[j] = true;
  }
  for (int j = 0; j < u_count; ++j) {
    if (!used[j]) continue;  // a never-queried color variable would be inert
    VariableSpec vs;
    vs.id = "u" + std::to_string(j);
    for (int cidx = 0; cidx < colors; ++cidx) {
      vs.domain.push_back(std::to_string(cidx));
      vs.probs.push_back("1/" + std::to_string(colors));
    }
    vars.push_back(std::move(vs));
  }

  std::vector<EventSpec> events;
  for (int i = 0; i < v_count; ++i) {
    EventSpec es;
    es.id = "v" + std::to_string(i);
    for (int j : neighbors[i]) es.vars.push_back("u" + std::to_string(j));
    // Bad when the node sees fewer than `coverage` distinct colors.
    std::size_t total = 1;
    for (int k = 0; k < v_degree; ++k) total *= static_cast<std::size_t>(colors);
    std::vector<int> tuple(v_degree);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (int k = 0; k < v_degree; ++k) {
        tuple[k] = static_cast<int>(rest % colors);
        rest /= colors;
      }
      std::set<int> distinct(tuple.begin(), tuple.end());
      if (static_cast<int>(distinct.size()) < coverage) {
        std::vector<std::string> row;
        for (int k = 0; k < v_degree; ++k) row.push_back(std::to_string(tuple[k]));
        es.occurs.push_back(std::move(row));
      }
    }
    events.push_back(std::move(es));
  }

  return build(vars, events, 3);
}

namespace {

struct RandomTableParams {
  int domain_size;
  int include_percent;
};

// Shared scaffolding of the random families: given each event's variable
// list, draw value distributions and truth tables, then prune tables
// greedily (heaviest rows first) until the crit criterion holds for the
// realized dependency degree.
LllInstance finish_random_instance(int n_events,
                                   std::vector<std::vector<int>>& vars_of_event,
                                   std::vector<std::vector<int>>& events_of_var,
                                   RandomTableParams params, Rng& rng) {
  const int var_count = static_cast<int>(events_of_var.size());

  // Realized dependency degree.
  std::vector<std::set<int>> adj(n_events);
  for (const auto& evs : events_of_var) {
    for (std::size_t i = 0; i < evs.size(); ++i) {
      for (std::size_t j = i + 1; j < evs.size(); ++j) {
        adj[evs[i]].insert(evs[j]);
        adj[evs[j]].insert(evs[i]);
      }
    }
  }
  int d = 0;
  for (const auto& s : adj) d = std::max(d, static_cast<int>(s.size()));
  Rat bound = pow2_inv(static_cast<unsigned>(d));

  std::vector<VariableSpec> var_specs(var_count);
  std::vector<std::vector<Rat>> var_probs(var_count);
  for (int x = 0; x < var_count; ++x) {
    var_specs[x].id = "x" + std::to_string(x);
    std::vector<Int> weights;
    Int total = 0;
    for (int y = 0; y < params.domain_size; ++y) {
      var_specs[x].domain.push_back(std::to_string(y));
      weights.push_back(Int(1 + static_cast<long>(rng.below(7))));
      total += weights.back();
    }
    for (int y = 0; y < params.domain_size; ++y) {
      Rat p = Rat(weights[y]) / Rat(total);
      var_specs[x].probs.push_back(rat_str(p));
      var_probs[x].push_back(std::move(p));
    }
  }

  std::vector<EventSpec> event_specs(n_events);
  for (int t = 0; t < n_events; ++t) {
    EventSpec& es = event_specs[t];
    es.id = "e" + std::to_string(t);
    for (int x : vars_of_event[t]) es.vars.push_back(var_specs[x].id);

    std::size_t total = 1;
    for (std::size_t i = 0; i < vars_of_event[t].size(); ++i) {
      total *= static_cast<std::size_t>(params.domain_size);
    }
    std::vector<std::vector<int>> rows;
    std::vector<Rat> row_weight;
    std::vector<int> tuple(vars_of_event[t].size());
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        tuple[i] = static_cast<int>(rest % params.domain_size);
        rest /= params.domain_size;
      }
      if (rng.below(100) >= static_cast<std::uint64_t>(params.include_percent)) {
        continue;
      }
      Rat w(1);
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        w *= var_probs[vars_of_event[t][i]][tuple[i]];
      }
      rows.push_back(tuple);
      row_weight.push_back(std::move(w));
    }

    Rat p(0);
    for (const Rat& w : row_weight) p += w;
    // Prune heaviest-first until the criterion holds; empty tables (an
    // impossible event) are fine.
    while (p >= bound && !rows.empty()) {
      std::size_t heaviest = 0;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        if (row_weight[r] > row_weight[heaviest]) heaviest = r;
      }
      p -= row_weight[heaviest];
      rows.erase(rows.begin() + static_cast<long>(heaviest));
      row_weight.erase(row_weight.begin() + static_cast<long>(heaviest));
    }

    for (const auto& row : rows) {
      std::vector<std::string> srow;
      for (std::size_t i = 0; i < row.size(); ++i) {
        srow.push_back(std::to_string(row[i]));
      }
      es.occurs.push_back(std::move(srow));
    }
  }

  return build(var_specs, event_specs, 3);
}

}  // namespace

LllInstance gen_random_rank3(int n_events, int d_max, int domain_size,
                             std::uint64_t seed) {
  require(n_events >= 1, ErrorKind::DomainError, "need at least one event");
  require(d_max >= 0, ErrorKind::DomainError, "d_max must be nonnegative");
  require(domain_size >= 2 && domain_size <= 8, ErrorKind::DomainError,
          "domain size must be 2..8");

  Rng rng(seed);
  std::vector<std::set<int>> adj(n_events);
  std::vector<std::vector<int>> vars_of_event(n_events);
  std::vector<std::vector<int>> events_of_var;

  auto try_add = [&](const std::vector<int>& evs) {
    // Accept only if every touched event keeps its dependency degree <= d_max.
    for (std::size_t i = 0; i < evs.size(); ++i) {
      std::set<int> grown = adj[evs[i]];
      for (std::size_t j = 0; j < evs.size(); ++j) {
        if (i != j) grown.insert(evs[j]);
      }
      if (static_cast<int>(grown.size()) > d_max) return false;
    }
    int var = static_cast<int>(events_of_var.size());
    events_of_var.push_back(evs);
    for (std::size_t i = 0; i < evs.size(); ++i) {
      vars_of_event[evs[i]].push_back(var);
      for (std::size_t j = i + 1; j < evs.size(); ++j) {
        adj[evs[i]].insert(evs[j]);
        adj[evs[j]].insert(evs[i]);
      }
    }
    return true;
  };

  int target = n_events + n_events / 2 + 2;
  int attempts = 40 * target;
  while (static_cast<int>(events_of_var.size()) < target && attempts-- > 0) {
    std::uint64_t roll = rng.below(100);
    int rank = roll < 15 ? 1 : (roll < 50 ? 2 : 3);
    rank = std::min(rank, n_events);
    std::set<int> picked;
    while (static_cast<int>(picked.size()) < rank) {
      picked.insert(static_cast<int>(rng.below(n_events)));
    }
    try_add(std::vector<int>(picked.begin(), picked.end()));
  }
  for (int t = 0; t < n_events; ++t) {
    if (vars_of_event[t].empty()) {
      bool ok = try_add({t});
      require(ok, ErrorKind::Internal, "rank-1 coverage can never be refused");
    }
  }

  return finish_random_instance(n_events, vars_of_event, events_of_var,
                                {domain_size, 35}, rng);
}

LllInstance gen_random_rank2(int n_events, int d_max, int domain_size,
                             std::uint64_t seed) {
  require(n_events >= 2, ErrorKind::DomainError,
          "a pure rank-2 instance needs at least two events");
  require(domain_size >= 2 && domain_size <= 8, ErrorKind::DomainError,
          "domain size must be 2..8");
  int ring_degree = n_events >= 3 ? 2 : 1;
  require(d_max >= ring_degree, ErrorKind::DomainError,
          "d_max too small for the covering ring");

  Rng rng(seed);
  std::vector<std::set<int>> adj(n_events);
  std::vector<std::vector<int>> vars_of_event(n_events);
  std::vector<std::vector<int>> events_of_var;

  auto add = [&](int a, int b) {
    int var = static_cast<int>(events_of_var.size());
    events_of_var.push_back({std::min(a, b), std::max(a, b)});
    vars_of_event[a].push_back(var);
    vars_of_event[b].push_back(var);
    adj[a].insert(b);
    adj[b].insert(a);
  };

  // Deterministic covering ring, then random extra edges under the cap.
  if (n_events == 2) {
    add(0, 1);
  } else {
    for (int t = 0; t < n_events; ++t) add(t, (t + 1) % n_events);
  }
  int target = n_events / 2 + 1;
  int attempts = 40 * target;
  while (target > 0 && attempts-- > 0) {
    int a = static_cast<int>(rng.below(n_events));
    int b = static_cast<int>(rng.below(n_events));
    if (a == b) continue;
    std::set<int> ga = adj[a], gb = adj[b];
    ga.insert(b);
    gb.insert(a);
    if (static_cast<int>(ga.size()) > d_max ||
        static_cast<int>(gb.size()) > d_max) {
      continue;
    }
    add(a, b);
    --target;
  }

  return finish_random_instance(n_events, vars_of_event, events_of_var,
                                {domain_size, 35}, rng);
}

}  // namespace lll
