#include "lll/prob_engine.hpp"

#include <algorithm>

#include "lll/errors.hpp"

namespace lll {

void PartialAssignment::assign(int var, int value) {
  require(var >= 0 && var < var_count(), ErrorKind::Internal,
          "assign: variable index out of range");
  require(value_[var] < 0, ErrorKind::Internal,
          "assign: variable is already fixed");
  require(value >= 0, ErrorKind::Internal, "assign: negative value index");
  value_[var] = value;
  order_.push_back({var, value});
}

bool operator==(const PartialAssignment& a, const PartialAssignment& b) {
  return a.order() == b.order() && a.var_count() == b.var_count();
}

std::size_t ProbEngine::KeyHash::operator()(
    const std::pair<int, std::vector<int>>& k) const {
  std::size_t h = 0xcbf29ce484222325ULL ^ static_cast<std::size_t>(k.first);
  for (int v : k.second) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Rat ProbEngine::cond_restricted(int event, const std::vector<int>& restriction) {
  auto key = std::make_pair(event, restriction);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  const BadEvent& ev = inst_.events[event];
  // Occurring rows are disjoint, so conditioning on fixed coordinates keeps
  // the matching rows and drops their fixed factors.
  Rat total(0);
  for (const auto& row : ev.occurs) {
    bool match = true;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (restriction[i] >= 0 && restriction[i] != row[i]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    Rat w(1);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (restriction[i] < 0) w *= inst_.variables[ev.vars[i]].probs[row[i]];
    }
    total += w;
  }
  cache_.emplace(std::move(key), total);
  return total;
}

Rat ProbEngine::cond_prob(int event, const PartialAssignment& partial) {
  const BadEvent& ev = inst_.events[event];
  std::vector<int> restriction(ev.vars.size());
  for (std::size_t i = 0; i < ev.vars.size(); ++i) {
    restriction[i] = partial.value(ev.vars[i]);
  }
  return cond_restricted(event, restriction);
}

Rat ProbEngine::inc(int event, const PartialAssignment& partial, int var,
                    int value) {
  const BadEvent& ev = inst_.events[event];
  auto pos = std::find(ev.vars.begin(), ev.vars.end(), var);
  if (pos == ev.vars.end()) {
    fail(ErrorKind::VarDoesNotAffect,
         "variable \"" + inst_.variables[var].id +
             "\" does not affect event \"" + ev.id + "\"",
         {{"variable", inst_.variables[var].id}, {"event", ev.id}});
  }
  require(!partial.assigned(var), ErrorKind::Internal,
          "inc: variable already fixed");

  std::vector<int> restriction(ev.vars.size());
  for (std::size_t i = 0; i < ev.vars.size(); ++i) {
    restriction[i] = partial.value(ev.vars[i]);
  }
  Rat denom = cond_restricted(event, restriction);
  if (sgn(denom) == 0) return Rat(0);  // dead events stay dead
  restriction[pos - ev.vars.begin()] = value;
  Rat numer = cond_restricted(event, restriction);
  return numer / denom;
}

bool ProbEngine::expectation_identity_check(int event,
                                            const PartialAssignment& partial,
                                            int var) {
  require(sgn(cond_prob(event, partial)) > 0, ErrorKind::Internal,
          "expectation identity needs positive conditional probability");
  const Variable& v = inst_.variables[var];
  Rat sum(0);
  for (std::size_t y = 0; y < v.domain.size(); ++y) {
    sum += v.probs[y] * inc(event, partial, var, static_cast<int>(y));
  }
  return sum == 1;
}

}  // namespace lll
