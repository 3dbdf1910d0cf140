// scenario.hpp — measurement scenarios, the simplicial base, and the section calculus.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ctxbundle {

struct Observable {
  std::string name;
  int arity = 2;  // outcomes are 0 .. arity-1; bit j encodes eigenvalue (-1)^j
  std::optional<std::pair<double, double>> layout;  // 2D hint for diagrams
};

/// A maximal face of the base complex: jointly measurable observables,
/// in the order that keys outcome tuples.
struct Context {
  std::string name;
  std::vector<std::string> observables;
};

struct Scenario {
  std::vector<Observable> observables;
  std::vector<Context> contexts;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < observables.size(); ++i)
      if (observables[i].name == name) return static_cast<int>(i);
    return -1;
  }

  const Observable& observable(const std::string& name) const {
    int i = index_of(name);
    if (i < 0) throw std::invalid_argument("unknown observable: " + name);
    return observables[static_cast<std::size_t>(i)];
  }

  const Context* find_context(const std::string& name) const {
    for (const auto& c : contexts)
      if (c.name == name) return &c;
    return nullptr;
  }

  const Context& context(const std::string& name) const {
    const Context* c = find_context(name);
    if (!c) throw std::invalid_argument("unknown context: " + name);
    return *c;
  }
};

/// An outcome function on a subset of observables. The domain is the key set.
struct Section {
  std::map<std::string, int> assignment;

  bool operator==(const Section& other) const { return assignment == other.assignment; }
  bool operator<(const Section& other) const { return assignment < other.assignment; }
};

/// A total outcome function on all observables of a scenario.
struct GlobalAssignment {
  std::map<std::string, int> assignment;

  bool operator==(const GlobalAssignment& other) const { return assignment == other.assignment; }
  bool operator<(const GlobalAssignment& other) const { return assignment < other.assignment; }

  Section as_section() const { return Section{assignment}; }
};

// ---------------------------------------------------------------------------
// Scenario validation

/// Checks every structural invariant; returns one message per violation.
/// An empty report means the scenario is well formed.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> report;

  std::set<std::string> seen;
  for (const auto& o : s.observables) {
    if (!seen.insert(o.name).second)
      report.push_back("duplicate observable id: " + o.name);
    if (o.arity < 2)
      report.push_back("observable " + o.name + " has outcome arity " +
                       std::to_string(o.arity) + " (must be >= 2)");
  }

  std::set<std::string> ctx_names;
  for (const auto& c : s.contexts) {
    if (!ctx_names.insert(c.name).second)
      report.push_back("duplicate context name: " + c.name);
    if (c.observables.empty())
      report.push_back("context " + c.name + " is empty");
    std::set<std::string> in_ctx;
    for (const auto& id : c.observables) {
      if (s.index_of(id) < 0)
        report.push_back("context " + c.name + " references unknown observable " + id);
      if (!in_ctx.insert(id).second)
        report.push_back("context " + c.name + " lists observable " + id + " twice");
    }
  }

  // Contexts must be maximal faces: no context contained in another.
  for (std::size_t i = 0; i < s.contexts.size(); ++i) {
    for (std::size_t j = 0; j < s.contexts.size(); ++j) {
      if (i == j) continue;
      const auto& a = s.contexts[i].observables;
      const auto& b = s.contexts[j].observables;
      bool subset = std::all_of(a.begin(), a.end(), [&](const std::string& id) {
        return std::find(b.begin(), b.end(), id) != b.end();
      });
      if (subset && !(a.size() == b.size() && j < i))
        report.push_back("context " + s.contexts[i].name + " is contained in context " +
                         s.contexts[j].name);
    }
  }

  for (const auto& o : s.observables) {
    bool covered = std::any_of(s.contexts.begin(), s.contexts.end(), [&](const Context& c) {
      return std::find(c.observables.begin(), c.observables.end(), o.name) !=
             c.observables.end();
    });
    if (!covered) report.push_back("uncovered observable: " + o.name);
  }

  return report;
}

inline void ensure_valid(const Scenario& s) {
  auto report = validate_scenario(s);
  if (!report.empty())
    throw std::invalid_argument("invalid scenario: " + report.front());
}

// ---------------------------------------------------------------------------
// Faces of the base complex

/// A face is a set of observable ids, kept in scenario declaration order.
using Face = std::vector<std::string>;

/// Downward closure of the maximal contexts: every nonempty subset of every
/// context, each face listed once. Ordered by dimension, then by vertex indices.
inline std::vector<Face> faces(const Scenario& s) {
  ensure_valid(s);

  std::set<std::vector<int>> closed;
  for (const auto& c : s.contexts) {
    std::vector<int> idx;
    idx.reserve(c.observables.size());
    for (const auto& id : c.observables) idx.push_back(s.index_of(id));
    std::sort(idx.begin(), idx.end());
    const std::size_t m = idx.size();
    for (std::size_t bits = 1; bits < (std::size_t{1} << m); ++bits) {
      std::vector<int> sub;
      for (std::size_t k = 0; k < m; ++k)
        if (bits & (std::size_t{1} << k)) sub.push_back(idx[k]);
      closed.insert(std::move(sub));
    }
  }

  std::vector<std::vector<int>> ordered(closed.begin(), closed.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  std::vector<Face> result;
  result.reserve(ordered.size());
  for (const auto& idx : ordered) {
    Face f;
    f.reserve(idx.size());
    for (int i : idx) f.push_back(s.observables[static_cast<std::size_t>(i)].name);
    result.push_back(std::move(f));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Restriction and gluing (the presheaf structure)

/// Restriction of a section to a subset of its domain.
inline Section restrict_to(const Section& sec, const std::set<std::string>& domain) {
  Section out;
  for (const auto& id : domain) {
    auto it = sec.assignment.find(id);
    if (it == sec.assignment.end())
      throw std::invalid_argument("restriction target is not a subset of the domain: " + id);
    out.assignment.emplace(id, it->second);
  }
  return out;
}

inline Section restrict_to(const GlobalAssignment& g, const std::set<std::string>& domain) {
  return restrict_to(Section{g.assignment}, domain);
}

/// Two sections clash on an observable they both cover.
struct GlueConflict {
  std::string observable;
  int left;
  int right;
};

using GlueResult = std::variant<Section, GlueConflict>;

/// Glues pairwise compatible sections into the unique section on the union of
/// their domains; on a clash, reports the first conflicting observable with
/// both values.
inline GlueResult glue(const std::vector<Section>& sections) {
  Section merged;
  for (const auto& sec : sections) {
    for (const auto& [id, value] : sec.assignment) {
      auto it = merged.assignment.find(id);
      if (it == merged.assignment.end()) {
        merged.assignment.emplace(id, value);
      } else if (it->second != value) {
        return GlueConflict{id, it->second, value};
      }
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Enumeration of sections over a subset

/// All |O|^|U| sections over the given observables, in lexicographic outcome
/// order under the scenario's declaration ordering (first observable most
/// significant).
inline std::vector<Section> sections_over(const Scenario& s,
                                          const std::vector<std::string>& subset) {
  if (subset.empty()) throw std::invalid_argument("sections_over: empty observable set");

  std::vector<int> idx;
  idx.reserve(subset.size());
  for (const auto& id : subset) {
    int i = s.index_of(id);
    if (i < 0) throw std::invalid_argument("sections_over: unknown observable " + id);
    idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  std::size_t total = 1;
  for (int i : idx) {
    int a = s.observables[static_cast<std::size_t>(i)].arity;
    if (total > (std::size_t{1} << 24) / static_cast<std::size_t>(a))
      throw std::invalid_argument("sections_over: enumeration larger than 2^24");
    total *= static_cast<std::size_t>(a);
  }

  std::vector<Section> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Section sec;
    std::size_t rem = code;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
      const auto& obs = s.observables[static_cast<std::size_t>(*it)];
      sec.assignment[obs.name] = static_cast<int>(rem % static_cast<std::size_t>(obs.arity));
      rem /= static_cast<std::size_t>(obs.arity);
    }
    out.push_back(std::move(sec));
  }
  return out;
}

}  // namespace ctxbundle
