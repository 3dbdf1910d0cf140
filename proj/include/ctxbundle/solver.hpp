// solver.hpp — extendability search, the brute-force oracle, GF(2) parity
// obstructions, and the three-level contextuality classification.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxbundle/empirical_model.hpp"
#include "ctxbundle/scenario.hpp"

namespace ctxbundle {

// ---------------------------------------------------------------------------
// Global sections

/// True iff the assignment restricts into every context's support.
inline bool is_global_section(const SupportModel& sm, const GlobalAssignment& g) {
  for (const auto& [name, value] : g.assignment) {
    int i = sm.scenario.index_of(name);
    if (i < 0) throw std::invalid_argument("assignment names unknown observable " + name);
    if (value < 0 || value >= sm.scenario.observables[static_cast<std::size_t>(i)].arity)
      throw std::invalid_argument("assignment value out of range for " + name);
  }
  for (const auto& o : sm.scenario.observables)
    if (!g.assignment.count(o.name))
      throw std::invalid_argument("assignment is not total: missing " + o.name);

  for (const auto& ctx : sm.scenario.contexts) {
    OutcomeTuple t;
    t.reserve(ctx.observables.size());
    for (const auto& id : ctx.observables) t.push_back(g.assignment.at(id));
    if (!sm.support.at(ctx.name).count(t)) return false;
  }
  return true;
}

/// Brute-force oracle: every assignment in the product space that passes
/// is_global_section, in lexicographic order of the declaration ordering.
inline std::vector<GlobalAssignment> enumerate_global_sections(const SupportModel& sm) {
  constexpr std::size_t kCap = std::size_t{1} << 24;
  std::size_t total = 1;
  for (const auto& o : sm.scenario.observables) {
    if (total > kCap / static_cast<std::size_t>(o.arity))
      throw std::runtime_error("oracle cap exceeded: assignment space larger than 2^24");
    total *= static_cast<std::size_t>(o.arity);
  }

  std::vector<GlobalAssignment> out;
  for (std::size_t code = 0; code < total; ++code) {
    GlobalAssignment g;
    std::size_t rem = code;
    for (auto it = sm.scenario.observables.rbegin(); it != sm.scenario.observables.rend();
         ++it) {
      g.assignment[it->name] = static_cast<int>(rem % static_cast<std::size_t>(it->arity));
      rem /= static_cast<std::size_t>(it->arity);
    }
    if (is_global_section(sm, g)) out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extension search with traces

/// Record of a backtracking run. Facet nodes (context + supported tuple)
/// alternate with assignment nodes; '+' marks a clash, '*'/'**'/... mark
/// agreeing re-visits of an already assigned observable.
struct SearchTrace {
  enum class NodeKind { facet, assign, success, exhausted };

  struct Node {
    NodeKind kind = NodeKind::facet;
    std::string context;     // facet, exhausted
    OutcomeTuple tuple;      // facet
    bool dead = false;       // facet containing a '+' child
    bool refuted = false;    // live facet whose every continuation failed
    std::string observable;  // assign
    int value = 0;           // assign
    int marker = 0;          // assign: 0 none, -1 conflict '+', k > 0 revisit with k stars
    std::vector<std::size_t> children;
  };

  std::vector<Node> nodes;  // nodes[0] is the seed facet

  const Node& root() const { return nodes.front(); }

  std::size_t count(NodeKind k) const {
    std::size_t c = 0;
    for (const auto& n : nodes)
      if (n.kind == k) ++c;
    return c;
  }
};

/// A failed search leaves only contradiction-marked ends: no success node,
/// and every explored facet is either dead (carries a '+' clash) or refuted
/// (every continuation failed).
inline bool trace_is_fully_contradicted(const SearchTrace& tr) {
  for (const auto& n : tr.nodes) {
    if (n.kind == SearchTrace::NodeKind::success) return false;
    if (n.kind == SearchTrace::NodeKind::facet && !n.dead && !n.refuted) return false;
  }
  return true;
}

struct ExtendOutcome {
  std::optional<GlobalAssignment> extension;  // nullopt on failure
  std::optional<SearchTrace> trace;           // present when requested
};

namespace detail {

class Extender {
 public:
  Extender(const SupportModel& sm, const Section& seed) : sm_(sm) {
    ensure_valid(sm.scenario);

    // The seed must be a supported section of some context.
    const Context* seed_ctx = nullptr;
    for (const auto& c : sm.scenario.contexts) {
      if (c.observables.size() != seed.assignment.size()) continue;
      bool same = std::all_of(c.observables.begin(), c.observables.end(),
                              [&](const std::string& id) { return seed.assignment.count(id); });
      if (same) {
        seed_ctx = &c;
        break;
      }
    }
    if (!seed_ctx)
      throw std::invalid_argument("seed domain does not match any context");
    OutcomeTuple tuple;
    tuple.reserve(seed_ctx->observables.size());
    for (const auto& id : seed_ctx->observables) tuple.push_back(seed.assignment.at(id));
    if (!sm.support.at(seed_ctx->name).count(tuple))
      throw std::invalid_argument("seed section is not in the support of context " +
                                  seed_ctx->name);

    ctx_done_.assign(sm.scenario.contexts.size(), false);
    for (std::size_t i = 0; i < sm.scenario.contexts.size(); ++i)
      if (&sm.scenario.contexts[i] == seed_ctx) ctx_done_[i] = true;

    // Seed facet: first observable is the trunk; the rest are obligations
    // pre-registered with ascending star markers.
    std::size_t root = add_node(facet_node(seed_ctx->name, tuple), std::nullopt);
    for (std::size_t k = 0; k < seed_ctx->observables.size(); ++k) {
      const std::string& id = seed_ctx->observables[k];
      int marker = 0;
      if (k > 0) {
        marker = static_cast<int>(k);
        marker_of_[id] = marker;
        next_marker_ = std::max(next_marker_, marker + 1);
      }
      std::size_t node = add_node(assign_node(id, tuple[k], marker), root);
      bind(id, tuple[k], node);
    }
  }

  bool run() {
    bool ok = dfs(0);
    if (!ok) trace.nodes[0].refuted = true;
    return ok;
  }

  std::optional<GlobalAssignment> found;
  SearchTrace trace;

 private:
  static SearchTrace::Node facet_node(std::string ctx, OutcomeTuple t) {
    SearchTrace::Node n;
    n.kind = SearchTrace::NodeKind::facet;
    n.context = std::move(ctx);
    n.tuple = std::move(t);
    return n;
  }

  static SearchTrace::Node assign_node(std::string obs, int value, int marker) {
    SearchTrace::Node n;
    n.kind = SearchTrace::NodeKind::assign;
    n.observable = std::move(obs);
    n.value = value;
    n.marker = marker;
    return n;
  }

  std::size_t add_node(SearchTrace::Node n, std::optional<std::size_t> parent) {
    trace.nodes.push_back(std::move(n));
    std::size_t idx = trace.nodes.size() - 1;
    if (parent) trace.nodes[*parent].children.push_back(idx);
    return idx;
  }

  void bind(const std::string& id, int value, std::size_t node) {
    assignment_[id] = value;
    node_of_[id] = node;
    stamp_[id] = clock_++;
  }

  void unbind(const std::string& id) {
    assignment_.erase(id);
    node_of_.erase(id);
    stamp_.erase(id);
  }

  int revisit_marker(const std::string& id) {
    auto it = marker_of_.find(id);
    if (it != marker_of_.end()) return it->second;
    return marker_of_[id] = next_marker_++;
  }

  bool dfs(std::size_t enclosing_facet) {
    if (std::all_of(ctx_done_.begin(), ctx_done_.end(), [](bool b) { return b; })) {
      GlobalAssignment g{assignment_};
      if (!is_global_section(sm_, g))
        throw std::logic_error("search produced an assignment outside some support");
      found = g;
      SearchTrace::Node n;
      n.kind = SearchTrace::NodeKind::success;
      add_node(std::move(n), enclosing_facet);
      return true;
    }

    // Next context: the unexplored one sharing the most assigned observables,
    // ties broken by declaration order.
    const auto& ctxs = sm_.scenario.contexts;
    std::size_t best = ctxs.size();
    std::size_t best_shared = 0;
    for (std::size_t i = 0; i < ctxs.size(); ++i) {
      if (ctx_done_[i]) continue;
      std::size_t shared = 0;
      for (const auto& id : ctxs[i].observables)
        if (assignment_.count(id)) ++shared;
      if (best == ctxs.size() || shared > best_shared) {
        best = i;
        best_shared = shared;
      }
    }
    const Context& ctx = ctxs[best];

    // Entry point: the most recently assigned shared observable. Candidate
    // facets agree with the current assignment there; clashes elsewhere are
    // drawn and marked rather than silently skipped.
    std::string entry;
    int entry_stamp = -1;
    for (const auto& id : ctx.observables) {
      auto it = stamp_.find(id);
      if (it != stamp_.end() && it->second > entry_stamp) {
        entry_stamp = it->second;
        entry = id;
      }
    }
    std::size_t attach = enclosing_facet;
    if (!entry.empty()) {
      attach = node_of_.at(entry);
    } else if (!stamp_.empty()) {
      int latest = -1;
      for (const auto& [id, st] : stamp_)
        if (st > latest) {
          latest = st;
          attach = node_of_.at(id);
        }
    }

    std::size_t entry_pos = 0;
    for (std::size_t k = 0; k < ctx.observables.size(); ++k)
      if (ctx.observables[k] == entry) entry_pos = k;

    bool tried_any = false;
    for (const auto& tuple : sm_.support.at(ctx.name)) {
      if (!entry.empty() && tuple[entry_pos] != assignment_.at(entry)) continue;
      tried_any = true;

      std::size_t facet = add_node(facet_node(ctx.name, tuple), attach);
      std::vector<std::string> fresh;
      bool dead = false;
      for (std::size_t k = 0; k < ctx.observables.size(); ++k) {
        const std::string& id = ctx.observables[k];
        if (!entry.empty() && id == entry) continue;
        auto it = assignment_.find(id);
        if (it == assignment_.end()) {
          std::size_t node = add_node(assign_node(id, tuple[k], 0), facet);
          bind(id, tuple[k], node);
          fresh.push_back(id);
        } else if (it->second == tuple[k]) {
          add_node(assign_node(id, tuple[k], revisit_marker(id)), facet);
        } else {
          add_node(assign_node(id, tuple[k], -1), facet);
          dead = true;
        }
      }
      trace.nodes[facet].dead = dead;
      if (dead) {
        for (const auto& id : fresh) unbind(id);
        continue;
      }

      ctx_done_[best] = true;
      if (dfs(facet)) return true;
      trace.nodes[facet].refuted = true;
      ctx_done_[best] = false;
      for (const auto& id : fresh) unbind(id);
    }

    if (!tried_any) {
      SearchTrace::Node n;
      n.kind = SearchTrace::NodeKind::exhausted;
      n.context = ctx.name;
      add_node(std::move(n), attach);
    }
    return false;
  }

  const SupportModel& sm_;
  std::map<std::string, int> assignment_;
  std::map<std::string, std::size_t> node_of_;
  std::map<std::string, int> stamp_;
  std::map<std::string, int> marker_of_;
  std::vector<bool> ctx_done_;
  int clock_ = 0;
  int next_marker_ = 1;
};

}  // namespace detail

/// Backtracking extension of a supported section towards a global one.
/// Success returns a verified global assignment; failure leaves a complete
/// trace in which every explored branch ends in a contradiction.
inline ExtendOutcome extend_section(const SupportModel& sm, const Section& seed,
                                    bool want_trace = false) {
  detail::Extender ex(sm, seed);
  ex.run();
  ExtendOutcome out;
  out.extension = ex.found;
  if (want_trace) out.trace = std::move(ex.trace);
  return out;
}

// ---------------------------------------------------------------------------
// GF(2) parity systems

/// One equation per parity-class context: sum of the member variables equals
/// 0 (even-parity support) or 1 (odd). Contexts supported on their full
/// outcome set contribute no row.
struct ParitySystem {
  std::vector<std::string> variables;  // all observables, declaration order

  struct Row {
    std::string context;
    std::uint64_t mask = 0;  // bit i set iff variables[i] occurs
    int rhs = 0;
  };
  std::vector<Row> rows;
};

/// Builds the system when every context's support is exactly one full parity
/// class or the full outcome set; anything else (including non-binary
/// observables) is not a parity model.
inline std::optional<ParitySystem> build_parity_system(const SupportModel& sm) {
  const Scenario& s = sm.scenario;
  for (const auto& o : s.observables)
    if (o.arity != 2) return std::nullopt;
  if (s.observables.size() > 64)
    throw std::runtime_error("parity systems support at most 64 observables");

  ParitySystem ps;
  for (const auto& o : s.observables) ps.variables.push_back(o.name);

  for (const auto& ctx : s.contexts) {
    const auto& supp = sm.support.at(ctx.name);
    const std::size_t full = std::size_t{1} << ctx.observables.size();
    if (supp.size() == full) continue;  // no constraint

    int parity = -1;
    for (const auto& tuple : supp) {
      int p = 0;
      for (int v : tuple) p ^= v;
      if (parity == -1) parity = p;
      if (p != parity) return std::nullopt;
    }
    if (supp.size() != full / 2) return std::nullopt;

    ParitySystem::Row row;
    row.context = ctx.name;
    row.rhs = parity;
    for (const auto& id : ctx.observables)
      row.mask |= std::uint64_t{1} << s.index_of(id);
    ps.rows.push_back(row);
  }
  return ps;
}

struct ParityOutcome {
  bool consistent = false;
  std::map<std::string, int> solution;          // when consistent (free variables 0)
  std::vector<std::string> contradiction_rows;  // certificate subset, else empty
};

/// XOR of the named rows cancels on the left and sums to 1 on the right.
inline bool verify_parity_contradiction(const ParitySystem& ps,
                                        const std::vector<std::string>& row_contexts) {
  std::uint64_t mask = 0;
  int rhs = 0;
  for (const auto& name : row_contexts) {
    bool found = false;
    for (const auto& row : ps.rows)
      if (row.context == name) {
        mask ^= row.mask;
        rhs ^= row.rhs;
        found = true;
      }
    if (!found) return false;
  }
  return mask == 0 && rhs == 1;
}

/// Gaussian elimination over GF(2). A contradiction comes with the subset of
/// original rows whose sum reads 0 = 1; consistency comes with one solution.
inline ParityOutcome parity_obstruction(const ParitySystem& ps) {
  if (ps.rows.size() > 64)
    throw std::runtime_error("parity systems support at most 64 rows");

  struct WorkRow {
    std::uint64_t mask = 0;
    int rhs = 0;
    std::uint64_t history = 0;  // bit r set iff original row r participates
  };
  std::map<int, WorkRow> pivots;  // pivot bit -> reduced row

  auto lowest_bit = [](std::uint64_t m) {
    int b = 0;
    while (!(m & 1)) {
      m >>= 1;
      ++b;
    }
    return b;
  };

  ParityOutcome out;
  for (std::size_t r = 0; r < ps.rows.size(); ++r) {
    WorkRow w{ps.rows[r].mask, ps.rows[r].rhs, std::uint64_t{1} << r};
    while (w.mask != 0) {
      int bit = lowest_bit(w.mask);
      auto it = pivots.find(bit);
      if (it == pivots.end()) {
        pivots.emplace(bit, w);
        break;
      }
      w.mask ^= it->second.mask;
      w.rhs ^= it->second.rhs;
      w.history ^= it->second.history;
    }
    if (w.mask == 0 && w.rhs == 1) {
      for (std::size_t k = 0; k < ps.rows.size(); ++k)
        if (w.history & (std::uint64_t{1} << k))
          out.contradiction_rows.push_back(ps.rows[k].context);
      out.consistent = false;
      return out;
    }
  }

  // Back-substitute with free variables set to 0. Each pivot's bit is the
  // lowest in its mask, so solving in descending bit order sees every other
  // member already decided.
  std::vector<int> value(ps.variables.size(), 0);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    int v = it->second.rhs;
    std::uint64_t rest = it->second.mask & ~(std::uint64_t{1} << it->first);
    for (std::size_t b = 0; b < ps.variables.size(); ++b)
      if (rest & (std::uint64_t{1} << b)) v ^= value[b];
    value[static_cast<std::size_t>(it->first)] = v;
  }
  out.consistent = true;
  for (std::size_t b = 0; b < ps.variables.size(); ++b)
    out.solution[ps.variables[b]] = value[b];
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class Level { noncontextual, logically_contextual, strongly_contextual };

inline const char* to_string(Level level) {
  switch (level) {
    case Level::noncontextual: return "noncontextual";
    case Level::logically_contextual: return "logically_contextual";
    case Level::strongly_contextual: return "strongly_contextual";
  }
  return "?";
}

struct SectionRef {
  std::string context;
  OutcomeTuple tuple;
};

struct Classification {
  Level level = Level::noncontextual;
  // noncontextual: one verified extension per supported section.
  std::vector<std::pair<SectionRef, GlobalAssignment>> extensions;
  // logically contextual: a supported section with no extension.
  std::optional<SectionRef> non_extendable;
  // strongly contextual, parity route: certificate rows summing to 0 = 1.
  std::vector<std::string> parity_rows;
  // strongly contextual, exhaustion route: a context none of whose supported
  // sections extends.
  std::optional<std::string> exhausted_context;
};

/// The section named by a context and one of its outcome tuples.
inline Section section_of(const Scenario& s, const std::string& ctx_name,
                          const OutcomeTuple& tuple) {
  const Context& ctx = s.context(ctx_name);
  if (tuple.size() != ctx.observables.size())
    throw std::invalid_argument("tuple length does not match context " + ctx_name);
  Section sec;
  for (std::size_t k = 0; k < tuple.size(); ++k) sec.assignment[ctx.observables[k]] = tuple[k];
  return sec;
}

/// Places the model in the hierarchy: noncontextual (every supported section
/// extends), strongly contextual (no global section), logically contextual
/// (in between). Runs the parity shortcut first when it applies, then the
/// per-section extension sweep; every witness is re-verified before return.
inline Classification classify(const SupportModel& sm) {
  ensure_valid(sm.scenario);

  Classification result;
  if (auto ps = build_parity_system(sm)) {
    ParityOutcome po = parity_obstruction(*ps);
    if (!po.consistent) {
      if (!verify_parity_contradiction(*ps, po.contradiction_rows))
        throw std::logic_error("parity certificate failed re-verification");
      result.level = Level::strongly_contextual;
      result.parity_rows = po.contradiction_rows;
      return result;
    }
  }

  std::optional<SectionRef> first_failure;
  std::optional<std::string> all_failed_context;
  for (const auto& ctx : sm.scenario.contexts) {
    bool any_ok = false;
    for (const auto& tuple : sm.support.at(ctx.name)) {
      Section seed = section_of(sm.scenario, ctx.name, tuple);
      ExtendOutcome out = extend_section(sm, seed, false);
      if (out.extension) {
        any_ok = true;
        result.extensions.emplace_back(SectionRef{ctx.name, tuple}, *out.extension);
      } else if (!first_failure) {
        first_failure = SectionRef{ctx.name, tuple};
      }
    }
    if (!any_ok && !all_failed_context) all_failed_context = ctx.name;
  }

  if (!first_failure) {
    for (const auto& [ref, g] : result.extensions)
      if (!is_global_section(sm, g))
        throw std::logic_error("extension witness failed re-verification");
    result.level = Level::noncontextual;
    return result;
  }

  // Re-verify the negative witnesses against the independent oracle.
  std::vector<GlobalAssignment> oracle = enumerate_global_sections(sm);
  if (all_failed_context) {
    if (!oracle.empty())
      throw std::logic_error("exhaustion witness failed re-verification");
    result.level = Level::strongly_contextual;
    result.exhausted_context = all_failed_context;
    result.extensions.clear();
    return result;
  }

  const Context& fctx = sm.scenario.context(first_failure->context);
  for (const auto& g : oracle) {
    bool extends = true;
    for (std::size_t k = 0; k < fctx.observables.size(); ++k)
      if (g.assignment.at(fctx.observables[k]) != first_failure->tuple[k]) extends = false;
    if (extends) throw std::logic_error("non-extendable witness failed re-verification");
  }
  result.level = Level::logically_contextual;
  result.non_extendable = first_failure;
  result.extensions.clear();
  return result;
}

}  // namespace ctxbundle
