// empirical_model.hpp — per-context probability tables and their possibilistic supports.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxbundle/scenario.hpp"

namespace ctxbundle {

/// One joint outcome per context, digits ordered as the context lists its
/// observables.
using OutcomeTuple = std::vector<int>;

/// Compact digit form used by the tables and the file format ("011").
inline std::string tuple_to_digits(const OutcomeTuple& t) {
  std::string s;
  s.reserve(t.size());
  for (int v : t) {
    if (v < 0 || v > 9)
      throw std::invalid_argument("digit-string serialization needs outcomes in 0..9, got " +
                                  std::to_string(v));
    s.push_back(static_cast<char>('0' + v));
  }
  return s;
}

inline OutcomeTuple digits_to_tuple(const std::string& s) {
  OutcomeTuple t;
  t.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("malformed outcome tuple \"" + s + "\"");
    t.push_back(c - '0');
  }
  return t;
}

struct ProbabilityTable {
  std::string context;
  std::map<OutcomeTuple, double> probs;
};

enum class LoadMode { strict, possibilistic };

inline const char* to_string(LoadMode m) {
  return m == LoadMode::strict ? "strict" : "possibilistic";
}

struct EmpiricalModel {
  Scenario scenario;
  std::vector<ProbabilityTable> tables;  // one per context, scenario context order
  LoadMode mode = LoadMode::strict;
  std::vector<std::string> warnings;     // normalization notes from possibilistic loads

  const ProbabilityTable& table_for(const std::string& context_name) const {
    for (const auto& t : tables)
      if (t.context == context_name) return t;
    throw std::invalid_argument("no table for context " + context_name);
  }
};

/// The possibilistic shadow of a model: per context, the outcome tuples with
/// probability above threshold.
struct SupportModel {
  Scenario scenario;
  std::map<std::string, std::set<OutcomeTuple>> support;
};

namespace detail {

inline void check_tuple_shape(const Scenario& s, const Context& ctx, const OutcomeTuple& t) {
  if (t.size() != ctx.observables.size())
    throw std::invalid_argument("tuple " + tuple_to_digits(t) + " has length " +
                                std::to_string(t.size()) + ", context " + ctx.name +
                                " has " + std::to_string(ctx.observables.size()) +
                                " observables");
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Observable& obs = s.observable(ctx.observables[k]);
    if (t[k] < 0 || t[k] >= obs.arity)
      throw std::invalid_argument("tuple value " + std::to_string(t[k]) +
                                  " out of range for observable " + obs.name);
  }
}

inline constexpr double kNormalizationTol = 1e-9;

}  // namespace detail

/// Validates and assembles a model from per-context tables. Strict mode
/// demands each table to be a probability distribution (sum 1 within 1e-9);
/// possibilistic mode accepts any nonnegative weights and records a warning
/// for unnormalized tables, since only the supports feed the solvers.
inline EmpiricalModel load_model(const Scenario& scenario,
                                 const std::vector<ProbabilityTable>& tables,
                                 LoadMode mode = LoadMode::strict) {
  ensure_valid(scenario);

  EmpiricalModel model;
  model.scenario = scenario;
  model.mode = mode;

  std::set<std::string> provided;
  for (const auto& t : tables) {
    if (!scenario.find_context(t.context))
      throw std::invalid_argument("table for unknown context " + t.context);
    if (!provided.insert(t.context).second)
      throw std::invalid_argument("two tables for context " + t.context);
  }
  for (const auto& c : scenario.contexts)
    if (!provided.count(c.name))
      throw std::invalid_argument("missing table for context " + c.name);

  for (const auto& c : scenario.contexts) {
    for (const auto& t : tables) {
      if (t.context != c.name) continue;
      double sum = 0.0;
      for (const auto& [tuple, p] : t.probs) {
        detail::check_tuple_shape(scenario, c, tuple);
        if (p < 0.0)
          throw std::invalid_argument("negative probability " + std::to_string(p) +
                                      " in context " + c.name);
        sum += p;
      }
      if (std::abs(sum - 1.0) > detail::kNormalizationTol) {
        std::ostringstream msg;
        msg << "context " << c.name << " weights sum to " << sum << ", not 1";
        if (mode == LoadMode::strict)
          throw std::invalid_argument("normalization failure: " + msg.str());
        model.warnings.push_back(msg.str());
      }
      model.tables.push_back(t);
    }
  }
  return model;
}

/// Keeps exactly the tuples with probability strictly above threshold.
inline SupportModel support_of(const EmpiricalModel& m, double threshold = 1e-9) {
  if (threshold < 0.0) throw std::invalid_argument("support threshold must be >= 0");

  SupportModel sm;
  sm.scenario = m.scenario;
  for (const auto& t : m.tables) {
    auto& supp = sm.support[t.context];
    for (const auto& [tuple, p] : t.probs)
      if (p > threshold) supp.insert(tuple);
    if (supp.empty())
      throw std::invalid_argument("empty support for context " + t.context);
  }
  return sm;
}

/// One Section per supported tuple of the context.
inline std::vector<Section> supported_sections(const SupportModel& sm,
                                               const std::string& context_name) {
  const Context& ctx = sm.scenario.context(context_name);
  auto it = sm.support.find(context_name);
  if (it == sm.support.end())
    throw std::invalid_argument("no support recorded for context " + context_name);

  std::vector<Section> out;
  out.reserve(it->second.size());
  for (const auto& tuple : it->second) {
    Section sec;
    for (std::size_t k = 0; k < tuple.size(); ++k)
      sec.assignment[ctx.observables[k]] = tuple[k];
    out.push_back(std::move(sec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Marginal compatibility

struct MarginalViolation {
  std::string context_a;
  std::string context_b;
  std::vector<std::string> shared;   // scenario declaration order
  std::vector<double> marginal_a;    // indexed lexicographically over shared outcomes
  std::vector<double> marginal_b;
};

namespace detail {

inline std::vector<double> marginal_over(const Scenario& s, const Context& ctx,
                                         const ProbabilityTable& table,
                                         const std::vector<std::string>& shared) {
  std::size_t cells = 1;
  for (const auto& id : shared) cells *= static_cast<std::size_t>(s.observable(id).arity);

  std::vector<std::size_t> pos;  // index of each shared observable inside the context
  pos.reserve(shared.size());
  for (const auto& id : shared) {
    auto it = std::find(ctx.observables.begin(), ctx.observables.end(), id);
    pos.push_back(static_cast<std::size_t>(it - ctx.observables.begin()));
  }

  std::vector<double> marg(cells, 0.0);
  for (const auto& [tuple, p] : table.probs) {
    std::size_t code = 0;
    for (std::size_t k = 0; k < shared.size(); ++k) {
      int arity = s.observable(shared[k]).arity;
      code = code * static_cast<std::size_t>(arity) + static_cast<std::size_t>(tuple[pos[k]]);
    }
    marg[code] += p;
  }
  return marg;
}

}  // namespace detail

/// For every pair of contexts with shared observables, compares the marginal
/// distributions on the overlap componentwise. Requires a strict-mode model.
inline std::vector<MarginalViolation> check_marginal_compatibility(const EmpiricalModel& m,
                                                                   double tol = 1e-9) {
  if (m.mode != LoadMode::strict)
    throw std::invalid_argument("marginal compatibility is defined for strict-mode models");

  std::vector<MarginalViolation> report;
  const auto& ctxs = m.scenario.contexts;
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    for (std::size_t j = i + 1; j < ctxs.size(); ++j) {
      std::vector<std::string> shared;
      for (const auto& o : m.scenario.observables) {
        bool in_a = std::find(ctxs[i].observables.begin(), ctxs[i].observables.end(), o.name) !=
                    ctxs[i].observables.end();
        bool in_b = std::find(ctxs[j].observables.begin(), ctxs[j].observables.end(), o.name) !=
                    ctxs[j].observables.end();
        if (in_a && in_b) shared.push_back(o.name);
      }
      if (shared.empty()) continue;

      auto ma = detail::marginal_over(m.scenario, ctxs[i], m.table_for(ctxs[i].name), shared);
      auto mb = detail::marginal_over(m.scenario, ctxs[j], m.table_for(ctxs[j].name), shared);
      bool agree = true;
      for (std::size_t k = 0; k < ma.size(); ++k)
        if (std::abs(ma[k] - mb[k]) > tol) agree = false;
      if (!agree)
        report.push_back({ctxs[i].name, ctxs[j].name, shared, std::move(ma), std::move(mb)});
    }
  }
  return report;
}

}  // namespace ctxbundle
