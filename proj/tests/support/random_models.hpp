// Test-only generators: random antichain scenarios and support models.
#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "ctxbundle/empirical_model.hpp"
#include "ctxbundle/scenario.hpp"

namespace testsupport {

using ctxbundle::Context;
using ctxbundle::Observable;
using ctxbundle::OutcomeTuple;
using ctxbundle::Scenario;
using ctxbundle::SupportModel;

/// Up to 5 binary observables and up to 4 contexts forming an antichain;
/// the observable set is the union of the contexts, so coverage holds by
/// construction.
inline Scenario random_scenario(std::mt19937& rng) {
  const int pool = std::uniform_int_distribution<int>(2, 5)(rng);
  const int want = std::uniform_int_distribution<int>(1, 4)(rng);

  std::vector<std::vector<int>> chosen;
  int guard = 0;
  while (static_cast<int>(chosen.size()) < want && guard++ < 300) {
    const int k = std::uniform_int_distribution<int>(1, std::min(3, pool))(rng);
    std::vector<int> ids(static_cast<std::size_t>(pool));
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<int> ctx(ids.begin(), ids.begin() + k);
    std::sort(ctx.begin(), ctx.end());

    bool ok = true;
    for (const auto& other : chosen) {
      bool sub = std::includes(other.begin(), other.end(), ctx.begin(), ctx.end());
      bool sup = std::includes(ctx.begin(), ctx.end(), other.begin(), other.end());
      if (sub || sup) ok = false;
    }
    if (ok) chosen.push_back(std::move(ctx));
  }

  std::vector<int> covered;
  for (const auto& ctx : chosen)
    for (int id : ctx) covered.push_back(id);
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());

  Scenario s;
  for (int id : covered)
    s.observables.push_back(Observable{"m" + std::to_string(id), 2, std::nullopt});
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    Context c;
    c.name = "K" + std::to_string(i + 1);
    for (int id : chosen[i]) c.observables.push_back("m" + std::to_string(id));
    s.contexts.push_back(std::move(c));
  }
  return s;
}

/// Uniformly random nonempty support per context.
inline SupportModel random_support_model(std::mt19937& rng) {
  Scenario s = random_scenario(rng);
  SupportModel sm;
  sm.scenario = s;
  for (const auto& ctx : s.contexts) {
    const std::size_t full = std::size_t{1} << ctx.observables.size();
    const std::size_t mask =
        std::uniform_int_distribution<std::size_t>(1, (std::size_t{1} << full) - 1)(rng);
    auto& supp = sm.support[ctx.name];
    for (std::size_t code = 0; code < full; ++code) {
      if (!(mask & (std::size_t{1} << code))) continue;
      OutcomeTuple t(ctx.observables.size());
      for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = static_cast<int>((code >> (t.size() - 1 - k)) & 1u);
      supp.insert(std::move(t));
    }
  }
  return sm;
}

/// Every context supported on a full parity class (random parity) or on the
/// full outcome set — i.e. a guaranteed parity model.
inline SupportModel random_parity_model(std::mt19937& rng) {
  Scenario s = random_scenario(rng);
  SupportModel sm;
  sm.scenario = s;
  for (const auto& ctx : s.contexts) {
    const std::size_t m = ctx.observables.size();
    const std::size_t full = std::size_t{1} << m;
    const int choice = std::uniform_int_distribution<int>(0, 2)(rng);  // 0,1: class; 2: full
    auto& supp = sm.support[ctx.name];
    for (std::size_t code = 0; code < full; ++code) {
      OutcomeTuple t(m);
      int parity = 0;
      for (std::size_t k = 0; k < m; ++k) {
        t[k] = static_cast<int>((code >> (m - 1 - k)) & 1u);
        parity ^= t[k];
      }
      if (choice == 2 || parity == choice) supp.insert(std::move(t));
    }
  }
  return sm;
}

}  // namespace testsupport
