// presets.hpp — stock scenarios and their generated empirical models.
#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxbundle/empirical_model.hpp"
#include "ctxbundle/quantum.hpp"
#include "ctxbundle/scenario.hpp"

namespace ctxbundle {

/// Observable names of quantum-generated scenarios follow LETTER_SUFFIX:
/// "X_A" is an X measurement on qubit 0, "Z_3" a Z measurement on qubit 2.
/// Party letters A.. and 1-based qubit numbers are both accepted.
inline SingleQubitObservable parse_observable_name(const std::string& name) {
  if (name.size() < 3 || name[1] != '_')
    throw std::invalid_argument("observable name \"" + name +
                                "\" is not of the form LETTER_QUBIT");
  const char letter = name[0];
  if (letter != 'X' && letter != 'Y' && letter != 'Z')
    throw std::invalid_argument("observable \"" + name + "\" has no Pauli letter");
  const std::string suffix = name.substr(2);
  int qubit;
  if (suffix.size() == 1 && suffix[0] >= 'A' && suffix[0] <= 'L') {
    qubit = suffix[0] - 'A';
  } else {
    for (char c : suffix)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("observable \"" + name + "\" has a bad qubit suffix");
    qubit = std::stoi(suffix) - 1;
  }
  if (qubit < 0 || qubit >= kMaxQubits)
    throw std::invalid_argument("observable \"" + name + "\" addresses a bad qubit");
  return SingleQubitObservable{qubit, letter};
}

inline MeasurementContext measurement_context(const Context& ctx) {
  MeasurementContext mc;
  mc.observables.reserve(ctx.observables.size());
  for (const auto& id : ctx.observables) mc.observables.push_back(parse_observable_name(id));
  return mc;
}

/// Builds the full (strict) empirical model of a scenario by exact joint
/// measurement of every context on the given state. Every outcome tuple is
/// tabulated, zeros included, so the file shows the whole distribution.
inline EmpiricalModel model_from_state(const Scenario& scenario, const StateVector& psi) {
  ensure_valid(scenario);
  std::vector<ProbabilityTable> tables;
  tables.reserve(scenario.contexts.size());
  for (const auto& ctx : scenario.contexts) {
    MeasurementContext mc = measurement_context(ctx);
    std::vector<double> dist = joint_distribution(psi, mc);
    ProbabilityTable table;
    table.context = ctx.name;
    const std::size_t m = ctx.observables.size();
    for (std::size_t code = 0; code < dist.size(); ++code) {
      OutcomeTuple t(m);
      for (std::size_t k = 0; k < m; ++k) t[k] = static_cast<int>((code >> (m - 1 - k)) & 1u);
      table.probs[t] = dist[code];
    }
    tables.push_back(std::move(table));
  }
  return load_model(scenario, tables, LoadMode::strict);
}

struct Preset {
  Scenario scenario;
  EmpiricalModel model;
  std::optional<StateVector> state;  // absent for the hard-coded PR box
  std::vector<std::string> notes;
};

inline std::vector<std::string> preset_names() {
  return {"bell", "pr-box", "ghz-ab", "cluster-ring-5"};
}

namespace detail {

inline Observable obs(std::string name, double x, double y) {
  return Observable{std::move(name), 2, std::make_pair(x, y)};
}

inline Preset bell_preset() {
  Preset p;
  p.scenario.observables = {obs("X_A", 0, 0), obs("X_B", 1, 0), obs("Z_A", 1, -1),
                            obs("Z_B", 0, -1)};
  p.scenario.contexts = {{"C1", {"X_A", "X_B"}},
                         {"C2", {"X_A", "Z_B"}},
                         {"C3", {"Z_A", "X_B"}},
                         {"C4", {"Z_A", "Z_B"}}};
  p.state = bell_state();
  p.model = model_from_state(p.scenario, *p.state);
  return p;
}

inline Preset pr_box_preset() {
  Preset p;
  p.scenario.observables = {obs("N_A", 0, 0), obs("N_B", 1, 0), obs("M_A", 1, -1),
                            obs("M_B", 0, -1)};
  p.scenario.contexts = {{"C1", {"N_A", "N_B"}},
                         {"C2", {"N_A", "M_B"}},
                         {"C3", {"M_A", "N_B"}},
                         {"C4", {"M_A", "M_B"}}};
  auto table = [](const char* name, double p00, double p10, double p01, double p11) {
    ProbabilityTable t;
    t.context = name;
    t.probs[{0, 0}] = p00;
    t.probs[{1, 0}] = p10;
    t.probs[{0, 1}] = p01;
    t.probs[{1, 1}] = p11;
    return t;
  };
  p.model = load_model(p.scenario,
                       {table("C1", 0.5, 0, 0, 0.5), table("C2", 0.5, 0, 0, 0.5),
                        table("C3", 0.5, 0, 0, 0.5), table("C4", 0, 0.5, 0.5, 0)},
                       LoadMode::strict);
  return p;
}

inline Preset ghz_ab_preset() {
  Preset p;
  p.scenario.observables = {obs("X_A", 0.5, 0),  obs("X_B", -0.25, 0.43301),
                            obs("X_C", -0.25, -0.43301), obs("Y_A", -2, 0),
                            obs("Y_B", 1, -1.7321), obs("Y_C", 1, 1.7321)};
  p.scenario.contexts = {{"C1", {"X_A", "X_B", "X_C"}},
                         {"C2", {"X_A", "Y_B", "Y_C"}},
                         {"C3", {"Y_A", "X_B", "Y_C"}},
                         {"C4", {"Y_A", "Y_B", "X_C"}}};
  p.state = ghz_minus_state();
  p.model = model_from_state(p.scenario, *p.state);
  return p;
}

inline Preset cluster_ring5_preset() {
  Preset p;
  for (int k = 1; k <= 5; ++k)
    p.scenario.observables.push_back(Observable{"X_" + std::to_string(k), 2, std::nullopt});
  for (int k = 1; k <= 5; ++k)
    p.scenario.observables.push_back(Observable{"Z_" + std::to_string(k), 2, std::nullopt});
  // Contexts are the observables of the ten ring stabilizers, qubit order.
  p.scenario.contexts = {{"C1", {"X_1", "Z_2", "Z_5"}},
                         {"C2", {"Z_1", "X_2", "Z_3"}},
                         {"C3", {"Z_2", "X_3", "Z_4"}},
                         {"C4", {"Z_3", "X_4", "Z_5"}},
                         {"C5", {"Z_1", "Z_4", "X_5"}},
                         {"C6", {"Z_1", "X_2", "X_4", "Z_5"}},
                         {"C7", {"Z_1", "Z_2", "X_3", "X_5"}},
                         {"C8", {"X_1", "Z_2", "Z_3", "X_4"}},
                         {"C9", {"X_2", "Z_3", "Z_4", "X_5"}},
                         {"C10", {"X_1", "X_3", "Z_4", "Z_5"}}};
  p.state = cluster_ring_state(5);
  p.model = model_from_state(p.scenario, *p.state);
  p.notes.push_back(
      "cluster-ring-5: the original analysis of this scenario reports it as contextual via a "
      "failed search-tree extension, but the supports are exactly the even-parity classes of "
      "ten +1-signed stabilizers; that parity system is homogeneous, so the all-zero "
      "assignment is a global section and the computed verdict is noncontextual "
      "(32 global sections among the 1024 candidates).");
  return p;
}

}  // namespace detail

/// Stabilizer words of the 5-qubit ring cluster state: the five generators
/// Z_{k-1} X_k Z_{k+1} and the five products of adjacent generators.
inline std::vector<PauliWord> cluster_ring5_stabilizers() {
  std::vector<PauliWord> ws;
  for (const char* s : {"+XZ11Z", "+ZXZ11", "+1ZXZ1", "+11ZXZ", "+Z11ZX",
                        "+ZX1XZ", "+ZZX1X", "+XZZX1", "+1XZZX", "+X1XZZ"})
    ws.push_back(PauliWord::parse(s));
  return ws;
}

inline Preset make_preset(const std::string& name) {
  if (name == "bell") return detail::bell_preset();
  if (name == "pr-box") return detail::pr_box_preset();
  if (name == "ghz-ab") return detail::ghz_ab_preset();
  if (name == "cluster-ring-5") return detail::cluster_ring5_preset();
  throw std::invalid_argument("unknown preset \"" + name + "\" (expected bell, pr-box, "
                              "ghz-ab or cluster-ring-5)");
}

}  // namespace ctxbundle
