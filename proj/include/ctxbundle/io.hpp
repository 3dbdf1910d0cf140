// io.hpp — scenario/model file formats (UTF-8 JSON) and certificate output.
#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxbundle/empirical_model.hpp"
#include "ctxbundle/quantum.hpp"
#include "ctxbundle/scenario.hpp"
#include "ctxbundle/solver.hpp"

namespace ctxbundle {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Reading

/// Everything a scenario/model file may carry. The distributions and the
/// state spec (preset name or amplitudes) are both optional; a file with a
/// state spec but no distributions is an input for `gen`.
struct ParsedModelFile {
  Scenario scenario;
  std::optional<std::string> preset;
  std::optional<StateVector> state;  // from explicit amplitudes
  std::optional<std::vector<ProbabilityTable>> distributions;
  LoadMode mode = LoadMode::strict;
  std::vector<std::string> notes;
  json certificate;                  // passed through untouched when present
  std::vector<std::string> warnings; // unknown keys seen in lenient mode
};

namespace detail {

inline void check_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& where, bool strict_schema,
                       std::vector<std::string>* warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (known.count(it.key())) continue;
    std::string msg = "unknown key \"" + it.key() + "\" in " + where;
    if (strict_schema) throw std::invalid_argument(msg);
    if (warnings) warnings->push_back(msg);
  }
}

inline double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw std::invalid_argument(where + " must be a number");
  return v.get<double>();
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j, bool strict_schema = true,
                                   std::vector<std::string>* warnings = nullptr) {
  if (!j.is_object()) throw std::invalid_argument("scenario file must be a JSON object");
  if (!j.contains("observables") || !j.contains("contexts"))
    throw std::invalid_argument("scenario needs \"observables\" and \"contexts\"");

  Scenario s;
  for (const auto& jo : j.at("observables")) {
    detail::check_keys(jo, {"name", "arity", "layout"}, "observable", strict_schema, warnings);
    Observable o;
    o.name = jo.at("name").get<std::string>();
    o.arity = jo.contains("arity") ? jo.at("arity").get<int>() : 2;
    if (jo.contains("layout")) {
      const auto& l = jo.at("layout");
      if (!l.is_array() || l.size() != 2)
        throw std::invalid_argument("layout of " + o.name + " must be [x, y]");
      o.layout = std::make_pair(detail::as_number(l[0], "layout x"),
                                detail::as_number(l[1], "layout y"));
    }
    s.observables.push_back(std::move(o));
  }
  for (const auto& jc : j.at("contexts")) {
    detail::check_keys(jc, {"name", "observables"}, "context", strict_schema, warnings);
    Context c;
    c.name = jc.at("name").get<std::string>();
    for (const auto& id : jc.at("observables")) c.observables.push_back(id.get<std::string>());
    s.contexts.push_back(std::move(c));
  }

  auto report = validate_scenario(s);
  if (!report.empty()) throw std::invalid_argument("invalid scenario: " + report.front());
  return s;
}

inline ParsedModelFile parse_model_file(const json& j, bool strict_schema = true) {
  ParsedModelFile file;
  detail::check_keys(j,
                     {"observables", "contexts", "preset", "amplitudes", "distributions",
                      "mode", "notes", "certificate"},
                     "model file", strict_schema, &file.warnings);
  file.scenario = scenario_from_json(j, strict_schema, &file.warnings);

  if (j.contains("mode")) {
    std::string m = j.at("mode").get<std::string>();
    if (m == "strict")
      file.mode = LoadMode::strict;
    else if (m == "possibilistic")
      file.mode = LoadMode::possibilistic;
    else
      throw std::invalid_argument("mode must be \"strict\" or \"possibilistic\"");
  }

  if (j.contains("preset")) file.preset = j.at("preset").get<std::string>();
  if (j.contains("amplitudes")) {
    const auto& ja = j.at("amplitudes");
    if (!ja.is_array() || ja.empty())
      throw std::invalid_argument("amplitudes must be a nonempty array of [re, im] pairs");
    std::vector<cplx> amps;
    for (const auto& pair : ja) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("each amplitude must be [re, im]");
      amps.emplace_back(detail::as_number(pair[0], "amplitude re"),
                        detail::as_number(pair[1], "amplitude im"));
    }
    int n = 0;
    while ((std::size_t{1} << n) < amps.size()) ++n;
    if ((std::size_t{1} << n) != amps.size())
      throw std::invalid_argument("amplitude count must be a power of two");
    file.state = StateVector(n, std::move(amps));
  }

  if (j.contains("distributions")) {
    std::vector<ProbabilityTable> tables;
    for (const auto& jt : j.at("distributions")) {
      detail::check_keys(jt, {"context", "probs"}, "distribution", strict_schema,
                         &file.warnings);
      ProbabilityTable t;
      t.context = jt.at("context").get<std::string>();
      for (auto it = jt.at("probs").begin(); it != jt.at("probs").end(); ++it)
        t.probs[digits_to_tuple(it.key())] =
            detail::as_number(it.value(), "probability of " + it.key());
      tables.push_back(std::move(t));
    }
    file.distributions = std::move(tables);
  }

  if (j.contains("notes"))
    for (const auto& n : j.at("notes")) file.notes.push_back(n.get<std::string>());
  if (j.contains("certificate")) file.certificate = j.at("certificate");
  return file;
}

/// Parses and assembles the empirical model of a file that carries
/// distributions; wraps load_model, so strict-mode normalization applies.
inline EmpiricalModel model_from_file(const ParsedModelFile& file) {
  if (!file.distributions)
    throw std::invalid_argument("model file carries no \"distributions\"");
  return load_model(file.scenario, *file.distributions, file.mode);
}

// ---------------------------------------------------------------------------
// Writing

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["observables"] = json::array();
  for (const auto& o : s.observables) {
    json jo;
    jo["name"] = o.name;
    jo["arity"] = o.arity;
    if (o.layout) jo["layout"] = {o.layout->first, o.layout->second};
    j["observables"].push_back(jo);
  }
  j["contexts"] = json::array();
  for (const auto& c : s.contexts) {
    json jc;
    jc["name"] = c.name;
    jc["observables"] = c.observables;
    j["contexts"].push_back(jc);
  }
  return j;
}

inline json model_to_json(const EmpiricalModel& m, const std::vector<std::string>& notes = {},
                          const std::optional<std::string>& preset = std::nullopt) {
  json j = scenario_to_json(m.scenario);
  if (preset) j["preset"] = *preset;
  j["mode"] = to_string(m.mode);
  j["distributions"] = json::array();
  for (const auto& t : m.tables) {
    json jt;
    jt["context"] = t.context;
    json probs = json::object();
    for (const auto& [tuple, p] : t.probs) probs[tuple_to_digits(tuple)] = p;
    jt["probs"] = std::move(probs);
    j["distributions"].push_back(std::move(jt));
  }
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

inline json certificate_to_json(const Classification& c) {
  json j;
  j["level"] = to_string(c.level);
  json w;
  switch (c.level) {
    case Level::noncontextual: {
      json exts = json::array();
      for (const auto& [ref, g] : c.extensions) {
        json e;
        e["context"] = ref.context;
        e["tuple"] = tuple_to_digits(ref.tuple);
        json global = json::object();
        for (const auto& [id, v] : g.assignment) global[id] = v;
        e["global"] = std::move(global);
        exts.push_back(std::move(e));
      }
      w["extensions"] = std::move(exts);
      break;
    }
    case Level::logically_contextual:
      w["non_extendable"] = {{"context", c.non_extendable->context},
                             {"tuple", tuple_to_digits(c.non_extendable->tuple)}};
      break;
    case Level::strongly_contextual:
      if (!c.parity_rows.empty())
        w["rows"] = c.parity_rows;
      else
        w["exhausted_context"] = *c.exhausted_context;
      break;
  }
  j["witness"] = std::move(w);
  return j;
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ctxbundle
