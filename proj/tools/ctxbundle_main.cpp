// ctxbundle — generate, classify and draw sheaf-theoretic empirical models.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxbundle/io.hpp"
#include "ctxbundle/presets.hpp"
#include "ctxbundle/render.hpp"
#include "ctxbundle/solver.hpp"

namespace {

using namespace ctxbundle;

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitIo = 74;

constexpr int kExitLogical = 10;
constexpr int kExitStrong = 20;

ParsedModelFile parse_file(const std::string& path, bool lenient) {
  ParsedModelFile file = parse_model_file(read_json_file(path), !lenient);
  for (const auto& w : file.warnings) std::cerr << "warning: " << w << "\n";
  return file;
}

std::string assignment_line(const Scenario& s, const std::map<std::string, int>& a) {
  std::string line;
  for (const auto& o : s.observables) {
    if (!line.empty()) line += ' ';
    line += o.name + "=" + std::to_string(a.at(o.name));
  }
  return line;
}

GlobalAssignment parse_highlight(const std::string& text) {
  GlobalAssignment g;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (token.size() < 2 || !std::isdigit(static_cast<unsigned char>(token.back())))
      throw std::invalid_argument("highlight token \"" + token +
                                  "\" is not of the form NAMEdigit (e.g. X_A1)");
    g.assignment[token.substr(0, token.size() - 1)] = token.back() - '0';
  }
  if (g.assignment.empty()) throw std::invalid_argument("empty highlight assignment");
  return g;
}

int run_gen(const std::string& preset_name, const std::string& input,
            const std::string& output, bool lenient) {
  if (!preset_name.empty()) {
    Preset p = make_preset(preset_name);
    write_json_file(output, model_to_json(p.model, p.notes, preset_name));
    std::cout << "wrote " << output << " (preset " << preset_name << ", "
              << p.scenario.contexts.size() << " contexts)\n";
    return 0;
  }
  ParsedModelFile file = parse_file(input, lenient);
  std::optional<StateVector> state = file.state;
  if (!state && file.preset) state = make_preset(*file.preset).state;
  if (!state)
    throw std::invalid_argument(
        "input carries neither \"amplitudes\" nor a quantum \"preset\" to generate from");
  EmpiricalModel model = model_from_state(file.scenario, *state);
  write_json_file(output, model_to_json(model, file.notes, file.preset));
  std::cout << "wrote " << output << "\n";
  return 0;
}

int run_classify(const std::string& input, const std::string& output, bool lenient) {
  ParsedModelFile file = parse_file(input, lenient);
  EmpiricalModel model = model_from_file(file);
  for (const auto& w : model.warnings) std::cout << "warning: " << w << "\n";
  SupportModel sm = support_of(model);
  Classification c = classify(sm);

  std::cout << "level: " << to_string(c.level) << "\n";
  switch (c.level) {
    case Level::noncontextual:
      std::cout << "certificate: every supported section extends; "
                << c.extensions.size() << " verified extensions\n";
      break;
    case Level::logically_contextual:
      std::cout << "certificate: section " << c.non_extendable->context << ":"
                << tuple_to_digits(c.non_extendable->tuple) << " has no extension\n";
      break;
    case Level::strongly_contextual:
      if (!c.parity_rows.empty()) {
        std::cout << "certificate: parity contradiction; rows";
        for (const auto& r : c.parity_rows) std::cout << ' ' << r;
        std::cout << " cancel on the left and sum to 1 on the right\n";
      } else {
        std::cout << "certificate: exhaustion; no supported section of "
                  << *c.exhausted_context << " extends\n";
      }
      break;
  }
  for (const auto& n : file.notes) std::cout << "note: " << n << "\n";

  if (!output.empty()) {
    json j = model_to_json(model, file.notes, file.preset);
    j["certificate"] = certificate_to_json(c);
    write_json_file(output, j);
  }
  if (c.level == Level::logically_contextual) return kExitLogical;
  if (c.level == Level::strongly_contextual) return kExitStrong;
  return 0;
}

int run_parity(const std::string& input, bool lenient) {
  ParsedModelFile file = parse_file(input, lenient);
  SupportModel sm = support_of(model_from_file(file));
  auto ps = build_parity_system(sm);
  if (!ps) {
    std::cout << "not a parity model: some context support is neither a full parity class "
                 "nor the full outcome set\n";
    return 0;
  }
  for (const auto& row : ps->rows) {
    std::cout << row.context << ": ";
    bool first = true;
    for (std::size_t b = 0; b < ps->variables.size(); ++b) {
      if (!(row.mask & (std::uint64_t{1} << b))) continue;
      if (!first) std::cout << " + ";
      std::cout << ps->variables[b];
      first = false;
    }
    std::cout << " = " << row.rhs << "\n";
  }
  ParityOutcome po = parity_obstruction(*ps);
  if (po.consistent) {
    std::cout << "verdict: consistent; solution " << assignment_line(sm.scenario, po.solution)
              << "\n";
  } else {
    std::cout << "verdict: contradiction; rows";
    for (const auto& r : po.contradiction_rows) std::cout << ' ' << r;
    std::cout << " sum to 0 = 1\n";
  }
  return 0;
}

int run_trace(const std::string& input, const std::string& seed_text,
              const std::string& output, bool lenient) {
  ParsedModelFile file = parse_file(input, lenient);
  SupportModel sm = support_of(model_from_file(file));

  auto colon = seed_text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("seed must be CONTEXT:TUPLE, e.g. C1:111");
  Section seed = section_of(sm.scenario, seed_text.substr(0, colon),
                            digits_to_tuple(seed_text.substr(colon + 1)));

  ExtendOutcome out = extend_section(sm, seed, true);
  write_text_file(output, emit_trace(*out.trace, sm.scenario));
  if (out.extension) {
    std::cout << "extension found: " << assignment_line(sm.scenario, out.extension->assignment)
              << "\n";
  } else {
    std::cout << "no extension: every branch ends in a contradiction ("
              << out.trace->count(SearchTrace::NodeKind::facet) << " facets explored)\n";
  }
  std::cout << "wrote " << output << "\n";
  return 0;
}

int run_oracle(const std::string& input, bool lenient) {
  ParsedModelFile file = parse_file(input, lenient);
  SupportModel sm = support_of(model_from_file(file));
  std::vector<GlobalAssignment> all = enumerate_global_sections(sm);
  std::cout << "global sections: " << all.size() << "\n";
  for (const auto& g : all) std::cout << assignment_line(sm.scenario, g.assignment) << "\n";
  return 0;
}

int run_render(const std::string& input, const std::string& highlight_text,
               const std::string& output, bool lenient) {
  ParsedModelFile file = parse_file(input, lenient);
  SupportModel sm = support_of(model_from_file(file));

  std::optional<GlobalAssignment> highlight;
  if (!highlight_text.empty()) highlight = parse_highlight(highlight_text);

  BundleFormat format;
  if (output.size() > 4 && output.substr(output.size() - 4) == ".svg")
    format = BundleFormat::svg;
  else if (output.size() > 4 && output.substr(output.size() - 4) == ".tex")
    format = BundleFormat::latex_picture;
  else
    throw std::invalid_argument("output must end in .svg or .tex");

  write_text_file(output, emit_bundle(sm, highlight, format));
  std::cout << "wrote " << output << "\n";
  return 0;
}

int run_lemma() {
  const std::vector<std::string> words = {"XXX", "XYY", "YXY", "YYX"};
  std::cout << "sign patterns over (XXX, XYY, YXY, YYX), projectors (1 + s W)/2:\n";
  for (int m = 0; m < 16; ++m) {
    std::vector<PauliWord> ws;
    std::string pattern;
    int minus = 0;
    for (int i = 0; i < 4; ++i) {
      int sign = (m >> (3 - i)) & 1 ? -1 : +1;
      if (sign < 0) ++minus;
      pattern += sign < 0 ? '-' : '+';
      ws.push_back(PauliWord{sign, words[static_cast<std::size_t>(i)]});
    }
    ProductCheck check = projector_product_check(ws);
    std::cout << pattern << "  " << (minus % 2 ? "odd " : "even") << "  ";
    switch (check.kind) {
      case ProductCheck::Kind::zero: std::cout << "zero product\n"; break;
      case ProductCheck::Kind::rank_one:
        std::cout << "rank-one projector (trace " << std::real(check.trace) << ")\n";
        break;
      case ProductCheck::Kind::other:
        std::cout << "other (rank " << check.rank << ", trace " << std::real(check.trace)
                  << ")\n";
        break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sheaf-theoretic empirical models: generation, contextuality "
               "certificates and bundle diagrams"};
  app.require_subcommand(1);
  bool lenient = false;
  app.add_flag("--lenient", lenient, "warn about unknown file keys instead of rejecting");

  std::string preset_name, input, output, seed_text, highlight_text;

  auto* gen = app.add_subcommand("gen", "generate a model file from a preset or a scenario");
  gen->add_option("--preset", preset_name, "bell, pr-box, ghz-ab or cluster-ring-5");
  gen->add_option("input", input, "scenario file with a state spec");
  gen->add_option("-o,--output", output, "output model file")->required();

  auto* classify_cmd = app.add_subcommand("classify", "decide the contextuality class");
  classify_cmd->add_option("input", input, "model file")->required();
  classify_cmd->add_option("-o,--output", output, "write model + certificate here");

  auto* parity = app.add_subcommand("parity", "print the GF(2) parity system and its verdict");
  parity->add_option("input", input, "model file")->required();

  auto* trace = app.add_subcommand("trace", "export an extension search tree as DOT");
  trace->add_option("input", input, "model file")->required();
  trace->add_option("--seed", seed_text, "seed section, e.g. C1:111")->required();
  trace->add_option("-o,--output", output, "output .dot file")->required();

  auto* oracle = app.add_subcommand("oracle", "enumerate all global sections by brute force");
  oracle->add_option("input", input, "model file")->required();

  auto* render = app.add_subcommand("render", "draw the bundle diagram (SVG or LaTeX picture)");
  render->add_option("input", input, "model file")->required();
  render->add_option("--highlight", highlight_text,
                     "global assignment to mark, e.g. \"X_A1 X_B1 Z_A0 Z_B0\"");
  render->add_option("-o,--output", output, "output .svg or .tex file")->required();

  auto* lemma = app.add_subcommand(
      "lemma", "sweep all 16 sign patterns over (XXX, XYY, YXY, YYX) projectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (preset_name.empty() == input.empty())
        throw std::invalid_argument("gen needs exactly one of --preset or an input file");
      return run_gen(preset_name, input, output, lenient);
    }
    if (classify_cmd->parsed()) return run_classify(input, output, lenient);
    if (parity->parsed()) return run_parity(input, lenient);
    if (trace->parsed()) return run_trace(input, seed_text, output, lenient);
    if (oracle->parsed()) return run_oracle(input, lenient);
    if (render->parsed()) return run_render(input, highlight_text, output, lenient);
    if (lemma->parsed()) return run_lemma();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::string what = e.what();
    return what.rfind("cannot open", 0) == 0 ? kExitNoInput : kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
