// render.hpp — bundle diagrams (SVG / LaTeX picture) and search-tree DOT export.
#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxbundle/empirical_model.hpp"
#include "ctxbundle/scenario.hpp"
#include "ctxbundle/solver.hpp"

namespace ctxbundle {

// ---------------------------------------------------------------------------
// Layout

using LayoutMap = std::map<std::string, std::pair<double, double>>;

/// Base coordinates for every observable: the declared layout hints when all
/// are present, otherwise one circle (up to 6 observables) or two concentric
/// circles split by the leading name letter (X inside, Z outside).
inline LayoutMap auto_layout(const Scenario& s) {
  ensure_valid(s);

  LayoutMap layout;
  bool all_hints = std::all_of(s.observables.begin(), s.observables.end(),
                               [](const Observable& o) { return o.layout.has_value(); });
  if (all_hints) {
    for (const auto& o : s.observables) layout[o.name] = *o.layout;
    return layout;
  }

  const std::size_t n = s.observables.size();
  if (n == 1) {
    layout[s.observables.front().name] = {0.0, 0.0};
    return layout;
  }

  auto on_circle = [&](const std::vector<std::string>& names, double radius) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(names.size());
      layout[names[k]] = {radius * std::cos(a), radius * std::sin(a)};
    }
  };

  std::vector<std::string> all;
  for (const auto& o : s.observables) all.push_back(o.name);

  if (n <= 6) {
    on_circle(all, 1.0);
    return layout;
  }

  // Two prefix classes, e.g. X_1..X_5 inside and Z_1..Z_5 outside.
  std::vector<char> class_order;
  std::map<char, std::vector<std::string>> classes;
  for (const auto& o : s.observables) {
    char c = o.name.empty() ? '?' : o.name[0];
    if (!classes.count(c)) class_order.push_back(c);
    classes[c].push_back(o.name);
  }
  if (class_order.size() == 2) {
    char inner = class_order[0];
    if (classes.count('X')) inner = 'X';
    char outer = class_order[0] == inner ? class_order[1] : class_order[0];
    on_circle(classes[inner], 0.7);
    on_circle(classes[outer], 3.5);
  } else {
    on_circle(all, 1.0);
  }
  return layout;
}

// ---------------------------------------------------------------------------
// Styling

struct DiagramSpec {
  double depth_angle_deg = 30.0;  // oblique projection of the base y axis
  double depth_scale = 0.5;
  double outcome1_height = 1.0;   // outcome 1 sits below outcome 0
  double outcome0_height = 1.6;
  double unit = 110.0;            // output units per model unit
  double margin = 40.0;
};

namespace detail {

inline std::string fmt(double v) {
  if (std::abs(v) < 5e-5) v = 0.0;  // avoid "-0.0000"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

inline std::string hsv_hex(double h, double s, double v) {
  h = std::fmod(h, 360.0) / 60.0;
  int i = static_cast<int>(h);
  double f = h - i;
  double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = v, g = t, b = p;
  switch (i % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", static_cast<int>(r * 255 + 0.5),
                static_cast<int>(g * 255 + 0.5), static_cast<int>(b * 255 + 0.5));
  return buf;
}

}  // namespace detail

/// Fixed cycle (violet, teal, orange, blue, pink), then a deterministic hue
/// rotation.
inline std::string context_color(std::size_t index) {
  static const char* named[] = {"#800080", "#008080", "#FF8000", "#0000FF", "#FFC0CB"};
  if (index < 5) return named[index];
  return detail::hsv_hex(30.0 + 47.0 * static_cast<double>(index - 5), 0.65, 0.85);
}

// ---------------------------------------------------------------------------
// Scene graph shared by the SVG and LaTeX emitters

enum class BundleFormat { svg, latex_picture };

namespace detail {

struct ScenePoint {
  double x = 0, y = 0;
};

struct SceneElement {
  enum class Kind { segment, polygon, node, text };
  Kind kind = Kind::segment;
  std::vector<ScenePoint> pts;
  std::string color = "#000000";
  double width = 1.0;
  bool dashed = false;
  std::string cls;   // SVG class attribute
  std::string text;  // labels
};

struct Scene {
  std::vector<SceneElement> base, fibers, supports, highlights, labels;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;

  void grow(const ScenePoint& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
};

inline Scene build_scene(const SupportModel& sm, const std::optional<GlobalAssignment>& highlight,
                         const DiagramSpec& spec) {
  const Scenario& s = sm.scenario;
  ensure_valid(s);
  if (spec.outcome0_height <= spec.outcome1_height)
    throw std::invalid_argument("diagram spec needs outcome-0 level above outcome-1 level");
  for (const auto& ctx : s.contexts)
    if (ctx.observables.size() > 4)
      throw std::invalid_argument("cannot render facets of arity > 4 (context " + ctx.name +
                                  " has " + std::to_string(ctx.observables.size()) +
                                  " observables)");
  for (const auto& [name, supp] : sm.support)
    if (supp.empty()) throw std::invalid_argument("empty support for context " + name);

  LayoutMap layout = auto_layout(s);
  for (auto it = layout.begin(); it != layout.end(); ++it)
    for (auto jt = std::next(it); jt != layout.end(); ++jt)
      if (it->second == jt->second)
        throw std::invalid_argument("layout collision between " + it->first + " and " +
                                    jt->first);

  if (highlight) {
    for (const auto& o : s.observables) {
      auto it = highlight->assignment.find(o.name);
      if (it == highlight->assignment.end())
        throw std::invalid_argument("highlight assignment is not total: missing " + o.name);
      if (it->second < 0 || it->second >= o.arity)
        throw std::invalid_argument("highlight value out of range for " + o.name);
    }
  }

  const double rad = spec.depth_angle_deg * M_PI / 180.0;
  const double dx = spec.depth_scale * std::cos(rad);
  const double dy = spec.depth_scale * std::sin(rad);
  auto project = [&](const std::string& obs, double height) {
    auto [bx, by] = layout.at(obs);
    return ScenePoint{bx + dx * by, height + dy * by};
  };
  auto level = [&](const Observable& o, int outcome) {
    return spec.outcome1_height +
           (spec.outcome0_height - spec.outcome1_height) * (o.arity - 1 - outcome);
  };

  Scene sc;
  auto track = [&sc](SceneElement e, std::vector<SceneElement>& group) {
    for (const auto& p : e.pts) sc.grow(p);
    group.push_back(std::move(e));
  };

  // Base: one element per context.
  for (std::size_t i = 0; i < s.contexts.size(); ++i) {
    const Context& ctx = s.contexts[i];
    SceneElement e;
    e.cls = "base";
    for (const auto& id : ctx.observables) e.pts.push_back(project(id, 0.0));
    if (ctx.observables.size() <= 2) {
      e.kind = SceneElement::Kind::segment;
      e.color = "#000000";
      e.width = 2.0;
      if (e.pts.size() == 1) e.kind = SceneElement::Kind::node;
    } else {
      e.kind = SceneElement::Kind::polygon;
      e.color = context_color(i);
    }
    track(std::move(e), sc.base);
  }

  // Fibers: one dashed line per observable plus a labeled node per outcome.
  for (const auto& o : s.observables) {
    SceneElement line;
    line.kind = SceneElement::Kind::segment;
    line.cls = "fiber-line";
    line.color = "#888888";
    line.dashed = true;
    line.pts = {project(o.name, 0.0), project(o.name, level(o, 0))};
    track(std::move(line), sc.fibers);

    for (int j = 0; j < o.arity; ++j) {
      const ScenePoint np = project(o.name, level(o, j));
      SceneElement node;
      node.kind = SceneElement::Kind::node;
      node.cls = "fiber-node";
      node.color = "#000000";
      node.pts = {np};
      track(std::move(node), sc.fibers);

      SceneElement lab;
      lab.kind = SceneElement::Kind::text;
      lab.cls = "label";
      lab.text = std::to_string(j);
      lab.pts = {ScenePoint{np.x + 0.07, np.y + 0.04}};
      track(std::move(lab), sc.labels);
    }
  }

  // Supports and highlights: one element per supported tuple; the restriction
  // of the highlighted assignment is re-drawn on top.
  for (std::size_t i = 0; i < s.contexts.size(); ++i) {
    const Context& ctx = s.contexts[i];
    OutcomeTuple marked;
    if (highlight) {
      for (const auto& id : ctx.observables) marked.push_back(highlight->assignment.at(id));
    }
    for (const auto& tuple : sm.support.at(ctx.name)) {
      SceneElement e;
      e.cls = "support";
      e.color = context_color(i);
      e.width = 2.0;
      for (std::size_t k = 0; k < ctx.observables.size(); ++k) {
        const Observable& o = s.observable(ctx.observables[k]);
        e.pts.push_back(project(o.name, level(o, tuple[k])));
      }
      e.kind = e.pts.size() == 1   ? SceneElement::Kind::node
               : e.pts.size() == 2 ? SceneElement::Kind::segment
                                   : SceneElement::Kind::polygon;
      if (highlight && tuple == marked) {
        SceneElement h = e;
        h.cls = "highlight";
        h.width = 4.0;
        track(std::move(h), sc.highlights);
      }
      track(std::move(e), sc.supports);
    }
  }

  // Observable name labels at the base.
  for (const auto& o : s.observables) {
    SceneElement lab;
    lab.kind = SceneElement::Kind::text;
    lab.cls = "label";
    lab.text = o.name;
    ScenePoint p = project(o.name, 0.0);
    lab.pts = {ScenePoint{p.x + 0.07, p.y - 0.12}};
    track(std::move(lab), sc.labels);
  }

  return sc;
}

// ---- SVG backend ----------------------------------------------------------

inline void svg_element(std::ostringstream& out, const SceneElement& e,
                        const Scene& sc, const DiagramSpec& spec) {
  auto X = [&](const ScenePoint& p) { return fmt((p.x - sc.min_x) * spec.unit + spec.margin); };
  auto Y = [&](const ScenePoint& p) { return fmt((sc.max_y - p.y) * spec.unit + spec.margin); };
  switch (e.kind) {
    case SceneElement::Kind::segment:
      out << "<line class=\"" << e.cls << "\" x1=\"" << X(e.pts[0]) << "\" y1=\""
          << Y(e.pts[0]) << "\" x2=\"" << X(e.pts[1]) << "\" y2=\"" << Y(e.pts[1])
          << "\" stroke=\"" << e.color << "\" stroke-width=\"" << fmt(e.width) << "\"";
      if (e.dashed) out << " stroke-dasharray=\"5 4\"";
      out << "/>\n";
      break;
    case SceneElement::Kind::polygon:
      out << "<polygon class=\"" << e.cls << "\" points=\"";
      for (std::size_t k = 0; k < e.pts.size(); ++k) {
        if (k) out << ' ';
        out << X(e.pts[k]) << ',' << Y(e.pts[k]);
      }
      out << "\" fill=\"" << e.color << "\" fill-opacity=\"0.30\" stroke=\"" << e.color
          << "\" stroke-width=\"" << fmt(e.width) << "\"/>\n";
      break;
    case SceneElement::Kind::node:
      out << "<circle class=\"" << e.cls << "\" cx=\"" << X(e.pts[0]) << "\" cy=\""
          << Y(e.pts[0]) << "\" r=\"3.5\" fill=\"" << e.color << "\"/>\n";
      break;
    case SceneElement::Kind::text:
      out << "<text class=\"" << e.cls << "\" x=\"" << X(e.pts[0]) << "\" y=\"" << Y(e.pts[0])
          << "\" font-family=\"Helvetica,sans-serif\" font-size=\"13\">" << e.text
          << "</text>\n";
      break;
  }
}

inline std::string emit_svg(const Scene& sc, const DiagramSpec& spec) {
  const double w = (sc.max_x - sc.min_x) * spec.unit + 2 * spec.margin;
  const double h = (sc.max_y - sc.min_y) * spec.unit + 2 * spec.margin;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(w)
      << "\" height=\"" << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h)
      << "\">\n";
  auto group = [&](const char* id, const std::vector<SceneElement>& elems) {
    out << "<g id=\"" << id << "\">\n";
    for (const auto& e : elems) svg_element(out, e, sc, spec);
    out << "</g>\n";
  };
  group("base", sc.base);
  group("fibers", sc.fibers);
  group("supports", sc.supports);
  group("highlights", sc.highlights);
  group("labels", sc.labels);
  out << "</svg>\n";
  return out.str();
}

// ---- LaTeX picture backend --------------------------------------------------

inline std::string tex_math_label(const std::string& name) {
  auto us = name.find('_');
  if (us == std::string::npos || us + 1 >= name.size()) return name;
  return "$" + name.substr(0, us) + "_{" + name.substr(us + 1) + "}$";
}

inline std::string tex_rgb(const std::string& hex) {
  auto channel = [&](std::size_t pos) {
    return std::stoi(hex.substr(pos, 2), nullptr, 16) / 255.0;
  };
  return fmt(channel(1)) + "," + fmt(channel(3)) + "," + fmt(channel(5));
}

inline std::string emit_latex(const Scene& sc, const DiagramSpec& spec) {
  const double u = spec.unit;
  auto X = [&](const ScenePoint& p) { return fmt((p.x - sc.min_x) * u + spec.margin); };
  auto Y = [&](const ScenePoint& p) { return fmt((p.y - sc.min_y) * u + spec.margin); };
  std::ostringstream out;
  const double w = (sc.max_x - sc.min_x) * u + 2 * spec.margin;
  const double h = (sc.max_y - sc.min_y) * u + 2 * spec.margin;
  out << "% requires pict2e and xcolor\n"
      << "\\setlength{\\unitlength}{1pt}\n"
      << "\\begin{picture}(" << fmt(w) << ',' << fmt(h) << ")\n";
  auto group = [&](const char* name, const std::vector<SceneElement>& elems) {
    out << "% " << name << "\n";
    for (const auto& e : elems) {
      out << "{\\color[rgb]{" << tex_rgb(e.color) << "}";
      switch (e.kind) {
        case SceneElement::Kind::segment:
          out << "\\polyline(" << X(e.pts[0]) << ',' << Y(e.pts[0]) << ")(" << X(e.pts[1])
              << ',' << Y(e.pts[1]) << ")";
          break;
        case SceneElement::Kind::polygon:
          out << "\\polygon";
          for (const auto& p : e.pts) out << '(' << X(p) << ',' << Y(p) << ')';
          break;
        case SceneElement::Kind::node:
          out << "\\put(" << X(e.pts[0]) << ',' << Y(e.pts[0]) << "){\\circle*{3.5}}";
          break;
        case SceneElement::Kind::text:
          out << "\\put(" << X(e.pts[0]) << ',' << Y(e.pts[0]) << "){\\makebox(0,0)[lb]{"
              << tex_math_label(e.text) << "}}";
          break;
      }
      out << "}\n";
    }
  };
  group("base", sc.base);
  group("fibers", sc.fibers);
  group("supports", sc.supports);
  group("highlights", sc.highlights);
  group("labels", sc.labels);
  out << "\\end{picture}\n";
  return out.str();
}

}  // namespace detail

/// Renders the bundle diagram: base complex below, outcome fibers above,
/// one solid element per supported tuple, and the restriction of the given
/// assignment re-drawn as a highlight. Output is byte-deterministic.
inline std::string emit_bundle(const SupportModel& sm,
                               const std::optional<GlobalAssignment>& highlight,
                               BundleFormat format, const DiagramSpec& spec = {}) {
  detail::Scene sc = detail::build_scene(sm, highlight, spec);
  return format == BundleFormat::svg ? detail::emit_svg(sc, spec)
                                     : detail::emit_latex(sc, spec);
}

// ---------------------------------------------------------------------------
// Search-trace DOT export

/// Graphviz rendering of a SearchTrace: facet nodes are boxes tinted with
/// their context color, assignment nodes read "Obs↦bit" with the search
/// markers ('+', '*', '**', ...) appended.
inline std::string emit_trace(const SearchTrace& tr, const Scenario& scenario) {
  auto ctx_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < scenario.contexts.size(); ++i)
      if (scenario.contexts[i].name == name) return i;
    return scenario.contexts.size();
  };

  std::ostringstream out;
  out << "digraph search_trace {\n"
      << "rankdir=TB;\n"
      << "node [fontname=\"Helvetica\", fontsize=11];\n";
  for (std::size_t i = 0; i < tr.nodes.size(); ++i) {
    const auto& n = tr.nodes[i];
    out << 'n' << i << ' ';
    switch (n.kind) {
      case SearchTrace::NodeKind::facet: {
        std::string color = context_color(ctx_index(n.context));
        out << "[shape=box, style=filled, color=\"" << color << "\", fillcolor=\"" << color
            << "4D\", label=\"" << n.context << ':' << tuple_to_digits(n.tuple) << "\"]";
        break;
      }
      case SearchTrace::NodeKind::assign: {
        std::string marker;
        if (n.marker == -1) marker = " +";
        if (n.marker > 0) marker = " " + std::string(static_cast<std::size_t>(n.marker), '*');
        out << "[shape=none, label=\"" << n.observable << "\u21A6" << n.value << marker
            << "\"]";
        break;
      }
      case SearchTrace::NodeKind::success:
        out << "[shape=doubleoctagon, label=\"global section\"]";
        break;
      case SearchTrace::NodeKind::exhausted:
        out << "[shape=none, label=\"" << n.context << ": no compatible facet +\"]";
        break;
    }
    out << ";\n";
  }
  for (std::size_t i = 0; i < tr.nodes.size(); ++i)
    for (std::size_t c : tr.nodes[i].children) out << 'n' << i << " -> n" << c << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace ctxbundle
