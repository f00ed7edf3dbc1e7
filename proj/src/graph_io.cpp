#include <json.hpp>

#include "nexus/errors.hpp"
#include "nexus/expansion.hpp"

namespace nexus {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json tuple_json(const Tuple& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : t) arr.push_back(c.name());
  return arr;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string render_json(const ExpansionGraph& g) {
  ordered_json doc;
  doc["arity"] = g.arity;
  doc["nodes"] = ordered_json::array();
  for (const auto& node : g.nodes) {
    ordered_json n;
    n["id"] = node.id;
    n["formula"] = render_formula(node.formula);
    n["direct_instances"] = ordered_json::array();
    for (const auto& t : node.direct_instances) n["direct_instances"].push_back(tuple_json(t));
    n["is_source"] = node.is_source;
    doc["nodes"].push_back(std::move(n));
  }
  doc["arcs"] = ordered_json::array();
  for (const auto& [a, b] : g.arcs) doc["arcs"].push_back({a, b});
  if (g.partial) doc["partial"] = true;
  return doc.dump(2) + "\n";
}

std::string render_dot(const ExpansionGraph& g) {
  std::string out = "digraph expansion {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& node : g.nodes) {
    std::string instances;
    for (const auto& t : node.direct_instances) {
      if (!instances.empty()) instances += ", ";
      instances += to_string(t);
    }
    out += "  n" + std::to_string(node.id) + " [label=\"" + dot_escape(render_formula(node.formula)) +
           "\\n{" + dot_escape(instances) + "}\"" + (node.is_source ? ", peripheries=2" : "") + "];\n";
  }
  for (const auto& [a, b] : g.arcs) out += "  n" + std::to_string(a) + " -> n" + std::to_string(b) + ";\n";
  return out + "}\n";
}

}  // namespace

std::string export_graph(const ExpansionGraph& g, GraphFormat format) {
  return format == GraphFormat::json ? render_json(g) : render_dot(g);
}

ExpansionGraph parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid graph JSON: ") + e.what());
  }
  try {
    ExpansionGraph g;
    g.arity = doc.at("arity").get<std::size_t>();
    g.partial = doc.value("partial", false);
    bool have_source = false;
    for (const auto& n : doc.at("nodes")) {
      ExpansionGraph::Node node{n.at("id").get<std::size_t>(), parse_formula(n.at("formula").get<std::string>()),
                                {}, n.at("is_source").get<bool>()};
      if (node.id != g.nodes.size()) throw ParseError("graph node ids must be 0..n-1 in order");
      if (node.formula.arity() != g.arity) throw ParseError("node formula arity differs from graph arity");
      for (const auto& t : n.at("direct_instances")) {
        Tuple tup;
        for (const auto& c : t) tup.push_back(Term::constant(c.get<std::string>()));
        if (tup.size() != g.arity) throw ParseError("direct instance arity differs from graph arity");
        node.direct_instances.insert(std::move(tup));
      }
      if (node.is_source) {
        if (have_source) throw ParseError("graph has two source nodes");
        have_source = true;
        g.source = node.id;
      }
      g.nodes.push_back(std::move(node));
    }
    if (!have_source) throw ParseError("graph has no source node");
    for (const auto& arc : doc.at("arcs")) {
      auto a = arc.at(0).get<std::size_t>(), b = arc.at(1).get<std::size_t>();
      if (arc.size() != 2 || a >= g.nodes.size() || b >= g.nodes.size())
        throw ParseError("malformed arc");
      g.arcs.emplace_back(a, b);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph JSON does not match the schema: ") + e.what());
  }
}

}  // namespace nexus
