#include "reformine/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace reformine {

namespace {

[[noreturn]] void graphfail(std::string msg) {
  throw Error(ErrorKind::Graph, std::move(msg));
}

void emit(const NodePtr& n, GraphDoc& doc) {
  int id = static_cast<int>(doc.vertices.size());
  doc.vertices.push_back({id, node_token(*n) + "#" + std::string(kind_tag(*n))});
  for (std::size_t i = 0; i < n->children.size(); ++i) {
    int child_id = static_cast<int>(doc.vertices.size());
    doc.edges.push_back({static_cast<int>(doc.edges.size()), id, child_id,
                         static_cast<int>(i) + 1});
    emit(n->children[i], doc);
  }
}

// Escape for double-quoted string literals (shared by the exchange and
// Graphviz formats).
std::string quoted(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

struct LabelDecoder {
  // Fill kind and payload of `n` from a "token#Tag" label; returns false if
  // the label names no known construct.
  static bool decode(const std::string& token, const std::string& tag, Node& n) {
    if (tag == "Node") return set(n, Kind::Root, token == "root");
    if (tag == "FindStatement") return set(n, Kind::Find, token == "find");
    if (tag == "GivenStatement") return set(n, Kind::Given, token == "given");
    if (tag == "LettingStatement") return set(n, Kind::Letting, token == "letting");
    if (tag == "WhereStatement") return set(n, Kind::Where, token == "where");
    if (tag == "SuchThatStatement") return set(n, Kind::SuchThat, token == "such that");
    if (tag == "ObjectiveStatement") {
      n.kind = Kind::Objective;
      if (token == "minimising") n.dir = ObjDir::Minimising;
      else if (token == "maximising") n.dir = ObjDir::Maximising;
      else return false;
      return true;
    }
    if (tag == "DecisionVariable") return named(n, Kind::DecisionVar, token);
    if (tag == "Parameter") return named(n, Kind::Parameter, token);
    if (tag == "BinderVariable") return named(n, Kind::BinderVar, token);
    if (tag == "ReferenceToDomain") return named(n, Kind::DomainRef, token);
    if (tag == "IntDomain") return set(n, Kind::IntDomain, token == "int");
    if (tag == "BoolDomain") return set(n, Kind::BoolDomain, token == "bool");
    if (tag == "RelationDomain")
      return set(n, Kind::RelationDomain, token == "set" || token == "relation");
    if (tag == "SizeAttribute") return set(n, Kind::SizeAttr, token == "size");
    if (tag == "MinSizeAttribute") return set(n, Kind::MinSizeAttr, token == "minSize");
    if (tag == "MaxSizeAttribute") return set(n, Kind::MaxSizeAttr, token == "maxSize");
    if (tag == "Integer") {
      n.kind = Kind::IntLit;
      const char* first = token.data();
      const char* last = first + token.size();
      auto [ptr, ec] = std::from_chars(first, last, n.ival);
      return ec == std::errc() && ptr == last && !token.empty();
    }
    if (tag == "Boolean") {
      n.kind = Kind::BoolLit;
      n.bval = token == "true";
      return token == "true" || token == "false";
    }
    if (tag == "Reference") return ref(n, RefTarget::Unresolved, token);
    if (tag == "ReferenceToDecisionVariable")
      return ref(n, RefTarget::DecisionVariable, token);
    if (tag == "ReferenceToParameter") return ref(n, RefTarget::Parameter, token);
    if (tag == "ReferenceToBinder") return ref(n, RefTarget::Binder, token);
    if (tag == "UnaryExpression") {
      n.kind = Kind::Unary;
      for (UnaryOp op : {UnaryOp::Neg, UnaryOp::Not, UnaryOp::ToInt, UnaryOp::Card})
        if (token == unary_op_token(op)) {
          n.uop = op;
          return true;
        }
      return false;
    }
    if (tag == "BinaryExpression") {
      n.kind = Kind::Binary;
      for (int i = 0; i <= static_cast<int>(BinaryOp::SubsetEq); ++i) {
        BinaryOp op = static_cast<BinaryOp>(i);
        if (token == binary_op_token(op)) {
          n.bop = op;
          return true;
        }
      }
      return false;
    }
    if (tag == "Quantifier") {
      n.kind = Kind::Quantifier;
      for (QuantKind q : {QuantKind::ForAll, QuantKind::Exists, QuantKind::Sum})
        if (token == quant_token(q)) {
          n.quant = q;
          return true;
        }
      return false;
    }
    if (tag == "TupleLiteral") return set(n, Kind::TupleLit, token == "tuple");
    if (tag == "RelationLiteral")
      return set(n, Kind::RelationLit, token == "set" || token == "relation");
    return false;
  }

 private:
  static bool set(Node& n, Kind k, bool token_ok) {
    n.kind = k;
    return token_ok;
  }
  static bool named(Node& n, Kind k, const std::string& token) {
    n.kind = k;
    n.name = token;
    return !token.empty();
  }
  static bool ref(Node& n, RefTarget t, const std::string& token) {
    n.kind = Kind::Reference;
    n.target = t;
    n.name = token;
    return !token.empty();
  }
};

struct TreeBuilder {
  std::map<int, const GraphVertex*> vertex_by_id;
  std::map<int, std::vector<const GraphEdge*>> children_of;

  NodePtr build(int id) {
    const std::string& label = vertex_by_id.at(id)->label;
    auto hash = label.find('#');
    if (hash == std::string::npos)
      graphfail("label " + quoted(label) + " of vertex " + std::to_string(id) +
                " has no '#' tag separator");
    Node n;
    if (!LabelDecoder::decode(label.substr(0, hash), label.substr(hash + 1), n))
      graphfail("unknown label " + quoted(label) + " at vertex " + std::to_string(id));
    auto it = children_of.find(id);
    if (it != children_of.end()) {
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        const GraphEdge* e = it->second[i];
        if (e->label != static_cast<int>(i) + 1)
          graphfail("child ordinals of vertex " + std::to_string(id) +
                    " are not contiguous from 1");
        n.children.push_back(build(e->target));
      }
    }
    if (n.kind == Kind::RelationLit && !n.children.empty()) {
      const Node& row = *n.children.front();
      n.rel_arity =
          row.kind == Kind::TupleLit ? static_cast<int>(row.children.size()) : 1;
    }
    return std::make_shared<const Node>(std::move(n));
  }
};

}  // namespace

GraphDoc to_graph(const Ast& spec) {
  GraphDoc doc;
  emit(spec, doc);
  return doc;
}

Ast from_graph(const GraphDoc& doc) {
  if (doc.vertices.empty()) graphfail("graph has no vertices");

  TreeBuilder builder;
  for (const GraphVertex& v : doc.vertices) {
    if (!builder.vertex_by_id.emplace(v.id, &v).second)
      graphfail("duplicate vertex id " + std::to_string(v.id));
  }
  std::set<int> edge_ids;
  std::map<int, int> parent_count;
  for (const GraphEdge& e : doc.edges) {
    if (!edge_ids.insert(e.id).second)
      graphfail("duplicate edge id " + std::to_string(e.id));
    if (!builder.vertex_by_id.count(e.source))
      graphfail("edge " + std::to_string(e.id) + " leaves unknown vertex " +
                std::to_string(e.source));
    if (!builder.vertex_by_id.count(e.target))
      graphfail("edge " + std::to_string(e.id) + " enters unknown vertex " +
                std::to_string(e.target));
    if (++parent_count[e.target] > 1)
      graphfail("vertex " + std::to_string(e.target) + " has more than one parent");
    builder.children_of[e.source].push_back(&e);
  }

  int root = 0;
  int root_count = 0;
  for (const GraphVertex& v : doc.vertices) {
    if (!parent_count.count(v.id)) {
      root = v.id;
      ++root_count;
    }
  }
  if (root_count != 1)
    graphfail(root_count == 0
                  ? "graph is not a tree: every vertex has a parent"
                  : "graph is not a tree: " + std::to_string(root_count) +
                        " parentless vertices");

  for (auto& [id, edges] : builder.children_of) {
    (void)id;
    std::sort(edges.begin(), edges.end(),
              [](const GraphEdge* a, const GraphEdge* b) { return a->label < b->label; });
  }

  NodePtr tree = builder.build(root);
  if (count_nodes(tree) != doc.vertices.size())
    graphfail("graph is not a tree: some vertices are unreachable from the root");

  try {
    return validate(tree);
  } catch (const Error& e) {
    graphfail("decoded tree is not a valid specification: " + std::string(e.what()));
  }
}

std::string to_gp2(const GraphDoc& doc) {
  std::string out = "[ ";
  for (const GraphVertex& v : doc.vertices)
    out += "(" + std::to_string(v.id) + ", " + quoted(v.label) + ") ";
  out += "| ";
  for (const GraphEdge& e : doc.edges)
    out += "(" + std::to_string(e.id) + ", " + std::to_string(e.source) + ", " +
           std::to_string(e.target) + ", " + std::to_string(e.label) + ") ";
  out += "]";
  return out;
}

std::string to_dot(const GraphDoc& doc) {
  std::string out = "digraph spec {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const GraphVertex& v : doc.vertices)
    out += "  v" + std::to_string(v.id) + " [label=" + quoted(v.label) + "];\n";
  for (const GraphEdge& e : doc.edges)
    out += "  v" + std::to_string(e.source) + " -> v" + std::to_string(e.target) +
           " [label=\"" + std::to_string(e.label) + "\"];\n";
  out += "}\n";
  return out;
}

std::string to_graph_json(const GraphDoc& doc) {
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::ordered_json::array();
  for (const GraphVertex& v : doc.vertices)
    j["vertices"].push_back({{"id", v.id}, {"label", v.label}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const GraphEdge& e : doc.edges)
    j["edges"].push_back({{"id", e.id},
                          {"source", e.source},
                          {"target", e.target},
                          {"label", e.label}});
  return j.dump(2);
}

GraphDoc graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    graphfail("invalid graph JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges") ||
      !j["vertices"].is_array() || !j["edges"].is_array())
    graphfail("graph JSON must be an object with vertex and edge arrays");
  GraphDoc doc;
  for (const auto& v : j["vertices"]) {
    if (!v.is_object() || !v.contains("id") || !v.contains("label") ||
        !v["id"].is_number_integer() || !v["label"].is_string())
      graphfail("graph vertices need an integer id and a string label");
    doc.vertices.push_back({v["id"].get<int>(), v["label"].get<std::string>()});
  }
  for (const auto& e : j["edges"]) {
    if (!e.is_object())
      graphfail("graph edges need integer id, source, target, and label");
    for (const char* key : {"id", "source", "target", "label"})
      if (!e.contains(key) || !e[key].is_number_integer())
        graphfail("graph edges need integer id, source, target, and label");
    doc.edges.push_back({e["id"].get<int>(), e["source"].get<int>(),
                         e["target"].get<int>(), e["label"].get<int>()});
  }
  return doc;
}

}  // namespace reformine
