#ifndef REFORMINE_GRAPH_HPP
#define REFORMINE_GRAPH_HPP

#include <string>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

// A specification as an ordered labelled graph: one vertex per tree node,
// labelled "token#Tag"; one edge per parent-child link, labelled with the
// 1-based child ordinal. Exported vertex and edge ids follow pre-order.
struct GraphVertex {
  int id = 0;
  std::string label;
};

struct GraphEdge {
  int id = 0;
  int source = 0;
  int target = 0;
  int label = 0;  // 1-based child ordinal
};

struct GraphDoc {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
};

GraphDoc to_graph(const Ast& spec);

// Rebuild a specification from a graph document. Throws
// Error(ErrorKind::Graph) when the document is not a single rooted tree,
// a label does not decode to a known construct, some vertex's child
// ordinals are not exactly 1..k, or the decoded tree is not a valid
// specification.
Ast from_graph(const GraphDoc& doc);

// Rule-bank exchange text: vertices, a separator, then edges, each edge
// carrying (id, source, target, ordinal). Single line, no trailing newline.
std::string to_gp2(const GraphDoc& doc);

// Graphviz rendering of the same document.
std::string to_dot(const GraphDoc& doc);

// JSON round-trip.
std::string to_graph_json(const GraphDoc& doc);
GraphDoc graph_from_json(const std::string& text);

}  // namespace reformine

#endif  // REFORMINE_GRAPH_HPP
