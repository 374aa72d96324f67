#include "reformine/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace reformine {

namespace {

// One slot per node kind other than the root, in enum declaration
// order, followed by the shape summaries.
constexpr std::size_t kKindSlots = 24;

const char* const kNames[] = {
    "find-statements",
    "given-statements",
    "letting-statements",
    "where-statements",
    "such-that-statements",
    "objective-statements",
    "decision-variables",
    "parameters",
    "binder-variables",
    "int-domains",
    "bool-domains",
    "relation-domains",
    "size-attributes",
    "min-size-attributes",
    "max-size-attributes",
    "domain-references",
    "integer-literals",
    "boolean-literals",
    "references",
    "unary-expressions",
    "binary-expressions",
    "quantifiers",
    "tuple-literals",
    "relation-literals",
    "depth",
    "node-count",
    "mean-branching",
    "max-branching",
    "quantifier-count",
    "constraint-count",
    "find-count",
};

struct Shape {
  std::int64_t nodes = 0;
  std::int64_t edges = 0;
  std::int64_t internal = 0;
  std::int64_t max_branch = 0;
  std::int64_t max_depth = 0;
};

void walk(const Node& n, std::int64_t depth, std::vector<double>& v, Shape& s) {
  ++s.nodes;
  s.max_depth = std::max(s.max_depth, depth);
  if (n.kind != Kind::Root) {
    v[static_cast<std::size_t>(n.kind) - 1] += 1.0;
  }
  const auto arity = static_cast<std::int64_t>(n.children.size());
  if (arity > 0) {
    ++s.internal;
    s.edges += arity;
    s.max_branch = std::max(s.max_branch, arity);
  }
  for (const NodePtr& c : n.children) walk(*c, depth + 1, v, s);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void check_dimension(const std::vector<double>& v, std::size_t dim) {
  if (v.size() != dim) {
    throw Error(ErrorKind::Config, "feature vectors must share one dimension");
  }
}

// Per-dimension maxima over a corpus; dimensions at zero everywhere
// keep a scale of 1 so they divide out to zero.
std::vector<double> corpus_scale(const std::vector<const std::vector<double>*>& corpus,
                                 std::size_t dim) {
  std::vector<double> scale(dim, 0.0);
  for (const auto* v : corpus) {
    for (std::size_t i = 0; i < dim; ++i) scale[i] = std::max(scale[i], (*v)[i]);
  }
  for (double& s : scale) {
    if (s == 0.0) s = 1.0;
  }
  return scale;
}

double scaled_distance(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<double>& scale) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / scale[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names(std::begin(kNames), std::end(kNames));
  return names;
}

std::vector<double> featurize(const Ast& spec) {
  std::vector<double> v(feature_names().size(), 0.0);
  Shape s;
  walk(*spec, 0, v, s);

  double constraints = 0.0;
  double finds = 0.0;
  for (const NodePtr& stmt : spec->children) {
    if (stmt->kind == Kind::SuchThat) {
      constraints += static_cast<double>(stmt->children.size());
    } else if (stmt->kind == Kind::Find) {
      finds += 1.0;
    }
  }

  std::size_t i = kKindSlots;
  v[i++] = static_cast<double>(s.max_depth);
  v[i++] = static_cast<double>(s.nodes);
  v[i++] = s.internal == 0
               ? 0.0
               : static_cast<double>(s.edges) / static_cast<double>(s.internal);
  v[i++] = static_cast<double>(s.max_branch);
  v[i++] = v[static_cast<std::size_t>(Kind::Quantifier) - 1];
  v[i++] = constraints;
  v[i++] = finds;
  return v;
}

double feature_distance(const std::vector<double>& a, const std::vector<double>& b) {
  check_dimension(b, a.size());
  const std::vector<double> scale = corpus_scale({&a, &b}, a.size());
  return scaled_distance(a, b, scale);
}

std::vector<std::vector<double>> pairwise_distances(
    const std::vector<std::vector<double>>& vectors) {
  const std::size_t n = vectors.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  if (n == 0) return out;
  const std::size_t dim = vectors.front().size();
  std::vector<const std::vector<double>*> corpus;
  corpus.reserve(n);
  for (const auto& v : vectors) {
    check_dimension(v, dim);
    corpus.push_back(&v);
  }
  const std::vector<double> scale = corpus_scale(corpus, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = scaled_distance(vectors[i], vectors[j], scale);
      out[i][j] = d;
      out[j][i] = d;
    }
  }
  return out;
}

std::string features_csv(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::string out = "spec";
  for (const std::string& name : feature_names()) {
    out += ",";
    out += name;
  }
  out += "\n";
  for (const auto& [label, v] : rows) {
    check_dimension(v, feature_names().size());
    out += label;
    for (double x : v) {
      out += ",";
      out += format_number(x);
    }
    out += "\n";
  }
  return out;
}

std::string distances_csv(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix) {
  if (labels.size() != matrix.size()) {
    throw Error(ErrorKind::Config, "distance matrix must have one row per label");
  }
  std::string out = "spec";
  for (const std::string& label : labels) {
    out += ",";
    out += label;
  }
  out += "\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    check_dimension(matrix[i], labels.size());
    out += labels[i];
    for (double x : matrix[i]) {
      out += ",";
      out += format_number(x);
    }
    out += "\n";
  }
  return out;
}

}  // namespace reformine
