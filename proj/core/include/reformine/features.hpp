#pragma once

#include <string>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

// ============================================================
// Structural feature vectors over specification trees
// ============================================================
//
// A specification maps to a fixed-order real vector describing its
// shape only: how many nodes of each grammatical kind it contains,
// how deep and how bushy the tree is, and how many quantifiers,
// constraints, and decision-variable statements it declares.  The
// vector never looks at identifier spellings, so renaming decision
// variables, parameters, or binders leaves it unchanged.
//
// Layout (see feature_names() for the authoritative order):
//   * one slot per node kind below the root, in declaration order;
//   * "depth"            — longest root-to-leaf path, counted in edges;
//   * "node-count"       — total tree size including the root;
//   * "mean-branching"   — edges divided by internal (non-leaf) nodes,
//                          0 for a leaf-only tree;
//   * "max-branching"    — widest child list anywhere in the tree;
//   * "quantifier-count" — quantifier expressions;
//   * "constraint-count" — top-level conjuncts across all constraint
//                          statements;
//   * "find-count"       — find statements.

// The labels of the feature dimensions, in vector order.
const std::vector<std::string>& feature_names();

// Map a specification to its feature vector.  Deterministic and
// invariant under identifier renaming; every entry is >= 0.
std::vector<double> featurize(const Ast& spec);

// Euclidean distance between `a` and `b` after normalizing each
// dimension by its maximum over the two vectors (dimensions that are
// zero in both contribute nothing).  Symmetric, zero on identical
// vectors, and satisfies the triangle inequality for vectors
// normalized over one shared corpus.
//
// Errors: Error(ErrorKind::Config) when the dimensions differ.
double feature_distance(const std::vector<double>& a, const std::vector<double>& b);

// All pairwise distances over one corpus, normalizing each dimension
// by its maximum over the whole corpus (so the matrix is one
// consistent geometry).  Result is square, symmetric, with a zero
// diagonal.
//
// Errors: Error(ErrorKind::Config) when vectors have unequal dimensions.
std::vector<std::vector<double>> pairwise_distances(
    const std::vector<std::vector<double>>& vectors);

// CSV with header "spec,<feature names...>" and one row per labelled
// vector.  Numbers are printed with up to ten significant digits.
std::string features_csv(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows);

// CSV distance matrix: header "spec,<labels...>", then one row per
// label with the distances from pairwise_distances.
std::string distances_csv(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix);

}  // namespace reformine
