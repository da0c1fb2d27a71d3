#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "appraisal/errors.hpp"

namespace appraisal {

// Zero-diagonal row-stochastic weight matrix of inter-personal influence.
// Entry (i,j) is the weight individual i assigns to outgoing neighbor j.
// Immutable after validation.
class InteractionMatrix {
 public:
  static constexpr double kDefaultTol = 1e-9;

  // Validates and wraps `entries`. No renormalization is performed: the input
  // must already have zero diagonal, nonnegative entries, and unit row sums
  // within `tol`. Throws NegativeEntry, NonzeroDiagonal, RowSumViolation,
  // InvalidParameter (n < 2 or tol <= 0).
  static InteractionMatrix validated(Eigen::MatrixXd entries, double tol = kDefaultTol);

  int n() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double entry(int i, int j) const { return weights_(i, j); }

  // True iff every column also sums to 1 within the validation tolerance.
  bool doubly_stochastic() const { return doubly_stochastic_; }

  // Minimum over the nonzero entries; positive for every valid matrix.
  double gamma() const { return gamma_; }

  // max_j |colsum_j - 1|, kept so the predicate can be re-evaluated at a
  // tolerance other than the one used at construction.
  double column_sum_deviation() const { return column_dev_; }

 private:
  InteractionMatrix(Eigen::MatrixXd w, bool ds, double gamma, double col_dev)
      : weights_(std::move(w)), doubly_stochastic_(ds), gamma_(gamma), column_dev_(col_dev) {}

  Eigen::MatrixXd weights_;
  bool doubly_stochastic_;
  double gamma_;
  double column_dev_;
};

// Simple digraph without self-loops; arc (i,j) means j is an outgoing
// neighbor of i. Adjacency lists are kept sorted and duplicate-free.
class DirectedGraph {
 public:
  explicit DirectedGraph(int n);

  int n() const { return static_cast<int>(adj_.size()); }
  int arc_count() const { return arc_count_; }

  void add_arc(int i, int j);
  bool has_arc(int i, int j) const;
  const std::vector<int>& out_neighbors(int i) const { return adj_[i]; }
  int out_degree(int i) const { return static_cast<int>(adj_[i].size()); }

  // Arc-set union with another graph of the same vertex count.
  void merge(const DirectedGraph& other);

  std::vector<std::pair<int, int>> arcs() const;

 private:
  std::vector<std::vector<int>> adj_;
  int arc_count_ = 0;
};

// Arc (i,j) iff c_ij > 0.
DirectedGraph support_graph(const InteractionMatrix& C);

// Number of strongly connected components (Tarjan).
int scc_count(const DirectedGraph& g);
bool strongly_connected(const DirectedGraph& g);

// A time-stamped self-appraisal vector on the simplex.
struct AppraisalState {
  double t = 0.0;
  Eigen::VectorXd x;
  double residual = 0.0;  // pre-clamp deviation of the raw input
};

// Accepts x with sum within tol of 1 and every entry in [-tol, 1+tol];
// entries are clamped into [0,1] and the pre-clamp residual recorded.
// Throws NotOnSimplex otherwise.
AppraisalState simplex_state(const Eigen::VectorXd& x, double t, double tol = 1e-9);

// Vertex e_i and the barycenter (1/n)*1, both exact.
AppraisalState vertex_state(int i, int n, double t = 0.0);
AppraisalState barycenter_state(int n, double t = 0.0);

// Extremes of a state: h = max_i x_i, l = min_i x_i, v = h - l.
struct Extremes {
  double h = 0.0;
  double l = 0.0;
  double v = 0.0;
};

Extremes extremes(const Eigen::VectorXd& x);

}  // namespace appraisal
