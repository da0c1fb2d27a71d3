#include "appraisal/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace appraisal {

InteractionMatrix InteractionMatrix::validated(Eigen::MatrixXd entries, double tol) {
  const auto rows = entries.rows();
  if (rows != entries.cols()) {
    throw DimensionMismatch(static_cast<int>(rows), static_cast<int>(entries.cols()));
  }
  if (rows < 2) {
    throw InvalidParameter("an interaction matrix needs n >= 2");
  }
  if (!(tol > 0.0)) {
    throw InvalidParameter("validation tolerance must be positive");
  }
  const int n = static_cast<int>(rows);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (entries(i, j) < 0.0) throw NegativeEntry(i, j, entries(i, j));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (entries(i, i) != 0.0) throw NonzeroDiagonal(i, entries(i, i));
  }
  for (int i = 0; i < n; ++i) {
    const double dev = std::abs(entries.row(i).sum() - 1.0);
    if (dev > tol) throw RowSumViolation(i, dev);
  }

  double gamma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = entries(i, j);
      if (w > 0.0) gamma = std::min(gamma, w);
    }
  }

  double col_dev = 0.0;
  for (int j = 0; j < n; ++j) {
    col_dev = std::max(col_dev, std::abs(entries.col(j).sum() - 1.0));
  }

  return InteractionMatrix(std::move(entries), col_dev <= tol, gamma, col_dev);
}

DirectedGraph::DirectedGraph(int n) {
  if (n < 1) throw InvalidParameter("a graph needs at least one vertex");
  adj_.resize(n);
}

void DirectedGraph::add_arc(int i, int j) {
  if (i < 0 || j < 0 || i >= n() || j >= n()) {
    throw InvalidParameter("arc endpoint out of range");
  }
  if (i == j) throw InvalidParameter("self-loops are not allowed");
  auto& nbrs = adj_[i];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j);
  if (it != nbrs.end() && *it == j) return;
  nbrs.insert(it, j);
  ++arc_count_;
}

bool DirectedGraph::has_arc(int i, int j) const {
  const auto& nbrs = adj_[i];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

void DirectedGraph::merge(const DirectedGraph& other) {
  if (other.n() != n()) throw DimensionMismatch(n(), other.n());
  for (int i = 0; i < n(); ++i) {
    for (int j : other.adj_[i]) add_arc(i, j);
  }
}

std::vector<std::pair<int, int>> DirectedGraph::arcs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(arc_count_);
  for (int i = 0; i < n(); ++i) {
    for (int j : adj_[i]) out.emplace_back(i, j);
  }
  return out;
}

DirectedGraph support_graph(const InteractionMatrix& C) {
  DirectedGraph g(C.n());
  for (int i = 0; i < C.n(); ++i) {
    for (int j = 0; j < C.n(); ++j) {
      if (C.entry(i, j) > 0.0) g.add_arc(i, j);
    }
  }
  return g;
}

namespace {

// Tarjan with an explicit stack; vertex counts here are tiny but the graphs
// coming out of long union windows can still be walked iteratively for free.
struct TarjanState {
  const DirectedGraph& g;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int next_index = 0;
  int components = 0;

  explicit TarjanState(const DirectedGraph& graph)
      : g(graph), index(graph.n(), -1), lowlink(graph.n(), 0), on_stack(graph.n(), false) {}

  void visit(int root) {
    struct Frame {
      int v;
      std::size_t child;
    };
    std::vector<Frame> frames{{root, 0}};
    open(root);
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      const auto& nbrs = g.out_neighbors(v);
      if (child < nbrs.size()) {
        const int w = nbrs[child++];
        if (index[w] == -1) {
          open(w);
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
      } else {
        if (lowlink[v] == index[v]) {
          ++components;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
          } while (w != v);
        }
        frames.pop_back();
        if (!frames.empty()) {
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        }
      }
    }
  }

  void open(int v) {
    index[v] = lowlink[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
  }
};

}  // namespace

int scc_count(const DirectedGraph& g) {
  TarjanState state(g);
  for (int v = 0; v < g.n(); ++v) {
    if (state.index[v] == -1) state.visit(v);
  }
  return state.components;
}

bool strongly_connected(const DirectedGraph& g) { return scc_count(g) == 1; }

AppraisalState simplex_state(const Eigen::VectorXd& x, double t, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("simplex tolerance must be positive");
  if (x.size() == 0) throw InvalidParameter("empty state vector");

  const double sum_residual = std::abs(x.sum() - 1.0);
  double entry_violation = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    entry_violation = std::max(entry_violation, std::max(-x(i), x(i) - 1.0));
  }
  const double residual = std::max(sum_residual, entry_violation);
  if (sum_residual > tol || entry_violation > tol) throw NotOnSimplex(residual);

  AppraisalState s;
  s.t = t;
  s.x = x.cwiseMax(0.0).cwiseMin(1.0);
  s.residual = residual;
  return s;
}

AppraisalState vertex_state(int i, int n, double t) {
  if (n < 1 || i < 0 || i >= n) throw InvalidParameter("vertex index out of range");
  AppraisalState s;
  s.t = t;
  s.x = Eigen::VectorXd::Zero(n);
  s.x(i) = 1.0;
  return s;
}

AppraisalState barycenter_state(int n, double t) {
  if (n < 1) throw InvalidParameter("barycenter needs n >= 1");
  AppraisalState s;
  s.t = t;
  s.x = Eigen::VectorXd::Constant(n, 1.0 / n);
  return s;
}

Extremes extremes(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw InvalidParameter("extremes of an empty vector");
  Extremes e;
  e.h = x.maxCoeff();
  e.l = x.minCoeff();
  e.v = e.h - e.l;
  return e;
}

}  // namespace appraisal
