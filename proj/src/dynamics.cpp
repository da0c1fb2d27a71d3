#include "appraisal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace appraisal {

namespace {

void require_dim(const InteractionMatrix& C, const Eigen::VectorXd& v) {
  if (v.size() != C.n()) throw DimensionMismatch(C.n(), static_cast<int>(v.size()));
}

// Influence term u = (1 - x) .* x = (I - X) x.
Eigen::VectorXd influence(const Eigen::VectorXd& x) {
  return (x.array() * (1.0 - x.array())).matrix();
}

}  // namespace

Eigen::VectorXd rhs(const InteractionMatrix& C, const Eigen::VectorXd& x) {
  require_dim(C, x);
  const Eigen::VectorXd u = influence(x);
  return C.weights().transpose() * u - u;
}

Eigen::MatrixXd drift_matrix(const InteractionMatrix& C, const Eigen::VectorXd& x) {
  require_dim(C, x);
  const int n = C.n();
  Eigen::MatrixXd i_minus_x = Eigen::MatrixXd::Identity(n, n);
  i_minus_x.diagonal() -= x;
  return i_minus_x - C.weights().transpose() * i_minus_x;
}

Eigen::VectorXd opinion_rhs(const InteractionMatrix& C, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& z) {
  require_dim(C, x);
  require_dim(C, z);
  const Eigen::VectorXd cz = C.weights() * z;
  return ((1.0 - x.array()) * (z.array() - cz.array())).matrix();
}

namespace {

// Jacobian of rhs at x: (C^T - I) * diag(1 - 2x).
Eigen::MatrixXd rhs_jacobian(const InteractionMatrix& C, const Eigen::VectorXd& x) {
  const int n = C.n();
  Eigen::MatrixXd j = C.weights().transpose() - Eigen::MatrixXd::Identity(n, n);
  for (int col = 0; col < n; ++col) j.col(col) *= (1.0 - 2.0 * x(col));
  return j;
}

Eigen::VectorXd lift(const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size()) + 1;
  Eigen::VectorXd x(n);
  x.head(n - 1) = y;
  x(n - 1) = 1.0 - y.sum();
  return x;
}

bool strictly_interior(const Eigen::VectorXd& x) {
  return x.minCoeff() > 0.0 && x.maxCoeff() < 1.0;
}

// Short constant-matrix RK4 burst; used only to escape Newton stagnation
// toward the attracting equilibrium.
Eigen::VectorXd relax_by_integration(const InteractionMatrix& C, Eigen::VectorXd x,
                                     double duration, double step) {
  const int steps = std::max(1, static_cast<int>(std::ceil(duration / step)));
  const double h = duration / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = rhs(C, x);
    const Eigen::VectorXd k2 = rhs(C, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(C, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(C, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

Eigen::VectorXd interior_equilibrium(const InteractionMatrix& C, const Eigen::VectorXd& x0,
                                     double tol, int max_iter) {
  require_dim(C, x0);
  if (!(tol > 0.0) || max_iter < 1) throw InvalidParameter("bad solver parameters");
  if (!strictly_interior(x0) || std::abs(x0.sum() - 1.0) > 1e-9) {
    throw InvalidParameter("starting point must be an interior simplex point");
  }
  const int n = C.n();

  Eigen::VectorXd y = x0.head(n - 1);
  int fallbacks_left = 2;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd x = lift(y);
    const Eigen::VectorXd r = rhs(C, x);
    const double res = r.lpNorm<Eigen::Infinity>();
    const int argmax = static_cast<int>(std::max_element(x.data(), x.data() + n) - x.data());
    if (x(argmax) > 1.0 - 1e-6) {
      // Newton slid into the basin of a vertex equilibrium. The flow from any
      // interior point moves away from the vertices, so a relaxation burst
      // re-routes the iterate; give up only once that budget is spent.
      if (fallbacks_left-- > 0) {
        y = relax_by_integration(C, x, 100.0, 1e-2).head(n - 1);
        continue;
      }
      throw ConvergedToVertex(argmax);
    }
    if (res <= tol) return x;

    // Chart Jacobian: column j of the full Jacobian minus the column of the
    // eliminated coordinate, restricted to the first n-1 rows.
    const Eigen::MatrixXd jf = rhs_jacobian(C, x);
    Eigen::MatrixXd jc(n - 1, n - 1);
    for (int j = 0; j < n - 1; ++j) {
      jc.col(j) = (jf.col(j) - jf.col(n - 1)).head(n - 1);
    }
    const Eigen::VectorXd dy = jc.partialPivLu().solve(-r.head(n - 1));

    // Halve the step until the residual drops and the iterate stays interior.
    bool accepted = false;
    double lam = 1.0;
    while (lam >= 1.0 / 1024.0) {
      const Eigen::VectorXd y_try = y + lam * dy;
      const Eigen::VectorXd x_try = lift(y_try);
      if (strictly_interior(x_try) &&
          rhs(C, x_try).lpNorm<Eigen::Infinity>() < res) {
        y = y_try;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      if (fallbacks_left-- > 0) {
        y = relax_by_integration(C, x, 50.0, 1e-2).head(n - 1);
      } else {
        throw NoConvergence(max_iter);
      }
    }
  }
  throw NoConvergence(max_iter);
}

Eigen::VectorXd interior_equilibrium(const InteractionMatrix& C, double tol, int max_iter) {
  return interior_equilibrium(C, Eigen::VectorXd::Constant(C.n(), 1.0 / C.n()), tol, max_iter);
}

double equivalent_appraisal(const Eigen::VectorXd& beta, const Eigen::VectorXd& x) {
  if (beta.size() != x.size()) {
    throw DimensionMismatch(static_cast<int>(beta.size()), static_cast<int>(x.size()));
  }
  if (beta.size() == 0) throw InvalidParameter("empty weight vector");

  double c = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    if (beta(k) > 0.0) {
      c += beta(k) * (x(k) - x(k) * x(k));
      lo = std::min(lo, x(k));
      hi = std::max(hi, x(k));
    }
  }
  if (!std::isfinite(lo)) throw InvalidParameter("weight vector has empty support");
  const double cap = beta.dot(x);

  // v^2 - v + c = 0. c <= 1/4 holds for simplex inputs; clamp the tiny
  // negative discriminants floating point produces at the double root.
  double disc = 1.0 - 4.0 * c;
  if (disc < 0.0) {
    if (disc < -1e-12) throw NoFeasibleRoot();
    disc = 0.0;
  }
  const double root_hi = 0.5 * (1.0 + std::sqrt(disc));
  const double root_lo = (root_hi > 0.0) ? c / root_hi : 0.0;

  constexpr double kSlack = 1e-10;
  const auto feasible = [&](double v) {
    return v >= lo - kSlack && v <= hi + kSlack && v <= cap + kSlack;
  };
  if (feasible(root_lo)) return root_lo;
  if (feasible(root_hi)) return root_hi;
  throw NoFeasibleRoot();
}

}  // namespace appraisal
