#pragma once

#include <Eigen/Dense>

#include "appraisal/core_types.hpp"

namespace appraisal {

// Vector field of the self-appraisal model under a fixed matrix C:
//
//   xdot_i = -(1 - x_i) x_i + sum_j c_ji (1 - x_j) x_j
//
// i.e. the difference between i's importance to others and others' importance
// to i. Conserves 1^T x for every row-stochastic C.
Eigen::VectorXd rhs(const InteractionMatrix& C, const Eigen::VectorXd& x);

// State-dependent drift matrix W(x) = I - X - C^T (I - X) with X = diag(x),
// so that rhs(C, x) == -W x. W^T is a Laplacian whenever x is on the simplex;
// W itself generally is not, even for doubly stochastic C.
Eigen::MatrixXd drift_matrix(const InteractionMatrix& C, const Eigen::VectorXd& x);

// Companion opinion dynamics: each opinion z_i moves at a rate scaled by how
// much individual i accepts from others,
//
//   zdot_i = -(1 - x_i) (-z_i + sum_j c_ij z_j).
Eigen::VectorXd opinion_rhs(const InteractionMatrix& C, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& z);

// Finds a non-vertex equilibrium of rhs(C, .) by damped Newton iteration on
// the chart x_n = 1 - sum_{i<n} x_i (which bakes in the conserved sum), with
// a long-horizon integration fallback when Newton stagnates. Throws
// NoConvergence or ConvergedToVertex.
Eigen::VectorXd interior_equilibrium(const InteractionMatrix& C, const Eigen::VectorXd& x0,
                                     double tol = 1e-12, int max_iter = 100);

// Same, started from the barycenter.
Eigen::VectorXd interior_equilibrium(const InteractionMatrix& C, double tol = 1e-12,
                                     int max_iter = 100);

// The self-appraisal level v whose own influence matches the beta-weighted
// mix of influences of x:
//
//   v - v^2 = sum_k beta_k (x_k - x_k^2),
//
// with v between the extremes of x over the support of beta and
// v <= beta^T x. Both roots of the quadratic are tried; the smaller feasible
// one wins. Throws NoFeasibleRoot when neither root satisfies the
// constraints (a violated precondition: beta and x must lie on the simplex).
double equivalent_appraisal(const Eigen::VectorXd& beta, const Eigen::VectorXd& x);

}  // namespace appraisal
