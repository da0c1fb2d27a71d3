#pragma once

#include <Eigen/Dense>

#include "appraisal/integrator.hpp"
#include "appraisal/switching.hpp"

namespace appraisal {

// Closed-form exponential decay certificate for the appraisal spread
// V(t) = h(t) - l(t) on doubly stochastic schedules:
//
//   alpha     = exp(-tau_upper * B * (n-1) * (1 - 2 l0))
//   mu        = alpha * gamma * (1 - exp(-tau_lower * l0))
//   lambda    = ln((1 - alpha mu^{n-1})^{-1}) / (B * tau_upper * (n-1))
//   prefactor = (1 - alpha mu^{n-1})^{-(1 + 2B(n-1)) / (B(n-1))}
//
// where B is the connectivity window, gamma the minimum nonzero weight and
// l0 the minimum appraisal once every individual has become positive (at
// switch time t_{(n-m)B}, m = number of nonzero entries of x(t0)). The spread
// then obeys V(t) <= prefactor * exp(-lambda t) * V(t0) for all t >= t0.
struct RateCertificate {
  int n = 0;
  int m = 0;
  int window = 0;  // B
  double tau_lower = 0.0;
  double tau_upper = 0.0;
  double gamma = 0.0;
  double l0 = 0.0;

  double alpha = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  double prefactor = 1.0;

  // alpha * mu^{n-1}; the per-(n-1)B-switches contraction is 1 minus this.
  double decay_product = 0.0;

  // Set when decay_product underflows below 1e-300: the certificate is still
  // valid but says almost nothing.
  bool near_vacuous = false;

  double contraction() const { return 1.0 - decay_product; }
};

// Raw pieces of the closed form, evaluated without argument validation.
double alpha_of(int n, int window, double tau_upper, double l0);
double mu_of(double alpha, double gamma, double tau_lower, double l0);
double lambda_of(int n, int window, double tau_upper, double decay_product);

// Validates all parameters (n >= 3, 2 <= m <= n, window >= 1,
// 0 < tau_lower <= tau_upper, 0 < gamma <= 1, 0 < l0 <= 1/n) and evaluates
// the closed form. Throws InvalidParameter.
RateCertificate certificate(int n, int m, int window, double tau_lower, double tau_upper,
                            double gamma, double l0);

// Assembles the certificate from a simulated run: n and the dwell bounds come
// from the schedule, gamma from the doubly-stochastic check, m from the count
// of positive entries of x0, and l0 = min_i x_i read from the trajectory at
// switch time t_{(n-m)B}. Throws AssumptionViolated when the schedule fails
// the doubly-stochastic or joint-connectivity checks, InsufficientHorizon
// when the trajectory ends before t_{(n-m)B}.
RateCertificate certificate_from_run(const SwitchingSchedule& schedule,
                                     const Eigen::VectorXd& x0, int window,
                                     const Trajectory& traj);

// Envelope value prefactor * exp(-lambda * t) * v0, with t relative to t0 = 0.
double bound_at(const RateCertificate& cert, double v0, double t);

struct EnvelopeReport {
  bool assumptions_met = true;     // envelope is only asserted when true
  double max_violation = 0.0;      // max over samples of V(t) - bound_at(t); <= 0 is clean
  double empirical_rate = 0.0;     // least-squares decay rate of ln V on the tail
  int tail_samples = 0;            // points that entered the fit
  double lambda = 0.0;             // certified rate, for comparison
  bool near_vacuous = false;
};

// Compares a trajectory against the envelope and estimates the realized decay
// rate from the tail of ln V(t) (the later half of the samples where V is
// still representable). With assumptions_met = false the report only carries
// diagnostics and asserts nothing.
EnvelopeReport check_envelope(const RateCertificate& cert, const Trajectory& traj,
                              bool assumptions_met = true);

}  // namespace appraisal
