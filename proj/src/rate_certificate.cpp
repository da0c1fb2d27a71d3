#include "appraisal/rate_certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace appraisal {

double alpha_of(int n, int window, double tau_upper, double l0) {
  return std::exp(-tau_upper * window * (n - 1) * (1.0 - 2.0 * l0));
}

double mu_of(double alpha, double gamma, double tau_lower, double l0) {
  return alpha * gamma * (1.0 - std::exp(-tau_lower * l0));
}

double lambda_of(int n, int window, double tau_upper, double decay_product) {
  // ln((1 - p)^{-1}) = -log1p(-p), kept accurate for p near 0.
  return -std::log1p(-decay_product) / (window * tau_upper * (n - 1));
}

RateCertificate certificate(int n, int m, int window, double tau_lower, double tau_upper,
                            double gamma, double l0) {
  if (n < 3) throw InvalidParameter("the rate certificate requires n >= 3");
  if (m < 2 || m > n) throw InvalidParameter("m must lie in [2, n]");
  if (window < 1) throw InvalidParameter("connectivity window must be at least 1");
  if (!(tau_lower > 0.0) || !(tau_upper >= tau_lower)) {
    throw InvalidParameter("dwell bounds must satisfy 0 < lower <= upper");
  }
  if (!(gamma > 0.0) || gamma > 1.0) throw InvalidParameter("gamma must lie in (0, 1]");
  if (!(l0 > 0.0) || l0 > 1.0 / n) throw InvalidParameter("l0 must lie in (0, 1/n]");

  RateCertificate cert;
  cert.n = n;
  cert.m = m;
  cert.window = window;
  cert.tau_lower = tau_lower;
  cert.tau_upper = tau_upper;
  cert.gamma = gamma;
  cert.l0 = l0;

  cert.alpha = alpha_of(n, window, tau_upper, l0);
  cert.mu = mu_of(cert.alpha, gamma, tau_lower, l0);
  cert.decay_product = cert.alpha * std::pow(cert.mu, n - 1);
  cert.near_vacuous = cert.decay_product < 1e-300;
  cert.lambda = lambda_of(n, window, tau_upper, cert.decay_product);

  const double exponent = static_cast<double>(1 + 2 * window * (n - 1)) / (window * (n - 1));
  cert.prefactor = std::exp(-exponent * std::log1p(-cert.decay_product));
  return cert;
}

RateCertificate certificate_from_run(const SwitchingSchedule& schedule,
                                     const Eigen::VectorXd& x0, int window,
                                     const Trajectory& traj) {
  if (window < 1) throw InvalidParameter("connectivity window must be at least 1");
  double gamma = 0.0;
  try {
    gamma = schedule.verify_doubly_stochastic();
  } catch (const NotDoublyStochastic& e) {
    throw AssumptionViolated(std::string("schedule is not doubly stochastic: ") + e.what());
  }
  if (!schedule.verify_joint_connectivity(window)) {
    throw AssumptionViolated("union graphs over the declared window are not all strongly connected");
  }

  const int n = schedule.n();
  if (x0.size() != n) throw DimensionMismatch(n, static_cast<int>(x0.size()));
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (x0(i) > kPositivityThreshold) ++m;
  }

  const double t_positive = schedule.switch_time(static_cast<long>(n - m) * window);
  if (traj.back().t < t_positive - 1e-9) {
    throw InsufficientHorizon(t_positive, traj.back().t);
  }
  const Sample* s = traj.sample_at(t_positive);
  if (s == nullptr) throw InsufficientHorizon(t_positive, traj.back().t);

  // min over a simplex vector never exceeds the mean; shave off roundoff.
  const double l0 = std::min(s->ext.l, 1.0 / n);
  const DwellBounds dwells = schedule.dwell_bounds();
  return certificate(n, m, window, dwells.lower, dwells.upper, gamma, l0);
}

double bound_at(const RateCertificate& cert, double v0, double t) {
  if (v0 < 0.0) throw InvalidParameter("initial spread must be nonnegative");
  if (t < 0.0) throw InvalidParameter("envelope time must be nonnegative");
  return cert.prefactor * std::exp(-cert.lambda * t) * v0;
}

EnvelopeReport check_envelope(const RateCertificate& cert, const Trajectory& traj,
                              bool assumptions_met) {
  EnvelopeReport report;
  report.assumptions_met = assumptions_met;
  report.lambda = cert.lambda;
  report.near_vacuous = cert.near_vacuous;

  const double t0 = traj.front().t;
  const double v0 = traj.front().ext.v;

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples()) {
    worst = std::max(worst, s.ext.v - bound_at(cert, v0, s.t - t0));
  }
  report.max_violation = worst;

  // Tail decay rate: least-squares slope of ln V over the later half of the
  // samples where V still resolves the decay. Near the fixed point the spread
  // settles into a roundoff-driven noise plateau (per-step rounding amplified
  // by the slow mode, around 1e-13 at step 1e-3); samples there carry no rate
  // information and would flatten the fit.
  constexpr double kFloor = 1e-11;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : traj.samples()) {
    if (s.ext.v > kFloor) pts.emplace_back(s.t, std::log(s.ext.v));
  }
  if (pts.size() >= 4) {
    const std::size_t begin = pts.size() / 2;
    double mean_t = 0.0, mean_y = 0.0;
    for (std::size_t i = begin; i < pts.size(); ++i) {
      mean_t += pts[i].first;
      mean_y += pts[i].second;
    }
    const double count = static_cast<double>(pts.size() - begin);
    mean_t /= count;
    mean_y /= count;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = begin; i < pts.size(); ++i) {
      cov += (pts[i].first - mean_t) * (pts[i].second - mean_y);
      var += (pts[i].first - mean_t) * (pts[i].first - mean_t);
    }
    report.tail_samples = static_cast<int>(count);
    report.empirical_rate = var > 0.0 ? -cov / var : 0.0;
  }
  return report;
}

}  // namespace appraisal
