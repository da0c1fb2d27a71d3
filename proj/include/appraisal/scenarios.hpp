#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "appraisal/integrator.hpp"
#include "appraisal/rate_certificate.hpp"
#include "appraisal/switching.hpp"

namespace appraisal {

// What a scenario is expected to do, together with the thresholds that make
// the expectation checkable.
struct ConvergeUniform {
  double tol = 1e-6;  // final ||x - (1/n) 1||_inf
};
struct ConvergeTo {
  Eigen::VectorXd target;
  double tol;  // per-coordinate
};
struct NonConvergent {
  double tail_window = 20.0;     // length of the inspected tail, in time units
  double min_amplitude = 1e-5;   // required max ||x(t) - tail mean||_inf on the tail
};
struct ConvergeSomewhere {
  double tol = 1e-6;           // period-to-period displacement
  double vertex_margin = 0.01;  // required min coordinate of the limit
};
using Expectation = std::variant<ConvergeUniform, ConvergeTo, NonConvergent, ConvergeSomewhere>;

struct Scenario {
  std::string name;
  SwitchingSchedule schedule;
  AppraisalState x0;
  int window;  // declared connectivity window B
  double horizon;
  Expectation expectation;
};

struct Verdict {
  bool satisfied = false;
  std::string detail;
  bool assumptions_met = false;
  double measured = 0.0;  // the headline measurement behind `satisfied`
  std::optional<RateCertificate> certificate;
  std::optional<EnvelopeReport> envelope;
};

// Deterministic xorshift-style generator so scenario generation reproduces
// bit-for-bit across platforms.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double uniform();                    // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);     // inclusive bounds
};

// The fixed example matrices driving the bundled experiments: a doubly
// stochastic ring mix, a row-stochastic (not doubly stochastic) chain, and a
// pair of row-stochastic matrices sharing the left eigenvector
// (1/6, 1/3, 1/3, 1/6) for eigenvalue one.
InteractionMatrix demo_doubly_stochastic();   // C1 of the alternating experiment
InteractionMatrix demo_row_stochastic();      // C2 of the alternating experiment
std::pair<InteractionMatrix, InteractionMatrix> demo_common_eigenvector_pair();
Eigen::VectorXd demo_common_left_eigenvector();

// Alternating schedule {C1, C2} with dwell 0.4. One matrix is doubly
// stochastic, the other is not, and the state keeps oscillating between the
// two pulls; the expectation is NonConvergent.
Scenario fig1_scenario();

// Alternating schedule over the common-left-eigenvector pair, dwell 0.4.
// Empirically the state settles at a non-vertex point; the expectation is
// ConvergeSomewhere. This stabilization is an observed behavior, not a
// certified one.
Scenario fig2_scenario();

// Periodic schedule of `period_len` random zero-diagonal doubly stochastic
// matrices (convex combinations of derangement permutation matrices), dwells
// drawn from dwell_range, interior random x0, expectation ConvergeUniform.
// The declared window is the smallest one passing the connectivity check;
// generation retries a bounded number of times and then throws
// GenerationFailed.
Scenario doubly_stochastic_scenario(int n, int period_len, std::uint64_t seed,
                                    std::pair<double, double> dwell_range = {0.2, 0.6});

// Generator building blocks, exposed for tests.
std::vector<int> random_derangement(int n, Rng& rng);
InteractionMatrix random_doubly_stochastic(int n, Rng& rng);
Eigen::VectorXd random_interior_point(int n, Rng& rng);
InteractionMatrix random_row_stochastic(int n, Rng& rng);

// Integrates the scenario, evaluates its expectation, and, when the schedule
// passes the doubly-stochastic and connectivity checks, attaches the rate
// certificate and envelope report.
std::pair<Trajectory, Verdict> run_scenario(const Scenario& s, const IntegratorConfig& cfg);

// max_step 1e-3 and the scenario's horizon.
IntegratorConfig default_config(const Scenario& s);

}  // namespace appraisal
