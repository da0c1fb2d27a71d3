#pragma once

#include <optional>
#include <vector>

#include "appraisal/core_types.hpp"
#include "appraisal/switching.hpp"

namespace appraisal {

// Entries below this are treated as zero when deciding strict positivity.
constexpr double kPositivityThreshold = 1e-12;

struct IntegratorConfig {
  double max_step = 1e-3;
  double horizon = 0.0;    // absolute end time; must exceed the schedule's t0
  int sample_stride = 0;   // record every k-th step; 0 = auto (>= 10 samples per dwell)
  double state_tol = 1e-8;
};

struct Sample {
  double t;
  Eigen::VectorXd x;
  Extremes ext;
};

// Aggregated residuals of the runtime monitors. Conservation and simplex
// membership are tracked every step; extreme monotonicity between recorded
// samples. None of these are fatal (a simplex departure beyond state_tol is,
// and aborts the run).
struct MonitorReport {
  double max_conservation_residual = 0.0;  // max |sum x - 1|
  double max_simplex_violation = 0.0;      // worst pre-clamp excursion out of [0,1]
  double h_increase_max = 0.0;             // largest rise of h between samples
  double l_decrease_max = 0.0;             // largest drop of l between samples
  std::optional<double> positivity_time;   // first sample with min_i x_i > threshold
};

class Trajectory {
 public:
  Trajectory(std::vector<Sample> samples, MonitorReport monitors);

  const std::vector<Sample>& samples() const { return samples_; }
  const MonitorReport& monitors() const { return monitors_; }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }
  int n() const { return static_cast<int>(samples_.front().x.size()); }

  // Sample whose time matches t within tol, or nullptr.
  const Sample* sample_at(double t, double tol = 1e-9) const;

 private:
  std::vector<Sample> samples_;
  MonitorReport monitors_;
};

// Integrates the switched system with classical fixed-step RK4. Every dwell
// interval is subdivided into ceil(tau / max_step) equal steps so switch
// boundaries are hit exactly and no step straddles a matrix change; all
// boundaries and the horizon itself are recorded as samples. States are
// clamped from [-state_tol, 0) to 0 after each step and never renormalized;
// drift shows up in the monitors instead. Throws SimplexBlowup when the state
// leaves the simplex by more than state_tol, OutOfHorizon when a non-periodic
// schedule ends before the horizon, InvalidParameter for a config whose
// max_step exceeds the smallest dwell.
Trajectory integrate(const SwitchingSchedule& schedule, const AppraisalState& x0,
                     const IntegratorConfig& cfg);

// Earliest sample time at which every entry exceeds `threshold`.
std::optional<double> first_positivity_time(const Trajectory& traj,
                                            double threshold = kPositivityThreshold);

}  // namespace appraisal
