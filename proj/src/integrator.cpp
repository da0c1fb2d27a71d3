#include "appraisal/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "appraisal/dynamics.hpp"

namespace appraisal {

Trajectory::Trajectory(std::vector<Sample> samples, MonitorReport monitors)
    : samples_(std::move(samples)), monitors_(monitors) {
  if (samples_.empty()) throw InvalidParameter("a trajectory needs at least one sample");
}

const Sample* Trajectory::sample_at(double t, double tol) const {
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), t - tol,
                                   [](const Sample& s, double v) { return s.t < v; });
  if (it != samples_.end() && std::abs(it->t - t) <= tol) return &*it;
  return nullptr;
}

namespace {

class Monitors {
 public:
  Monitors(double state_tol, const Eigen::VectorXd& x0, double t0) : state_tol_(state_tol) {
    observe_step(x0, t0);
    observe_sample(x0, t0);
  }

  // Per-step residuals; clamps tiny negatives in place and reports the
  // pre-clamp excursion. Throws on departures beyond the budget.
  void observe_step(Eigen::VectorXd& x, double t) {
    double excursion = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      excursion = std::max(excursion, std::max(-x(i), x(i) - 1.0));
      if (x(i) < 0.0 && x(i) >= -state_tol_) x(i) = 0.0;
    }
    if (excursion > state_tol_) throw SimplexBlowup(t, excursion);
    report_.max_simplex_violation = std::max(report_.max_simplex_violation, excursion);
    report_.max_conservation_residual =
        std::max(report_.max_conservation_residual, std::abs(x.sum() - 1.0));
  }

  void observe_step(const Eigen::VectorXd& x, double t) {
    Eigen::VectorXd copy = x;
    observe_step(copy, t);
  }

  Extremes observe_sample(const Eigen::VectorXd& x, double t) {
    const Extremes e = extremes(x);
    if (have_last_) {
      report_.h_increase_max = std::max(report_.h_increase_max, e.h - last_.h);
      report_.l_decrease_max = std::max(report_.l_decrease_max, last_.l - e.l);
    }
    if (!report_.positivity_time && e.l > kPositivityThreshold) report_.positivity_time = t;
    last_ = e;
    have_last_ = true;
    return e;
  }

  const MonitorReport& report() const { return report_; }

 private:
  double state_tol_;
  MonitorReport report_;
  Extremes last_{};
  bool have_last_ = false;
};

}  // namespace

Trajectory integrate(const SwitchingSchedule& schedule, const AppraisalState& x0,
                     const IntegratorConfig& cfg) {
  if (!(cfg.max_step > 0.0)) throw InvalidParameter("max_step must be positive");
  if (!(cfg.state_tol > 0.0)) throw InvalidParameter("state_tol must be positive");
  if (cfg.sample_stride < 0) throw InvalidParameter("sample_stride must be nonnegative");
  if (!(cfg.horizon > schedule.t0())) {
    throw InvalidParameter("horizon must lie past the schedule start");
  }
  if (std::abs(x0.t - schedule.t0()) > 1e-12) {
    throw InvalidParameter("initial state must sit at the schedule start time");
  }
  if (x0.x.size() != schedule.n()) throw DimensionMismatch(schedule.n(), (int)x0.x.size());

  const DwellBounds dwells = schedule.dwell_bounds();
  if (cfg.max_step > dwells.lower) {
    throw InvalidParameter("max_step must not exceed the smallest dwell time");
  }
  if (!schedule.periodic() && schedule.end_time() < cfg.horizon) {
    throw OutOfHorizon("non-periodic schedule ends before the requested horizon");
  }

  const int stride = cfg.sample_stride > 0
                         ? cfg.sample_stride
                         : std::max(1, static_cast<int>(dwells.lower / cfg.max_step / 10.0));

  Eigen::VectorXd x = x0.x;
  Monitors monitors(cfg.state_tol, x, x0.t);

  std::vector<Sample> samples;
  samples.push_back({x0.t, x, extremes(x)});

  const int n = schedule.n();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), stage(n);
  long steps_done = 0;

  for (long k = 0;; ++k) {
    const double t_start = schedule.switch_time(k);
    if (t_start >= cfg.horizon) break;
    const double t_stop = std::min(schedule.switch_time(k + 1), cfg.horizon);
    const InteractionMatrix& c = schedule.matrix_of_segment(k);

    const double span = t_stop - t_start;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.max_step)));
    const double h = span / steps;

    for (long i = 1; i <= steps; ++i) {
      k1 = rhs(c, x);
      stage = x + (0.5 * h) * k1;
      k2 = rhs(c, stage);
      stage = x + (0.5 * h) * k2;
      k3 = rhs(c, stage);
      stage = x + h * k3;
      k4 = rhs(c, stage);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

      const double t = (i == steps) ? t_stop : t_start + i * h;
      monitors.observe_step(x, t);
      ++steps_done;
      if (i == steps || steps_done % stride == 0) {
        const Extremes e = monitors.observe_sample(x, t);
        samples.push_back({t, x, e});
      }
    }
    if (t_stop >= cfg.horizon) break;
  }

  return Trajectory(std::move(samples), monitors.report());
}

std::optional<double> first_positivity_time(const Trajectory& traj, double threshold) {
  for (const auto& s : traj.samples()) {
    if (s.ext.l > threshold) return s.t;
  }
  return std::nullopt;
}

}  // namespace appraisal
