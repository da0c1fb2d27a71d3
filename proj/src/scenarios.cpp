#include "appraisal/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace appraisal {

// splitmix64; tiny, seedable, identical everywhere.
std::uint64_t Rng::next() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(uniform() * (hi - lo + 1));
}

InteractionMatrix demo_doubly_stochastic() {
  Eigen::MatrixXd c(4, 4);
  c << 0, 3.0 / 4, 0, 1.0 / 4,
      1.0 / 4, 0, 3.0 / 4, 0,
      0, 1.0 / 4, 0, 3.0 / 4,
      3.0 / 4, 0, 1.0 / 4, 0;
  return InteractionMatrix::validated(c);
}

InteractionMatrix demo_row_stochastic() {
  Eigen::MatrixXd c(4, 4);
  c << 0, 1, 0, 0,
      1.0 / 2, 0, 1.0 / 2, 0,
      0, 1.0 / 3, 0, 2.0 / 3,
      0, 0, 1, 0;
  return InteractionMatrix::validated(c);
}

std::pair<InteractionMatrix, InteractionMatrix> demo_common_eigenvector_pair() {
  Eigen::MatrixXd a(4, 4);
  a << 0, 1, 0, 0,
      0, 0, 1.0 / 2, 1.0 / 2,
      1.0 / 2, 1.0 / 2, 0, 0,
      0, 0, 1, 0;
  Eigen::MatrixXd b(4, 4);
  b << 0, 1, 0, 0,
      1.0 / 2, 0, 1.0 / 2, 0,
      0, 1.0 / 2, 0, 1.0 / 2,
      0, 0, 1, 0;
  return {InteractionMatrix::validated(a), InteractionMatrix::validated(b)};
}

Eigen::VectorXd demo_common_left_eigenvector() {
  Eigen::VectorXd v(4);
  v << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
  return v;
}

namespace {

AppraisalState demo_initial_state() {
  Eigen::VectorXd x0(4);
  x0 << 0.4, 0.3, 0.2, 0.1;
  return simplex_state(x0, 0.0);
}

}  // namespace

Scenario fig1_scenario() {
  auto schedule = SwitchingSchedule::uniform_cycle(
      {demo_doubly_stochastic(), demo_row_stochastic()}, 0.4);
  return Scenario{
      "fig1", std::move(schedule), demo_initial_state(), /*window=*/1,
      /*horizon=*/200.0,
      // 10x the uniform-convergence tolerance over the last 20 time units;
      // the measured amplitude of this schedule sits around 4e-3.
      NonConvergent{20.0, 1e-5},
  };
}

Scenario fig2_scenario() {
  auto [a, b] = demo_common_eigenvector_pair();
  auto schedule = SwitchingSchedule::uniform_cycle({std::move(a), std::move(b)}, 0.4);
  return Scenario{
      "fig2", std::move(schedule), demo_initial_state(), /*window=*/1,
      /*horizon=*/200.0, ConvergeSomewhere{1e-6, 0.01},
  };
}

std::vector<int> random_derangement(int n, Rng& rng) {
  if (n < 2) throw InvalidParameter("derangements need n >= 2");
  std::vector<int> perm(n);
  while (true) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    }
    bool fixed_point = false;
    for (int i = 0; i < n; ++i) {
      if (perm[i] == i) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return perm;
  }
}

InteractionMatrix random_doubly_stochastic(int n, Rng& rng) {
  if (n < 3) throw InvalidParameter("generator needs n >= 3");
  // Convex combination of two or three derangement permutation matrices:
  // zero diagonal by construction, doubly stochastic because permutation
  // matrices are.
  const int terms = rng.uniform_int(2, 3);
  std::vector<double> weights(terms);
  double total = 0.0;
  for (auto& w : weights) {
    w = rng.uniform(0.2, 1.0);
    total += w;
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < terms; ++k) {
    const auto perm = random_derangement(n, rng);
    const double w = weights[k] / total;
    for (int i = 0; i < n; ++i) c(i, perm[i]) += w;
  }
  return InteractionMatrix::validated(c);
}

Eigen::VectorXd random_interior_point(int n, Rng& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x(i) = -std::log(1.0 - rng.uniform());  // Exp(1) gives Dirichlet(1,...,1)
  }
  x /= x.sum();
  return x;
}

InteractionMatrix random_row_stochastic(int n, Rng& rng) {
  if (n < 2) throw InvalidParameter("generator needs n >= 2");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // Random support of at least one off-diagonal neighbor, random weights.
    double total = 0.0;
    int support = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (rng.uniform() < 0.6) {
        c(i, j) = rng.uniform(0.1, 1.0);
        total += c(i, j);
        ++support;
      }
    }
    if (support == 0) {
      const int j = (i + 1 + rng.uniform_int(0, n - 2)) % n;
      c(i, j) = total = 1.0;
    }
    c.row(i) /= total;
  }
  return InteractionMatrix::validated(c);
}

Scenario doubly_stochastic_scenario(int n, int period_len, std::uint64_t seed,
                                    std::pair<double, double> dwell_range) {
  if (n < 3) throw InvalidParameter("scenario needs n >= 3");
  if (period_len < 1) throw InvalidParameter("period length must be at least 1");
  if (!(dwell_range.first > 0.0) || !(dwell_range.second >= dwell_range.first)) {
    throw InvalidParameter("dwell range must satisfy 0 < lo <= hi");
  }

  Rng rng(seed);
  constexpr int kRetries = 32;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    std::vector<InteractionMatrix> pool;
    std::vector<Segment> segments;
    for (int k = 0; k < period_len; ++k) {
      pool.push_back(random_doubly_stochastic(n, rng));
      segments.push_back({rng.uniform(dwell_range.first, dwell_range.second), k});
    }
    SwitchingSchedule schedule(std::move(pool), std::move(segments), /*periodic=*/true);
    const auto window = schedule.find_smallest_window();
    if (!window) continue;

    Scenario s{"doubly-stochastic", std::move(schedule),
               simplex_state(random_interior_point(n, rng), 0.0), *window,
               /*horizon=*/200.0, ConvergeUniform{1e-6}};
    return s;
  }
  throw GenerationFailed("no strongly connected schedule after bounded retries");
}

namespace {

struct ExpectationOutcome {
  bool satisfied;
  double measured;
  std::string detail;
};

ExpectationOutcome evaluate(const ConvergeUniform& e, const Scenario&, const Trajectory& traj) {
  const int n = traj.n();
  const double dist =
      (traj.back().x - Eigen::VectorXd::Constant(n, 1.0 / n)).lpNorm<Eigen::Infinity>();
  return {dist <= e.tol, dist,
          "final distance to uniform " + std::to_string(dist)};
}

ExpectationOutcome evaluate(const ConvergeTo& e, const Scenario&, const Trajectory& traj) {
  const double dist = (traj.back().x - e.target).lpNorm<Eigen::Infinity>();
  return {dist <= e.tol, dist, "final distance to target " + std::to_string(dist)};
}

ExpectationOutcome evaluate(const NonConvergent& e, const Scenario&, const Trajectory& traj) {
  const double tail_start = traj.back().t - e.tail_window;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(traj.n());
  int count = 0;
  for (const auto& s : traj.samples()) {
    if (s.t >= tail_start) {
      mean += s.x;
      ++count;
    }
  }
  if (count == 0) return {false, 0.0, "empty tail window"};
  mean /= count;
  double amplitude = 0.0;
  for (const auto& s : traj.samples()) {
    if (s.t >= tail_start) {
      amplitude = std::max(amplitude, (s.x - mean).lpNorm<Eigen::Infinity>());
    }
  }
  return {amplitude >= e.min_amplitude, amplitude,
          "tail oscillation amplitude " + std::to_string(amplitude)};
}

ExpectationOutcome evaluate(const ConvergeSomewhere& e, const Scenario& s,
                            const Trajectory& traj) {
  const double period = s.schedule.period();
  const Sample* prev = traj.sample_at(traj.back().t - period, 1e-6);
  if (prev == nullptr) return {false, 0.0, "no sample one period before the end"};
  const double displacement = (traj.back().x - prev->x).lpNorm<Eigen::Infinity>();
  const double min_coord = traj.back().ext.l;
  const bool ok = displacement <= e.tol && min_coord >= e.vertex_margin;
  return {ok, displacement,
          "period displacement " + std::to_string(displacement) + ", min coordinate " +
              std::to_string(min_coord)};
}

}  // namespace

std::pair<Trajectory, Verdict> run_scenario(const Scenario& s, const IntegratorConfig& cfg) {
  Trajectory traj = integrate(s.schedule, s.x0, cfg);

  Verdict verdict;
  bool doubly = true;
  try {
    s.schedule.verify_doubly_stochastic();
  } catch (const NotDoublyStochastic&) {
    doubly = false;
  }
  verdict.assumptions_met = doubly && s.schedule.verify_joint_connectivity(s.window);

  const auto outcome =
      std::visit([&](const auto& e) { return evaluate(e, s, traj); }, s.expectation);
  verdict.satisfied = outcome.satisfied;
  verdict.measured = outcome.measured;
  verdict.detail = outcome.detail;

  if (verdict.assumptions_met) {
    try {
      verdict.certificate = certificate_from_run(s.schedule, s.x0.x, s.window, traj);
      verdict.envelope = check_envelope(*verdict.certificate, traj, true);
    } catch (const Error&) {
      // m < 2 or a horizon too short for l0: run stands, certificate doesn't.
    }
  }
  return {std::move(traj), std::move(verdict)};
}

IntegratorConfig default_config(const Scenario& s) {
  IntegratorConfig cfg;
  cfg.horizon = s.horizon;
  return cfg;
}

}  // namespace appraisal
