#include "appraisal/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "appraisal/dynamics.hpp"
#include "appraisal/scenarios.hpp"

namespace appraisal::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

Eigen::VectorXd parse_vector(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    values.push_back(std::stod(item, &pos));
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw InvalidParameter("malformed number in vector: " + item);
  }
  if (values.empty()) throw InvalidParameter("empty vector");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd matrix_from_json(const json& entry, int n) {
  Eigen::MatrixXd m(n, n);
  if (!entry.is_array() || entry.empty()) {
    throw InvalidParameter("each matrix must be a non-empty array");
  }
  if (entry.front().is_array()) {  // nested rows
    if (static_cast<int>(entry.size()) != n) {
      throw InvalidParameter("matrix must have n rows");
    }
    for (int i = 0; i < n; ++i) {
      const auto& row = entry[i];
      if (static_cast<int>(row.size()) != n) {
        throw InvalidParameter("matrix row must have n entries");
      }
      for (int j = 0; j < n; ++j) m(i, j) = row[j].get<double>();
    }
    return m;
  }
  if (static_cast<int>(entry.size()) != n * n) {  // flat row-major
    throw InvalidParameter("flat matrix must have n*n entries");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = entry[i * n + j].get<double>();
  }
  return m;
}

}  // namespace

MatrixFile load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open input file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("JSON parse failure: ") + e.what());
  }

  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw InvalidParameter("input needs an integer field \"n\"");
  }
  if (!doc.contains("matrices") || !doc["matrices"].is_array() || doc["matrices"].empty()) {
    throw InvalidParameter("input needs a non-empty array field \"matrices\"");
  }
  if (!doc.contains("dwell")) {
    throw InvalidParameter("input needs a field \"dwell\" (scalar or per-matrix array)");
  }

  MatrixFile file;
  file.n = doc["n"].get<int>();
  if (file.n < 2) throw InvalidParameter("n must be at least 2");
  for (const auto& entry : doc["matrices"]) {
    file.matrices.push_back(InteractionMatrix::validated(matrix_from_json(entry, file.n)));
  }

  const auto& dwell = doc["dwell"];
  if (dwell.is_number()) {
    file.dwells.assign(file.matrices.size(), dwell.get<double>());
  } else if (dwell.is_array()) {
    if (dwell.size() != file.matrices.size()) {
      throw InvalidParameter("\"dwell\" array must have one entry per matrix");
    }
    for (const auto& d : dwell) file.dwells.push_back(d.get<double>());
  } else {
    throw InvalidParameter("\"dwell\" must be a scalar or an array");
  }
  return file;
}

SwitchingSchedule schedule_from(const MatrixFile& file, bool periodic, double t0) {
  std::vector<Segment> segments;
  segments.reserve(file.matrices.size());
  for (int i = 0; i < static_cast<int>(file.matrices.size()); ++i) {
    segments.push_back({file.dwells[i], i});
  }
  return SwitchingSchedule(file.matrices, std::move(segments), periodic, t0);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const RateCertificate* cert, double v0) {
  const int n = traj.n();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",h,l,V";
  if (cert != nullptr) out << ",bound";
  out << "\n";
  const double t0 = traj.front().t;
  for (const auto& s : traj.samples()) {
    out << format_double(s.t);
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.x(i));
    out << ',' << format_double(s.ext.h) << ',' << format_double(s.ext.l) << ','
        << format_double(s.ext.v);
    if (cert != nullptr) out << ',' << format_double(bound_at(*cert, v0, s.t - t0));
    out << "\n";
  }
}

namespace {

json to_json(const RateCertificate& c) {
  return json{{"n", c.n},
              {"m", c.m},
              {"window", c.window},
              {"tau_lower", c.tau_lower},
              {"tau_upper", c.tau_upper},
              {"gamma", c.gamma},
              {"l0", c.l0},
              {"alpha", c.alpha},
              {"mu", c.mu},
              {"lambda", c.lambda},
              {"prefactor", c.prefactor},
              {"decay_product", c.decay_product},
              {"near_vacuous", c.near_vacuous}};
}

json to_json(const EnvelopeReport& r) {
  return json{{"assumptions_met", r.assumptions_met},
              {"max_violation", r.max_violation},
              {"empirical_rate", r.empirical_rate},
              {"tail_samples", r.tail_samples},
              {"lambda", r.lambda},
              {"near_vacuous", r.near_vacuous}};
}

json to_json(const MonitorReport& m) {
  json j{{"max_conservation_residual", m.max_conservation_residual},
         {"max_simplex_violation", m.max_simplex_violation},
         {"h_increase_max", m.h_increase_max},
         {"l_decrease_max", m.l_decrease_max}};
  if (m.positivity_time) {
    j["positivity_time"] = *m.positivity_time;
  } else {
    j["positivity_time"] = nullptr;
  }
  return j;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

struct AssumptionStatus {
  bool doubly_stochastic = false;
  std::optional<double> gamma;
  std::optional<int> failing_matrix;
  bool connectivity = false;
  std::optional<int> window;

  bool all() const { return doubly_stochastic && connectivity; }
};

AssumptionStatus check_assumptions(const SwitchingSchedule& schedule,
                                   std::optional<int> declared_window) {
  AssumptionStatus st;
  try {
    st.gamma = schedule.verify_doubly_stochastic();
    st.doubly_stochastic = true;
  } catch (const NotDoublyStochastic& e) {
    st.failing_matrix = e.matrix_index;
  }
  if (declared_window) {
    st.window = declared_window;
    st.connectivity = schedule.verify_joint_connectivity(*declared_window);
  } else if (auto w = schedule.find_smallest_window()) {
    st.window = w;
    st.connectivity = true;
  }
  return st;
}

json to_json(const AssumptionStatus& st, const DwellBounds& dwells) {
  json a;
  a["doubly_stochastic"]["pass"] = st.doubly_stochastic;
  if (st.gamma) a["doubly_stochastic"]["gamma"] = *st.gamma;
  if (st.failing_matrix) a["doubly_stochastic"]["failing_matrix"] = *st.failing_matrix;
  a["joint_connectivity"]["pass"] = st.connectivity;
  if (st.window) {
    a["joint_connectivity"]["window"] = *st.window;
  } else {
    a["joint_connectivity"]["window"] = nullptr;
  }
  a["dwell_bounds"]["lower"] = dwells.lower;
  a["dwell_bounds"]["upper"] = dwells.upper;
  return a;
}

struct CommonFlags {
  std::string input;
  std::string x0_csv;
  double horizon = 0.0;  // 0 = command default (200 for simulate, the scenario's own otherwise)
  double max_step = 1e-3;
  int window = 0;  // 0 = auto
  std::string out_path;
  std::string format = "json";
  bool require_assumptions = false;
};

AppraisalState initial_state(const CommonFlags& flags, int n, double t0) {
  if (flags.x0_csv.empty()) return barycenter_state(n, t0);
  const Eigen::VectorXd x0 = parse_vector(flags.x0_csv);
  if (x0.size() != n) throw DimensionMismatch(n, static_cast<int>(x0.size()));
  return simplex_state(x0, t0);
}

void emit_trajectory(const CommonFlags& flags, std::ostream& out, const Trajectory& traj,
                     const RateCertificate* cert, const json& summary) {
  if (!flags.out_path.empty()) {
    std::ofstream file(flags.out_path);
    if (!file) throw InvalidParameter("cannot open output file: " + flags.out_path);
    write_trajectory_csv(file, traj, cert, traj.front().ext.v);
  }
  if (flags.format == "csv") {
    write_trajectory_csv(out, traj, cert, traj.front().ext.v);
  } else {
    out << summary.dump(2) << "\n";
  }
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const MatrixFile file = load_matrix_file(flags.input);
  const SwitchingSchedule schedule = schedule_from(file);
  const AppraisalState x0 = initial_state(flags, schedule.n(), schedule.t0());

  const auto status = check_assumptions(
      schedule, flags.window > 0 ? std::optional<int>(flags.window) : std::nullopt);
  if (flags.require_assumptions && !status.all()) {
    err << "assumption checks failed; rerun without --require-assumptions to simulate anyway\n";
    return kExitAssumptions;
  }

  IntegratorConfig cfg;
  cfg.horizon = flags.horizon > 0 ? flags.horizon : 200.0;
  cfg.max_step = flags.max_step;
  const Trajectory traj = integrate(schedule, x0, cfg);

  std::optional<RateCertificate> cert;
  std::optional<EnvelopeReport> envelope;
  if (status.all()) {
    try {
      cert = certificate_from_run(schedule, x0.x, *status.window, traj);
      envelope = check_envelope(*cert, traj, true);
    } catch (const Error&) {
      // n or m outside the certified regime; the simulation stands alone.
    }
  }

  json summary;
  summary["final"]["t"] = traj.back().t;
  summary["final"]["x"] = vector_to_json(traj.back().x);
  summary["monitors"] = to_json(traj.monitors());
  summary["assumptions"] = to_json(status, schedule.dwell_bounds());
  summary["certificate"] = cert ? to_json(*cert) : json(nullptr);
  summary["envelope"] = envelope ? to_json(*envelope) : json(nullptr);

  emit_trajectory(flags, out, traj, cert ? &*cert : nullptr, summary);
  return kExitOk;
}

int cmd_certify(const CommonFlags& flags, std::ostream& out, std::ostream&) {
  const MatrixFile file = load_matrix_file(flags.input);
  const SwitchingSchedule schedule = schedule_from(file);
  const AppraisalState x0 = initial_state(flags, schedule.n(), schedule.t0());

  int window = flags.window;
  if (window <= 0) {
    const auto smallest = schedule.find_smallest_window();
    if (!smallest) {
      throw AssumptionViolated("no window makes every union graph strongly connected");
    }
    window = *smallest;
  }

  const int n = schedule.n();
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (x0.x(i) > kPositivityThreshold) ++m;
  }
  // Integrate just far enough to read l0 at t_{(n-m)B}.
  IntegratorConfig cfg;
  cfg.max_step = flags.max_step;
  cfg.horizon = std::max(schedule.switch_time(static_cast<long>(n - m) * window),
                         schedule.switch_time(1));
  const Trajectory traj = integrate(schedule, x0, cfg);

  const RateCertificate cert = certificate_from_run(schedule, x0.x, window, traj);
  out << to_json(cert).dump(2) << "\n";
  return kExitOk;
}

int cmd_check_assumptions(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const MatrixFile file = load_matrix_file(flags.input);
  const SwitchingSchedule schedule = schedule_from(file);
  const auto status = check_assumptions(
      schedule, flags.window > 0 ? std::optional<int>(flags.window) : std::nullopt);
  const DwellBounds dwells = schedule.dwell_bounds();

  if (status.doubly_stochastic) {
    err << "doubly stochastic: pass (gamma = " << format_double(*status.gamma) << ")\n";
  } else {
    err << "doubly stochastic: FAIL (matrix " << *status.failing_matrix
        << " has unbalanced columns)\n";
  }
  if (status.connectivity) {
    err << "joint connectivity: pass (window B = " << *status.window << ")\n";
  } else if (status.window) {
    err << "joint connectivity: FAIL for declared window B = " << *status.window << "\n";
  } else {
    err << "joint connectivity: FAIL (no window up to the scan cap works)\n";
  }
  err << "dwell bounds: [" << format_double(dwells.lower) << ", " << format_double(dwells.upper)
      << "]\n";

  out << to_json(status, dwells).dump(2) << "\n";
  return status.all() ? kExitOk : kExitAssumptions;
}

int cmd_scenario(const std::string& name, const CommonFlags& flags, int n, int period,
                 std::uint64_t seed, std::ostream& out, std::ostream& err) {
  std::optional<Scenario> scenario;
  if (name == "fig1") {
    scenario = fig1_scenario();
  } else if (name == "fig2") {
    scenario = fig2_scenario();
  } else if (name == "doubly-stochastic") {
    scenario = doubly_stochastic_scenario(n, period, seed);
  } else {
    throw InvalidParameter("unknown scenario: " + name +
                           " (expected fig1, fig2 or doubly-stochastic)");
  }

  IntegratorConfig cfg = default_config(*scenario);
  cfg.horizon = flags.horizon > 0 ? flags.horizon : scenario->horizon;
  cfg.max_step = flags.max_step;
  auto [traj, verdict] = run_scenario(*scenario, cfg);

  json report;
  report["name"] = scenario->name;
  report["satisfied"] = verdict.satisfied;
  report["detail"] = verdict.detail;
  report["assumptions_met"] = verdict.assumptions_met;
  report["measured"] = verdict.measured;
  report["final"]["t"] = traj.back().t;
  report["final"]["x"] = vector_to_json(traj.back().x);
  report["certificate"] = verdict.certificate ? to_json(*verdict.certificate) : json(nullptr);
  report["envelope"] = verdict.envelope ? to_json(*verdict.envelope) : json(nullptr);

  emit_trajectory(flags, out, traj, verdict.certificate ? &*verdict.certificate : nullptr,
                  report);
  if (!verdict.satisfied) {
    err << "scenario " << scenario->name << " missed its expectation: " << verdict.detail
        << "\n";
    return kExitVerdict;
  }
  return kExitOk;
}

int cmd_equilibrium(const CommonFlags& flags, std::ostream& out, std::ostream&) {
  const MatrixFile file = load_matrix_file(flags.input);
  const InteractionMatrix& c = file.matrices.front();
  Eigen::VectorXd start = flags.x0_csv.empty() ? Eigen::VectorXd::Constant(c.n(), 1.0 / c.n())
                                               : parse_vector(flags.x0_csv);
  const Eigen::VectorXd x_star = interior_equilibrium(c, start);
  const double residual = rhs(c, x_star).lpNorm<Eigen::Infinity>();

  json result;
  result["x_star"] = vector_to_json(x_star);
  result["residual"] = residual;
  out << result.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and certification toolkit for the continuous-time "
               "distributed self-appraisal model on switching networks"};
  app.require_subcommand(1);

  CommonFlags flags;
  int scenario_n = 4;
  int scenario_period = 2;
  std::uint64_t seed = 1;
  std::string scenario_name;

  const auto add_common = [&](CLI::App* cmd, bool with_input) {
    if (with_input) {
      cmd->add_option("input", flags.input, "matrix schedule JSON file")->required();
    }
    cmd->add_option("--x0", flags.x0_csv, "initial appraisals, comma separated");
    cmd->add_option("--horizon", flags.horizon, "end time of the integration");
    cmd->add_option("--max-step", flags.max_step, "integration step bound");
    cmd->add_option("--B", flags.window, "declared connectivity window (0 = find smallest)");
    cmd->add_option("--out", flags.out_path, "write the trajectory CSV here");
    cmd->add_option("--format", flags.format, "stdout payload: json summary or csv trajectory")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* simulate = app.add_subcommand("simulate", "integrate a schedule and emit CSV + summary");
  add_common(simulate, true);
  simulate->add_flag("--require-assumptions", flags.require_assumptions,
                     "refuse to run when the model assumptions fail");

  auto* certify = app.add_subcommand("certify", "emit the exponential-rate certificate");
  add_common(certify, true);

  auto* check = app.add_subcommand("check-assumptions",
                                   "report double stochasticity, connectivity and dwell bounds");
  check->add_option("input", flags.input, "matrix schedule JSON file")->required();
  check->add_option("--B", flags.window, "declared connectivity window (0 = find smallest)");

  auto* scenario = app.add_subcommand("scenario", "run a bundled experiment");
  scenario->add_option("name", scenario_name, "fig1 | fig2 | doubly-stochastic")->required();
  scenario->add_option("--seed", seed, "generator seed (doubly-stochastic)");
  scenario->add_option("--n", scenario_n, "network size (doubly-stochastic)");
  scenario->add_option("--period", scenario_period, "matrices per period (doubly-stochastic)");
  scenario->add_option("--horizon", flags.horizon, "override the scenario horizon");
  scenario->add_option("--max-step", flags.max_step, "integration step bound");
  scenario->add_option("--out", flags.out_path, "write the trajectory CSV here");
  scenario->add_option("--format", flags.format, "stdout payload: json verdict or csv trajectory")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* equilibrium =
      app.add_subcommand("equilibrium", "solve for the non-vertex equilibrium of one matrix");
  equilibrium->add_option("input", flags.input, "matrix JSON file")->required();
  equilibrium->add_option("--x0", flags.x0_csv, "interior starting point, comma separated");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags, out, err);
    if (certify->parsed()) return cmd_certify(flags, out, err);
    if (check->parsed()) return cmd_check_assumptions(flags, out, err);
    if (scenario->parsed()) {
      return cmd_scenario(scenario_name, flags, scenario_n, scenario_period, seed, out, err);
    }
    if (equilibrium->parsed()) return cmd_equilibrium(flags, out, err);
  } catch (const NotDoublyStochastic& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssumptions;
  } catch (const AssumptionViolated& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssumptions;
  } catch (const SimplexBlowup& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConvergedToVertex& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NoFeasibleRoot& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const GenerationFailed& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  err << "no command given\n";
  return kExitInput;
}

}  // namespace appraisal::cli
