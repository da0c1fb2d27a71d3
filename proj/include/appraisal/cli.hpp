#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "appraisal/integrator.hpp"
#include "appraisal/rate_certificate.hpp"
#include "appraisal/switching.hpp"

namespace appraisal::cli {

// Stable exit codes, scriptable.
constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;      // scenario ran but missed its expectation
constexpr int kExitInput = 2;        // unparsable or invalid input
constexpr int kExitAssumptions = 3;  // doubly-stochastic / connectivity checks failed
constexpr int kExitNumerical = 4;    // integration or solver failure

// Parsed matrix file: {"n": int, "matrices": [[row-major reals]...],
// "dwell": [reals] or scalar}. Validation of each matrix happens in
// InteractionMatrix::validated.
struct MatrixFile {
  int n = 0;
  std::vector<InteractionMatrix> matrices;
  std::vector<double> dwells;  // one per matrix
};

MatrixFile load_matrix_file(const std::string& path);
SwitchingSchedule schedule_from(const MatrixFile& file, bool periodic = true, double t0 = 0.0);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Header t,x_1..x_n,h,l,V and, when a certificate is supplied, a final
// `bound` column with the envelope value at each sample time.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const RateCertificate* cert = nullptr, double v0 = 0.0);

// Entry point used by the sasim binary and by the tests; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace appraisal::cli
