#pragma once

#include <optional>
#include <vector>

#include "appraisal/core_types.hpp"

namespace appraisal {

// One dwell interval: the pool matrix `matrix_index` is active for `tau` time units.
struct Segment {
  double tau;
  int matrix_index;
};

// Dwell-time bounds of a schedule: 0 < lower <= tau_k <= upper.
struct DwellBounds {
  double lower;
  double upper;
};

// Piecewise-constant assignment of interaction matrices over time.
//
// The segment list describes one period; a periodic schedule cycles it
// forever, a non-periodic one ends after the last segment. The matrix active
// on [t_k, t_{k+1}) is C(t_k), i.e. queries are right-continuous at switch
// instants. Switch times are accumulated in extended precision so long
// horizons do not drift.
class SwitchingSchedule {
 public:
  SwitchingSchedule(std::vector<InteractionMatrix> pool, std::vector<Segment> segments,
                    bool periodic, double t0 = 0.0);

  // Convenience: cycle through the pool in order, all dwells equal to tau.
  static SwitchingSchedule uniform_cycle(std::vector<InteractionMatrix> pool, double tau,
                                         bool periodic = true, double t0 = 0.0);

  int n() const { return pool_.front().n(); }
  double t0() const { return t0_; }
  bool periodic() const { return periodic_; }
  int segments_per_period() const { return static_cast<int>(segments_.size()); }
  const std::vector<Segment>& segments() const { return segments_; }
  int pool_size() const { return static_cast<int>(pool_.size()); }
  const InteractionMatrix& pool_matrix(int idx) const { return pool_[idx]; }

  // Duration of one pass over the segment list.
  double period() const { return static_cast<double>(period_); }

  // End of a non-periodic schedule (t0 + period). Throws for periodic ones.
  double end_time() const;

  // Switch time t_k for global segment index k >= 0.
  double switch_time(long k) const;

  // Global index k with t in [t_k, t_{k+1}). Throws OutOfHorizon for t < t0
  // and, for non-periodic schedules, t at or past the end.
  long segment_index_at(double t) const;

  int matrix_index_of(long k) const;
  const InteractionMatrix& matrix_of_segment(long k) const;
  const InteractionMatrix& matrix_at(double t) const;

  DwellBounds dwell_bounds() const;

  // Union of the support graphs of segments start_index .. start_index+window-1.
  // Periodic schedules wrap; non-periodic ones throw OutOfHorizon when the
  // window runs past the end.
  DirectedGraph union_graph(long start_index, int window) const;

  // Checks that every matrix used by the schedule is doubly stochastic within
  // tol and returns the minimum nonzero weight gamma over all of them.
  // Throws NotDoublyStochastic with the offending pool index.
  double verify_doubly_stochastic(double tol = InteractionMatrix::kDefaultTol) const;

  // True iff the union graph over every length-`window` run of segments is
  // strongly connected. Window starts range over one period for periodic
  // schedules and over all full windows otherwise (a window longer than a
  // non-periodic schedule degrades to the single full union).
  bool verify_joint_connectivity(int window) const;

  // Smallest window satisfying verify_joint_connectivity, scanning
  // 1, 2, ..., cap. cap == 0 picks n() * segments_per_period().
  std::optional<int> find_smallest_window(int cap = 0) const;

 private:
  std::vector<InteractionMatrix> pool_;
  std::vector<DirectedGraph> supports_;  // one per pool entry
  std::vector<Segment> segments_;
  bool periodic_;
  double t0_;
  std::vector<long double> prefix_;  // prefix_[i] = sum of dwells of segments [0, i)
  long double period_;
};

}  // namespace appraisal
