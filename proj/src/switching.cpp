#include "appraisal/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace appraisal {

SwitchingSchedule::SwitchingSchedule(std::vector<InteractionMatrix> pool,
                                     std::vector<Segment> segments, bool periodic, double t0)
    : pool_(std::move(pool)), segments_(std::move(segments)), periodic_(periodic), t0_(t0) {
  if (pool_.empty()) throw InvalidParameter("schedule needs a nonempty matrix pool");
  if (segments_.empty()) throw InvalidParameter("schedule needs at least one segment");
  const int dim = pool_.front().n();
  for (const auto& m : pool_) {
    if (m.n() != dim) throw DimensionMismatch(dim, m.n());
  }
  prefix_.reserve(segments_.size() + 1);
  prefix_.push_back(0.0L);
  for (const auto& seg : segments_) {
    if (!(seg.tau > 0.0)) throw InvalidParameter("dwell times must be positive");
    if (seg.matrix_index < 0 || seg.matrix_index >= pool_size()) {
      throw InvalidParameter("segment references a matrix outside the pool");
    }
    prefix_.push_back(prefix_.back() + static_cast<long double>(seg.tau));
  }
  period_ = prefix_.back();
  supports_.reserve(pool_.size());
  for (const auto& m : pool_) supports_.push_back(support_graph(m));
}

SwitchingSchedule SwitchingSchedule::uniform_cycle(std::vector<InteractionMatrix> pool,
                                                   double tau, bool periodic, double t0) {
  std::vector<Segment> segments;
  segments.reserve(pool.size());
  for (int i = 0; i < static_cast<int>(pool.size()); ++i) segments.push_back({tau, i});
  return SwitchingSchedule(std::move(pool), std::move(segments), periodic, t0);
}

double SwitchingSchedule::end_time() const {
  if (periodic_) throw OutOfHorizon("a periodic schedule has no end time");
  return static_cast<double>(static_cast<long double>(t0_) + period_);
}

double SwitchingSchedule::switch_time(long k) const {
  if (k < 0) throw InvalidParameter("switch index must be nonnegative");
  const long count = segments_per_period();
  if (!periodic_ && k > count) {
    throw OutOfHorizon("switch index past the end of a non-periodic schedule");
  }
  const long full = k / count;
  const long rem = k % count;
  return static_cast<double>(static_cast<long double>(t0_) + full * period_ + prefix_[rem]);
}

long SwitchingSchedule::segment_index_at(double t) const {
  if (t < t0_) throw OutOfHorizon("query before the schedule start");
  const long count = segments_per_period();
  long double offset = static_cast<long double>(t) - static_cast<long double>(t0_);

  // Switch times handed out as doubles can round a hair below the exact
  // boundary; queries within a few ulps of a boundary resolve to the new
  // segment so that matrix_at(switch_time(k)) is right-continuous.
  const long double snap =
      std::max<long double>(4.0L * std::numeric_limits<double>::epsilon() * std::abs(t), 1e-15L);

  long full = 0;
  if (periodic_) {
    full = static_cast<long>(std::floor(static_cast<double>(offset / period_)));
    offset -= full * period_;
    if (offset < 0.0L) {
      --full;
      offset += period_;
    }
    if (offset >= period_ - snap) {  // boundary rounding
      ++full;
      offset = 0.0L;
    }
  } else if (offset >= period_ - snap) {
    throw OutOfHorizon("query at or past the end of a non-periodic schedule");
  }

  // first prefix strictly greater than offset, minus one: right-continuity
  const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), offset);
  long idx = static_cast<long>(it - prefix_.begin()) - 1;
  idx = std::clamp(idx, 0L, count - 1);
  if (idx + 1 < static_cast<long>(prefix_.size()) && prefix_[idx + 1] - offset <= snap) {
    ++idx;  // the query sits on the next boundary up to rounding
    if (idx == count) return (full + 1) * count;
  }
  return full * count + idx;
}

int SwitchingSchedule::matrix_index_of(long k) const {
  if (k < 0) throw InvalidParameter("segment index must be nonnegative");
  const long count = segments_per_period();
  if (!periodic_ && k >= count) {
    throw OutOfHorizon("segment index past the end of a non-periodic schedule");
  }
  return segments_[static_cast<std::size_t>(k % count)].matrix_index;
}

const InteractionMatrix& SwitchingSchedule::matrix_of_segment(long k) const {
  return pool_[matrix_index_of(k)];
}

const InteractionMatrix& SwitchingSchedule::matrix_at(double t) const {
  return matrix_of_segment(segment_index_at(t));
}

DwellBounds SwitchingSchedule::dwell_bounds() const {
  DwellBounds b{segments_.front().tau, segments_.front().tau};
  for (const auto& seg : segments_) {
    b.lower = std::min(b.lower, seg.tau);
    b.upper = std::max(b.upper, seg.tau);
  }
  return b;
}

DirectedGraph SwitchingSchedule::union_graph(long start_index, int window) const {
  if (window < 1) throw InvalidParameter("union window must be at least 1");
  if (start_index < 0) throw InvalidParameter("window start must be nonnegative");
  DirectedGraph g(n());
  for (long k = start_index; k < start_index + window; ++k) {
    g.merge(supports_[matrix_index_of(k)]);  // throws OutOfHorizon past a finite end
  }
  return g;
}

double SwitchingSchedule::verify_doubly_stochastic(double tol) const {
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  double gamma = std::numeric_limits<double>::infinity();
  for (const auto& seg : segments_) {
    const auto& m = pool_[seg.matrix_index];
    if (m.column_sum_deviation() > tol) throw NotDoublyStochastic(seg.matrix_index);
    gamma = std::min(gamma, m.gamma());
  }
  return gamma;
}

bool SwitchingSchedule::verify_joint_connectivity(int window) const {
  if (window < 1) throw InvalidParameter("connectivity window must be at least 1");
  const long count = segments_per_period();
  if (periodic_) {
    for (long l = 0; l < count; ++l) {
      if (!strongly_connected(union_graph(l, window))) return false;
    }
    return true;
  }
  // Finite schedule: every full window; a window longer than the schedule
  // collapses to the single union over everything.
  const long starts = std::max(1L, count - window + 1);
  const int effective = static_cast<int>(std::min<long>(window, count));
  for (long l = 0; l < starts; ++l) {
    if (!strongly_connected(union_graph(l, effective))) return false;
  }
  return true;
}

std::optional<int> SwitchingSchedule::find_smallest_window(int cap) const {
  if (cap <= 0) cap = n() * segments_per_period();
  for (int b = 1; b <= cap; ++b) {
    if (verify_joint_connectivity(b)) return b;
  }
  return std::nullopt;
}

}  // namespace appraisal
