#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "er/params.hpp"

namespace er {

// Time bookkeeping for the iteration.  [0, 1] is discretized on a fine tick
// grid with denominator 2^48, so interval endpoints, adjacency, and measures
// are exact integer arithmetic, and tick -> double conversion is exact
// (binary scaling of integers below 2^53).
constexpr std::int64_t kTickDenom = std::int64_t(1) << 48;

inline double tick_time(std::int64_t i) {
  return double(i) / double(kTickDenom);
}

// ---------------------------------------------------------------------------
// Level-q partition: closed intervals covering [0, 1], consecutive intervals
// sharing exactly one endpoint, each carrying an index j in {0..q}.  The two
// outermost intervals mark where the fields vanish identically.
// ---------------------------------------------------------------------------
struct TimeInterval {
  std::int64_t lo = 0, hi = 0;  // ticks, lo < hi
  int j = 0;
  double length() const { return tick_time(hi - lo); }
};

struct Partition {
  int q = 0;
  std::vector<TimeInterval> I;  // I.front().lo = 0, I.back().hi = kTickDenom
  int n_interior() const { return static_cast<int>(I.size()) - 2; }
};

// The level-0 partition: [0, 3/8], [3/8, 5/8], [5/8, 1], all with j = 0.
Partition seed_partition();

// Exact tick measure of the union of interior intervals with index <= j.
std::int64_t region_measure_ticks(const Partition& p, int j);

// Structural + quantitative validation; one named check per invariant
// (chaining, j ranges, minimum lengths, region measures, support window).
struct PartitionCheck {
  std::string name;
  double margin;  // >= 0 passes
  bool pass;
};
struct PartitionReport {
  std::vector<PartitionCheck> checks;
  bool all_pass = true;
  std::string to_string() const;
};
PartitionReport validate_partition(const Partition& p, const ParamSet& P);

std::string partition_json(const Partition& p);

// ---------------------------------------------------------------------------
// Refinement q -> q+1: subintervals J, overlap regions K, plateaus H.
// ---------------------------------------------------------------------------
struct JInterval {
  std::int64_t lo = 0, hi = 0;
  int parent = 0;        // index alpha into the parent partition
  bool boundary = false; // touches the parent's boundary (or is J_0/J_last)
  int j = 0;             // the parent interval's index
};

struct KRegion {
  std::int64_t lo = 0, hi = 0;
  bool a1 = false;  // true: sits right of the shared endpoint (inside J_{s+1})
  int j_left = 0, j_right = 0, j_star = 0;
};

struct RefinedPartition {
  int q = 0;  // parent level
  std::vector<JInterval> J;        // indices 0 .. N'+1
  std::vector<KRegion> K;          // K[s] between J[s] and J[s+1]
  std::vector<TimeInterval> H;     // H[s] inside J[s] (j = parent j + 1 preview)
  std::vector<std::string> warnings;  // toy-mode clamps, if any
};

// Attachment rule for the overlap between indices (j, j'): j <= j' attaches
// right of the shared endpoint, j > j' attaches left; j* = min(j, j').
struct OverlapSide {
  bool a1;
  int j_star;
};
OverlapSide overlap_side(int j_left, int j_right);

// Subdivides every interior parent interval into n pieces (n = the largest
// integer strictly below mu |I| / 2, but at least 2), the first n-1 of tick
// length round(2/mu), builds the overlaps of length eta/mu per the
// attachment rule, and the plateaus H = closure(J minus adjacent overlaps).
// Violations of the length prerequisites are hard errors, except in toy mode
// where the subdivision is clamped and a warning is recorded.
RefinedPartition refine_intervals(const Partition& p, const ParamSet& P);

// The level-(q+1) partition: H and K regions ordered by left endpoint;
// overlaps and the two outermost plateaus get j = 0, every other plateau
// inherits parent j + 1.
Partition next_partition(const RefinedPartition& r);

// Region lookup for estimate selection: returns the containing refined
// region (plateau tag 'H' or overlap tag 'K', with its index) and the
// effective estimate index i: the parent's j on a plateau, min(j, j') on an
// overlap.  Shared endpoints resolve to the leftmost containing region.
struct LocateResult {
  char tag;       // 'H' or 'K'
  int index;      // varsigma
  int i;          // effective estimate index
};
LocateResult locate(const RefinedPartition& r, double t);

// ---------------------------------------------------------------------------
// Quadratic partition of unity subordinate to the refinement.  Each cutoff
// is 1 on its plateau and crosses each overlap as cos/sin of a common smooth
// ramp, so the squares sum to 1 exactly.  The ramp is built from the flat
// bump exp(-1/(x(1-x))) and is constant outside the middle (1 - 2*margin)
// of the overlap, keeping supports strictly inside the open overlap union.
// ---------------------------------------------------------------------------
class CutoffFamily {
 public:
  explicit CutoffFamily(const RefinedPartition& r);

  int size() const { return static_cast<int>(plateau_lo_.size()); }
  // chi_s(t) and its first two time derivatives.
  double value(int s, double t) const;
  double d1(int s, double t) const;
  double d2(int s, double t) const;
  // Support interval (closed) of chi_s in ticks.
  std::int64_t support_lo(int s) const;
  std::int64_t support_hi(int s) const;

 private:
  // Per cutoff: ramp-up over K_{s-1} (absent for s = 0) and ramp-down over
  // K_s (absent for the last), plateau in between.
  std::vector<std::int64_t> up_lo_, up_hi_, down_lo_, down_hi_;
  std::vector<std::int64_t> plateau_lo_, plateau_hi_;
};

// The smooth ramp profile on [0, 1] (0 before margin, 1 after 1 - margin)
// and its derivatives; exposed for direct testing.
double ramp_profile(double u);
double ramp_profile_d1(double u);
double ramp_profile_d2(double u);

}  // namespace er
