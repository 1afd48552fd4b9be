#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "forkcode/errors.hpp"
#include "forkcode/source_model.hpp"

// Admissible-rate region of the fork network: one lower bound per nonempty
// source subset W, Sum_{j in W} r_j >= H(alpha_W | alpha_notW). The region
// is a contra-polymatroid; its vertices follow from chain-rule evaluations.

namespace forkcode {

// Sentinel for an unconstrained link rate.
inline constexpr double kUnboundedRate = std::numeric_limits<double>::infinity();

struct RatePoint {
  std::vector<double> rates;

  int k() const { return static_cast<int>(rates.size()); }
};

inline void validate_rate_point(const RatePoint& p) {
  for (double r : p.rates) {
    if (std::isnan(r) || r < 0.0) {
      fail(ErrorCode::kInvalidArgument, "rates must be nonnegative or unbounded");
    }
  }
}

struct RateConstraint {
  SubsetMask subset = 0;  // nonempty
  double bound = 0.0;     // bits per source symbol
};

struct RateRegion {
  int k = 0;
  std::vector<RateConstraint> constraints;  // exactly 2^k - 1, mask order

  const RateConstraint& constraint(SubsetMask mask) const {
    return constraints[mask - 1];
  }
};

inline RateRegion build_region(const JointSourceSpec& spec) {
  RateRegion region;
  region.k = spec.k();
  SubsetMask full = full_mask(region.k);
  region.constraints.reserve(full);
  for (SubsetMask mask = 1; mask <= full; ++mask) {
    region.constraints.push_back({mask, conditional_entropy(spec, mask)});
  }
  return region;
}

enum class MembershipMode { kClosed, kOpen };

struct ConstraintSlack {
  SubsetMask subset = 0;
  double slack = 0.0;  // Sum_{j in W} r_j - bound
  bool satisfied = false;
};

struct MembershipResult {
  bool inside = false;
  std::vector<ConstraintSlack> slacks;
  std::vector<SubsetMask> violated;
};

// CLOSED checks the non-strict inequalities, OPEN the strict ones.
// Unbounded coordinates satisfy every constraint they participate in.
inline MembershipResult membership(const RateRegion& region, const RatePoint& p,
                                   MembershipMode mode) {
  if (p.k() != region.k) {
    fail(ErrorCode::kDimensionMismatch, "rate point dimension != region dimension");
  }
  validate_rate_point(p);
  MembershipResult result;
  result.inside = true;
  result.slacks.reserve(region.constraints.size());
  for (const RateConstraint& c : region.constraints) {
    double sum = 0.0;
    for (int j = 0; j < region.k; ++j) {
      if (c.subset >> j & 1u) sum += p.rates[j];
    }
    double slack = sum - c.bound;
    bool ok = mode == MembershipMode::kClosed ? slack >= 0.0 : slack > 0.0;
    result.slacks.push_back({c.subset, slack, ok});
    if (!ok) {
      result.inside = false;
      result.violated.push_back(c.subset);
    }
  }
  return result;
}

// Full-subset bound: the joint entropy, and the coordinate sum of every
// vertex of the region.
inline double min_sum_rate(const RateRegion& region) {
  return region.constraint(full_mask(region.k)).bound;
}

struct CornerPoint {
  RatePoint point;
  // 1-based source orderings that generate this vertex.
  std::vector<std::vector<int>> permutations;
};

namespace detail {
// Marginal entropy of subset S recovered from the region's bounds:
// H(alpha_S) = H(all) - bound(complement of S) for proper S.
inline double marginal_entropy_from_bounds(const RateRegion& region, SubsetMask s) {
  if (s == 0) return 0.0;
  SubsetMask full = full_mask(region.k);
  if (s == full) return region.constraint(full).bound;
  return region.constraint(full).bound - region.constraint(full & ~s).bound;
}
}  // namespace detail

// One candidate vertex per source permutation pi:
//   r_{pi(i)} = H(alpha_{pi(i)} | alpha_{pi(i+1)}, ..., alpha_{pi(k)}).
// Coordinate-wise duplicates (within 1e-9) are merged.
inline std::vector<CornerPoint> corner_points(const RateRegion& region) {
  for (const RateConstraint& c : region.constraints) {
    if (!std::isfinite(c.bound)) {
      fail(ErrorCode::kUnboundedRegion, "corner enumeration needs finite bounds");
    }
  }
  const int k = region.k;
  std::vector<int> perm(k);
  for (int j = 0; j < k; ++j) perm[j] = j;

  std::vector<CornerPoint> corners;
  constexpr double kDedupTolerance = 1e-9;
  do {
    RatePoint point;
    point.rates.assign(k, 0.0);
    SubsetMask suffix = 0;  // sources pi(i+1..k)
    for (int i = k; i-- > 0;) {
      SubsetMask with = suffix | (SubsetMask{1} << perm[i]);
      point.rates[perm[i]] = detail::marginal_entropy_from_bounds(region, with) -
                             detail::marginal_entropy_from_bounds(region, suffix);
      if (point.rates[perm[i]] < 0.0) point.rates[perm[i]] = 0.0;
      suffix = with;
    }
    std::vector<int> perm_display(k);
    for (int i = 0; i < k; ++i) perm_display[i] = perm[i] + 1;

    bool merged = false;
    for (CornerPoint& existing : corners) {
      bool same = true;
      for (int j = 0; j < k; ++j) {
        if (std::abs(existing.point.rates[j] - point.rates[j]) > kDedupTolerance) {
          same = false;
          break;
        }
      }
      if (same) {
        existing.permutations.push_back(perm_display);
        merged = true;
        break;
      }
    }
    if (!merged) corners.push_back({std::move(point), {perm_display}});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return corners;
}

}  // namespace forkcode
