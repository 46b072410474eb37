#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mql/markov.hpp"

namespace mql {

// Tolerance hierarchy for the numeric work: map-equality, point
// deduplication, and the per-sample tolerance reported with Hausdorff
// distances.
inline constexpr double kMapTol = 1e-9;
inline constexpr double kDedupTol = 1e-7;

// Affine iterated function system on an interval: N >= 2 injective
// contractions with strictly positive weights summing to 1. The interval is
// the attractor's hull, so the extreme map images must reach both endpoints.
struct IfsSystem {
  Rational lower;
  Rational upper;
  std::vector<AffineMap> maps;
  std::vector<Rational> weights;

  int map_count() const { return static_cast<int>(maps.size()); }
  double contraction_factor() const;
  double diameter() const { return (upper - lower).to_double(); }
  void validate() const;

  // Interval-grid map systems with contractive affine maps convert directly;
  // weights carry over.
  static IfsSystem from_map_system(const MapSystem& system);
};

struct AttractorSample {
  std::vector<double> points;  // sorted, deduplicated at `tolerance`
  int depth = 0;
  double tolerance = 0.0;  // bound on the Hausdorff gap to the true attractor
};

// F^depth applied to the pair {lower, upper}; deterministic.
AttractorSample attractor(const IfsSystem& ifs, int depth);

// One application of the Hutchinson map to a point sample.
std::vector<double> hutchinson_step(const IfsSystem& ifs, std::span<const double> sample);

// Hausdorff distance between two finite point sets given in sorted order.
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

// Number of maps sending y to x, within tol; (x, y) must lie on some
// cograph or the call is a domain error.
int branch_index(const IfsSystem& ifs, double x, double y, double tol = kMapTol);

// All x with x = f_i(y) = f_j(y), i != j, for y on a uniform grid of
// `grid_points` samples.
std::vector<double> branch_points(const IfsSystem& ifs, int grid_points);

// Max deviation of the weighted inner product of rescaled functions from the
// uniform-weight inner product, over random piecewise-polynomial test
// functions and sampled base points. Algebraically zero; the return value is
// floating-point noise.
double check_isometry(const IfsSystem& ifs, std::span<const double> weights, int samples,
                      int trials, std::uint64_t seed);

// Composition f_w = f_{w0} o f_{w1} o ... (last letter acts first).
AffineMap compose_word(const IfsSystem& ifs, std::span<const int> word);

// Unique fixed point of f_w, solved in closed form.
double word_fixed_point(const IfsSystem& ifs, std::span<const int> word);

struct ConditionLCertificate {
  std::vector<long long> count_by_length;  // distinct base points of loops of length <= k
  std::vector<double> base_points;         // sorted, deduplicated
  long long word_bound = 0;                // sum of N^k over k <= maxlen
  bool holds = true;
  std::vector<int> grid_sizes;       // echoed request
  std::vector<long long> counts_at_grids;  // identical: the count uses no grid
};

// Base points of loops are exactly the word fixed points; their number is
// bounded by the word count, independent of any discretization.
ConditionLCertificate condition_l_certificate(const IfsSystem& ifs, int maxlen,
                                              const std::vector<int>& grids = {});

struct HutchinsonConvergence {
  std::vector<double> distances;  // d_H(F^n(K0), attractor sample), n = 1..n_max
  double tolerance = 0.0;         // sampling tolerance of the attractor side
  double initial_distance = 0.0;  // d_H(K0, attractor sample)
};

// Iterates the Hutchinson map on K0 and reports the Hausdorff distances to
// an attractor sample; the distances contract at the rate of the system.
HutchinsonConvergence hereditary_triviality_check(const IfsSystem& ifs,
                                                  std::vector<double> k0, int n_max,
                                                  int attractor_depth = -1);

enum class IfsClass { TotallyDisconnected, BranchOverlapOnly, General };

// Distinguishes disjoint map images, images that meet only at branch points,
// and genuine overlap.
IfsClass classify_ifs(const IfsSystem& ifs, int grid_points);

std::string to_string(IfsClass c);

}  // namespace mql
