#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mql/errors.hpp"
#include "mql/rational.hpp"

namespace mql {

// Whether a state space stands in for a genuinely discrete space or for a
// grid discretization of a continuum. Continuum mode switches condition (L)
// to the refinement certificate.
enum class InteriorMode { Discrete, Continuum };

// Vertex subsets are sorted index vectors without duplicates.
using IndexSet = std::vector<int>;

IndexSet normalized_set(IndexSet s, int universe);
IndexSet complement_set(const IndexSet& s, int universe);
bool set_contains(const IndexSet& s, int v);
IndexSet full_set(int universe);

struct FiniteSetSpace {
  std::vector<std::string> labels;
  bool operator==(const FiniteSetSpace&) const = default;
};

// Equally spaced grid on [lower, upper], endpoints included, at least two
// points. All grid values are exact rationals.
struct IntervalGridSpace {
  Rational lower;
  Rational upper;
  int points = 2;
  InteriorMode interior_mode = InteriorMode::Continuum;

  Rational step() const;
  Rational point(int k) const;
  // Index of the nearest grid point; ties round toward the lower point.
  int snap(const Rational& value) const;

  bool operator==(const IntervalGridSpace&) const = default;
};

using SpaceSpec = std::variant<FiniteSetSpace, IntervalGridSpace>;

void validate_space(const SpaceSpec& space);
int space_size(const SpaceSpec& space);
std::string space_label(const SpaceSpec& space, int index);
std::vector<std::string> space_labels(const SpaceSpec& space);
InteriorMode space_mode(const SpaceSpec& space);

// x -> slope*x + intercept on an interval grid.
struct AffineMap {
  Rational slope;
  Rational intercept;

  Rational operator()(const Rational& x) const { return slope * x + intercept; }
  double eval(double x) const { return slope.to_double() * x + intercept.to_double(); }

  bool operator==(const AffineMap&) const = default;
};

// Total function table on a finite label set: image[i] is the index of f(x_i).
struct TableMap {
  std::vector<int> image;
  bool operator==(const TableMap&) const = default;
};

using PointMap = std::variant<AffineMap, TableMap>;

// p[i][j] = p({x_i}, x_j); every column sums to exactly 1.
struct FiniteKernel {
  std::vector<std::string> states;
  std::vector<std::vector<Rational>> kernel;

  int size() const { return static_cast<int>(states.size()); }
  void validate() const;

  bool operator==(const FiniteKernel&) const = default;
};

// Weighted system of point maps: P(f)(y) = sum_i w_i f(f_i(y)). Affine maps
// on an interval grid have their images snapped to the grid, so the system
// induces a finite kernel.
struct MapSystem {
  SpaceSpec space;
  std::vector<PointMap> maps;
  std::vector<Rational> weights;  // strictly positive, sum exactly 1

  void validate() const;
  bool operator==(const MapSystem&) const = default;
};

// p({x}, y) = 1/n for every x, y.
struct UniformKernelModel {
  SpaceSpec space;
  void validate() const;
  bool operator==(const UniformKernelModel&) const = default;
};

using MarkovModel = std::variant<FiniteKernel, MapSystem, UniformKernelModel>;

void validate_model(const MarkovModel& model);
int state_count(const MarkovModel& model);
std::vector<std::string> state_labels(const MarkovModel& model);
InteriorMode model_mode(const MarkovModel& model);
std::vector<Rational> uniform_weights(int n);

// Index of the (snapped) image of state y under map i of the system.
int map_image_index(const MapSystem& system, int map_index, int y);

// (Pf)(y) = sum_x f(x) p({x}, y), exact.
std::vector<Rational> apply_exact(const FiniteKernel& kernel, std::span<const Rational> f);
std::vector<double> apply(const MarkovModel& model, std::span<const double> f);

// Ordinary matrix power of the kernel; stays column-stochastic.
FiniteKernel kernel_power(const FiniteKernel& kernel, int n);
// n = 0 returns f unchanged.
std::vector<Rational> power_apply_exact(const FiniteKernel& kernel,
                                        std::span<const Rational> f, int n);
std::vector<double> power_apply(const MarkovModel& model, std::span<const double> f, int n);

// Edge pairs (source x, range y) with p({x}, y) > 0, sorted by (range, source).
std::vector<std::pair<int, int>> support(const MarkovModel& model);

// Dense kernel induced on the state set. Desk-scale only; grid systems are
// snapped as in map_image_index.
FiniteKernel induced_kernel(const MarkovModel& model);
Rational kernel_entry(const MarkovModel& model, int x, int y);

// B absorbing: sum_{x in B} p({x}, y) = 1 for every y in B.
bool is_absorbing(const MarkovModel& model, const IndexSet& subset);
// B strongly absorbing: B equals the set of sources of edges whose range
// lies in B.
bool is_strongly_absorbing(const MarkovModel& model, const IndexSet& subset);

// Restriction to an absorbing subset K. K must be nonempty and absorbing;
// a Markov operator restricts to K exactly when K is absorbing.
MarkovModel restrict_to(const MarkovModel& model, const IndexSet& subset);

// Label lookup; unknown labels raise domain_error.
IndexSet indices_for_labels(const std::vector<std::string>& states,
                            const std::vector<std::string>& labels);

// Same model on a re-sampled interval grid (grid systems only).
MarkovModel with_grid_points(const MarkovModel& model, int points);

}  // namespace mql
