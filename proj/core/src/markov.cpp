#include "mql/markov.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace mql {

IndexSet normalized_set(IndexSet s, int universe) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (!s.empty() && (s.front() < 0 || s.back() >= universe)) {
    throw domain_error("vertex index out of range");
  }
  return s;
}

IndexSet complement_set(const IndexSet& s, int universe) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(universe) - s.size());
  std::size_t k = 0;
  for (int v = 0; v < universe; ++v) {
    if (k < s.size() && s[k] == v) {
      ++k;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

bool set_contains(const IndexSet& s, int v) {
  return std::binary_search(s.begin(), s.end(), v);
}

IndexSet full_set(int universe) {
  IndexSet out(static_cast<std::size_t>(universe));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

Rational IntervalGridSpace::step() const {
  return (upper - lower) / Rational(points - 1);
}

Rational IntervalGridSpace::point(int k) const {
  return lower + Rational(k) * step();
}

int IntervalGridSpace::snap(const Rational& value) const {
  Rational t = (value - lower) / step();
  long long k = t.floor_value();
  Rational frac = t - Rational(k);
  if (frac > Rational(1, 2)) ++k;  // exact half rounds toward the lower point
  if (k < 0) k = 0;
  if (k > points - 1) k = points - 1;
  return static_cast<int>(k);
}

void validate_space(const SpaceSpec& space) {
  if (const auto* fs = std::get_if<FiniteSetSpace>(&space)) {
    if (fs->labels.empty()) throw validation_error("finite space must have at least one label");
    std::set<std::string> seen(fs->labels.begin(), fs->labels.end());
    if (seen.size() != fs->labels.size()) {
      throw validation_error("finite space labels must be distinct");
    }
    return;
  }
  const auto& grid = std::get<IntervalGridSpace>(space);
  if (grid.points < 2) throw validation_error("interval grid needs at least 2 points");
  if (!(grid.lower < grid.upper)) {
    throw validation_error("interval grid requires lower < upper");
  }
}

int space_size(const SpaceSpec& space) {
  if (const auto* fs = std::get_if<FiniteSetSpace>(&space)) {
    return static_cast<int>(fs->labels.size());
  }
  return std::get<IntervalGridSpace>(space).points;
}

std::string space_label(const SpaceSpec& space, int index) {
  if (const auto* fs = std::get_if<FiniteSetSpace>(&space)) {
    return fs->labels[static_cast<std::size_t>(index)];
  }
  return std::get<IntervalGridSpace>(space).point(index).decimal_label();
}

std::vector<std::string> space_labels(const SpaceSpec& space) {
  int n = space_size(space);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(space_label(space, i));
  return out;
}

InteriorMode space_mode(const SpaceSpec& space) {
  if (std::holds_alternative<FiniteSetSpace>(space)) return InteriorMode::Discrete;
  return std::get<IntervalGridSpace>(space).interior_mode;
}

void FiniteKernel::validate() const {
  int n = size();
  if (n == 0) throw validation_error("kernel must have at least one state");
  {
    std::set<std::string> seen(states.begin(), states.end());
    if (seen.size() != states.size()) throw validation_error("state labels must be distinct");
  }
  if (static_cast<int>(kernel.size()) != n) {
    throw dimension_error("kernel matrix must be square over the state set");
  }
  for (const auto& row : kernel) {
    if (static_cast<int>(row.size()) != n) {
      throw dimension_error("kernel matrix must be square over the state set");
    }
  }
  for (int j = 0; j < n; ++j) {
    Rational sum;
    for (int i = 0; i < n; ++i) {
      const Rational& e = kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (e.is_negative()) {
        throw validation_error("kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") is negative");
      }
      sum += e;
    }
    if (!sum.is_one()) {
      throw validation_error("column " + std::to_string(j) + " sums to " + sum.to_string() +
                             ", expected 1");
    }
  }
}

void MapSystem::validate() const {
  validate_space(space);
  if (maps.empty()) throw validation_error("map system needs at least one map");
  if (weights.size() != maps.size()) {
    throw dimension_error("map system needs one weight per map");
  }
  Rational sum;
  for (const auto& weight : weights) {
    if (!(Rational(0) < weight)) {
      throw validation_error("map system weights must be strictly positive");
    }
    sum += weight;
  }
  if (!sum.is_one()) {
    throw validation_error("map system weights sum to " + sum.to_string() + ", expected 1");
  }
  if (const auto* grid = std::get_if<IntervalGridSpace>(&space)) {
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const auto* affine = std::get_if<AffineMap>(&maps[i]);
      if (affine == nullptr) {
        throw validation_error("interval-grid map systems take affine maps");
      }
      Rational a = (*affine)(grid->lower);
      Rational b = (*affine)(grid->upper);
      if (a > b) std::swap(a, b);
      if (a < grid->lower || b > grid->upper) {
        throw validation_error("map " + std::to_string(i) +
                               " does not send the interval into itself");
      }
    }
  } else {
    int n = space_size(space);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const auto* table = std::get_if<TableMap>(&maps[i]);
      if (table == nullptr) {
        throw validation_error("finite-set map systems take function tables");
      }
      if (static_cast<int>(table->image.size()) != n) {
        throw dimension_error("function table " + std::to_string(i) + " is not total");
      }
      for (int v : table->image) {
        if (v < 0 || v >= n) {
          throw validation_error("function table " + std::to_string(i) +
                                 " maps outside the space");
        }
      }
    }
  }
}

void UniformKernelModel::validate() const { validate_space(space); }

void validate_model(const MarkovModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

int state_count(const MarkovModel& model) {
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) return fk->size();
  if (const auto* ms = std::get_if<MapSystem>(&model)) return space_size(ms->space);
  return space_size(std::get<UniformKernelModel>(model).space);
}

std::vector<std::string> state_labels(const MarkovModel& model) {
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) return fk->states;
  if (const auto* ms = std::get_if<MapSystem>(&model)) return space_labels(ms->space);
  return space_labels(std::get<UniformKernelModel>(model).space);
}

InteriorMode model_mode(const MarkovModel& model) {
  if (std::holds_alternative<FiniteKernel>(model)) return InteriorMode::Discrete;
  if (const auto* ms = std::get_if<MapSystem>(&model)) return space_mode(ms->space);
  return space_mode(std::get<UniformKernelModel>(model).space);
}

std::vector<Rational> uniform_weights(int n) {
  return std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n));
}

int map_image_index(const MapSystem& system, int map_index, int y) {
  const PointMap& pm = system.maps[static_cast<std::size_t>(map_index)];
  if (const auto* table = std::get_if<TableMap>(&pm)) {
    return table->image[static_cast<std::size_t>(y)];
  }
  const auto& grid = std::get<IntervalGridSpace>(system.space);
  return grid.snap(std::get<AffineMap>(pm)(grid.point(y)));
}

std::vector<Rational> apply_exact(const FiniteKernel& kernel, std::span<const Rational> f) {
  int n = kernel.size();
  if (static_cast<int>(f.size()) != n) {
    throw dimension_error("apply: vector has " + std::to_string(f.size()) + " entries, kernel has " +
                          std::to_string(n) + " states");
  }
  std::vector<Rational> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Rational acc;
    for (int i = 0; i < n; ++i) {
      const Rational& e = kernel.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!e.is_zero()) acc += e * f[static_cast<std::size_t>(i)];
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

std::vector<double> apply(const MarkovModel& model, std::span<const double> f) {
  int n = state_count(model);
  if (static_cast<int>(f.size()) != n) {
    throw dimension_error("apply: vector has " + std::to_string(f.size()) + " entries, model has " +
                          std::to_string(n) + " states");
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += fk->kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].to_double() *
               f[static_cast<std::size_t>(i)];
      }
      out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
  }
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    for (int y = 0; y < n; ++y) {
      double acc = 0.0;
      for (std::size_t i = 0; i < ms->maps.size(); ++i) {
        acc += ms->weights[i].to_double() *
               f[static_cast<std::size_t>(map_image_index(*ms, static_cast<int>(i), y))];
      }
      out[static_cast<std::size_t>(y)] = acc;
    }
    return out;
  }
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(n);
  std::fill(out.begin(), out.end(), mean);
  return out;
}

FiniteKernel kernel_power(const FiniteKernel& kernel, int n) {
  if (n < 1) throw precondition_error("kernel_power needs n >= 1");
  int dim = kernel.size();
  FiniteKernel acc = kernel;
  for (int step = 1; step < n; ++step) {
    std::vector<std::vector<Rational>> next(
        static_cast<std::size_t>(dim), std::vector<Rational>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) {
        const Rational& a = acc.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (a.is_zero()) continue;
        for (int j = 0; j < dim; ++j) {
          const Rational& b =
              kernel.kernel[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
          if (!b.is_zero()) {
            next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += a * b;
          }
        }
      }
    }
    acc.kernel = std::move(next);
  }
  return acc;
}

std::vector<Rational> power_apply_exact(const FiniteKernel& kernel,
                                        std::span<const Rational> f, int n) {
  if (n < 0) throw precondition_error("power_apply needs n >= 0");
  std::vector<Rational> out(f.begin(), f.end());
  for (int step = 0; step < n; ++step) out = apply_exact(kernel, out);
  return out;
}

std::vector<double> power_apply(const MarkovModel& model, std::span<const double> f, int n) {
  if (n < 0) throw precondition_error("power_apply needs n >= 0");
  std::vector<double> out(f.begin(), f.end());
  for (int step = 0; step < n; ++step) out = mql::apply(model, out);
  return out;
}

std::vector<std::pair<int, int>> support(const MarkovModel& model) {
  std::vector<std::pair<int, int>> pairs;
  int n = state_count(model);
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (!fk->kernel[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)].is_zero()) {
          pairs.emplace_back(x, y);
        }
      }
    }
  } else if (const auto* ms = std::get_if<MapSystem>(&model)) {
    for (int y = 0; y < n; ++y) {
      std::set<int> images;
      for (std::size_t i = 0; i < ms->maps.size(); ++i) {
        images.insert(map_image_index(*ms, static_cast<int>(i), y));
      }
      for (int x : images) pairs.emplace_back(x, y);
    }
  } else {
    pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) pairs.emplace_back(x, y);
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
  return pairs;
}

Rational kernel_entry(const MarkovModel& model, int x, int y) {
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    return fk->kernel[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  }
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    Rational acc;
    for (std::size_t i = 0; i < ms->maps.size(); ++i) {
      if (map_image_index(*ms, static_cast<int>(i), y) == x) acc += ms->weights[i];
    }
    return acc;
  }
  return Rational(1, state_count(model));
}

FiniteKernel induced_kernel(const MarkovModel& model) {
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) return *fk;
  int n = state_count(model);
  FiniteKernel out;
  out.states = state_labels(model);
  out.kernel.assign(static_cast<std::size_t>(n),
                    std::vector<Rational>(static_cast<std::size_t>(n)));
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    for (int y = 0; y < n; ++y) {
      for (std::size_t i = 0; i < ms->maps.size(); ++i) {
        int x = map_image_index(*ms, static_cast<int>(i), y);
        out.kernel[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] += ms->weights[i];
      }
    }
  } else {
    Rational w(1, n);
    for (auto& row : out.kernel) std::fill(row.begin(), row.end(), w);
  }
  return out;
}

bool is_absorbing(const MarkovModel& model, const IndexSet& subset) {
  int n = state_count(model);
  IndexSet b = normalized_set(subset, n);
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    for (int y : b) {
      Rational sum;
      for (int x : b) {
        sum += fk->kernel[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      }
      if (!sum.is_one()) return false;
    }
    return true;
  }
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    for (int y : b) {
      for (std::size_t i = 0; i < ms->maps.size(); ++i) {
        if (!set_contains(b, map_image_index(*ms, static_cast<int>(i), y))) return false;
      }
    }
    return true;
  }
  return b.empty() || static_cast<int>(b.size()) == n;
}

bool is_strongly_absorbing(const MarkovModel& model, const IndexSet& subset) {
  int n = state_count(model);
  IndexSet b = normalized_set(subset, n);
  if (std::holds_alternative<UniformKernelModel>(model)) {
    // every vertex feeds every vertex, so s(r^-1(B)) is everything or empty
    return b.empty() || static_cast<int>(b.size()) == n;
  }
  std::vector<char> in_b(static_cast<std::size_t>(n), 0);
  for (int v : b) in_b[static_cast<std::size_t>(v)] = 1;
  std::vector<char> sources(static_cast<std::size_t>(n), 0);
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    for (int y : b) {
      for (int x = 0; x < n; ++x) {
        if (!fk->kernel[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)].is_zero()) {
          sources[static_cast<std::size_t>(x)] = 1;
        }
      }
    }
  } else {
    const auto& ms = std::get<MapSystem>(model);
    for (int y : b) {
      for (std::size_t i = 0; i < ms.maps.size(); ++i) {
        sources[static_cast<std::size_t>(map_image_index(ms, static_cast<int>(i), y))] = 1;
      }
    }
  }
  return std::equal(in_b.begin(), in_b.end(), sources.begin());
}

MarkovModel restrict_to(const MarkovModel& model, const IndexSet& subset) {
  int n = state_count(model);
  IndexSet k = normalized_set(subset, n);
  if (k.empty()) throw domain_error("restriction subset is empty");
  if (!is_absorbing(model, k)) {
    throw precondition_error(
        "a Markov operator restricts to a subset exactly when the subset is absorbing");
  }
  if (static_cast<int>(k.size()) == n) return model;
  std::vector<std::string> labels = state_labels(model);
  FiniteKernel out;
  out.states.reserve(k.size());
  for (int v : k) out.states.push_back(labels[static_cast<std::size_t>(v)]);
  out.kernel.assign(k.size(), std::vector<Rational>(k.size()));
  for (std::size_t j = 0; j < k.size(); ++j) {
    for (std::size_t i = 0; i < k.size(); ++i) {
      out.kernel[i][j] = kernel_entry(model, k[i], k[j]);
    }
  }
  out.validate();
  return out;
}

IndexSet indices_for_labels(const std::vector<std::string>& states,
                            const std::vector<std::string>& labels) {
  IndexSet out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) throw domain_error("unknown state label '" + label + "'");
    out.push_back(static_cast<int>(it - states.begin()));
  }
  return normalized_set(std::move(out), static_cast<int>(states.size()));
}

MarkovModel with_grid_points(const MarkovModel& model, int points) {
  MarkovModel out = model;
  SpaceSpec* space = nullptr;
  if (auto* ms = std::get_if<MapSystem>(&out)) {
    space = &ms->space;
  } else if (auto* uk = std::get_if<UniformKernelModel>(&out)) {
    space = &uk->space;
  } else {
    throw precondition_error("grid size applies to map-system and uniform models only");
  }
  auto* grid = std::get_if<IntervalGridSpace>(space);
  if (grid == nullptr) {
    throw precondition_error("grid size applies to interval-grid spaces only");
  }
  grid->points = points;
  validate_model(out);
  return out;
}

}  // namespace mql
