#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "oddson/core.hpp"
#include "oddson/geometry.hpp"

namespace oddson {

struct GaussianComponent {
  Point mean;
  double sigma = 1;
  double weight = 1;
};

struct Atom {
  Point point;
  double weight = 1;
};

// Seeded query-distribution generator; the SamplingOracle for the benchmark
// harness.
struct QueryDistribution {
  enum class Kind { UniformBox, GaussianMixture, AtomsPlusNoise, RegionFocused };

  Kind kind = Kind::UniformBox;
  int dim = 2;

  // UniformBox bounds; also noise_bounds / background_bounds for the mixture
  // kinds.
  std::vector<double> box_lo, box_hi;

  std::vector<GaussianComponent> components;

  std::vector<Atom> atoms;
  double noise_weight = 0;

  Point focus_center;
  double focus_radius = 0;
  double focus_mass = 0;

  std::string id() const;
  void validate() const;  // throws std::invalid_argument

  Point draw(std::mt19937_64& rng) const;
  Sampler sampler() const;

  nlohmann::json to_json() const;
  static QueryDistribution from_json(const nlohmann::json& j);
};

// Plug-in entropy (bits) of the empirical answer distribution over n_draws
// samples; estimates the Shannon lower bound.
double answer_entropy(const QueryDistribution& dist,
                      const std::function<Answer(const Point&)>& answerer,
                      std::int64_t n_draws, std::mt19937_64& rng);

}  // namespace oddson
