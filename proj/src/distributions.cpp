#include "oddson/distributions.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace oddson {

namespace {

constexpr double kWeightTol = 1e-12;

Point draw_uniform_box(const std::vector<double>& lo, const std::vector<double>& hi,
                       std::mt19937_64& rng) {
  Point p(lo.size());
  for (size_t i = 0; i < lo.size(); ++i)
    p[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
  return p;
}

bool inside_working_box(const Point& p) {
  for (double v : p)
    if (std::abs(v) > kWorkingBoxHalf) return false;
  return true;
}

std::vector<double> json_vec(const nlohmann::json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

std::string QueryDistribution::id() const {
  switch (kind) {
    case Kind::UniformBox:
      return "uniform_box";
    case Kind::GaussianMixture:
      return "gaussian_mixture";
    case Kind::AtomsPlusNoise:
      return "atoms_plus_noise";
    case Kind::RegionFocused:
      return "region_focused";
  }
  return "unknown";
}

void QueryDistribution::validate() const {
  if (dim != 2 && dim != 4) throw std::invalid_argument("distribution dim must be 2 or 4");
  auto check_box = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
      throw std::invalid_argument("bounds dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("inverted bounds");
  };
  switch (kind) {
    case Kind::UniformBox:
      check_box(box_lo, box_hi);
      break;
    case Kind::GaussianMixture: {
      if (components.empty()) throw std::invalid_argument("no mixture components");
      double total = 0;
      for (const auto& c : components) {
        if (c.sigma <= 0) throw std::invalid_argument("sigma must be positive");
        if (c.weight < 0) throw std::invalid_argument("negative weight");
        if (static_cast<int>(c.mean.size()) != dim)
          throw std::invalid_argument("mean dimension mismatch");
        total += c.weight;
      }
      if (std::abs(total - 1.0) > kWeightTol)
        throw std::invalid_argument("mixture weights must sum to 1");
      break;
    }
    case Kind::AtomsPlusNoise: {
      if (atoms.empty()) throw std::invalid_argument("no atoms");
      if (noise_weight < 0 || noise_weight > 1)
        throw std::invalid_argument("noise_weight outside [0,1]");
      double total = noise_weight;
      for (const auto& a : atoms) {
        if (a.weight < 0) throw std::invalid_argument("negative weight");
        if (static_cast<int>(a.point.size()) != dim)
          throw std::invalid_argument("atom dimension mismatch");
        total += a.weight;
      }
      if (std::abs(total - 1.0) > kWeightTol)
        throw std::invalid_argument("atom + noise weights must sum to 1");
      if (noise_weight > 0) check_box(box_lo, box_hi);
      break;
    }
    case Kind::RegionFocused:
      if (focus_mass < 0 || focus_mass > 1)
        throw std::invalid_argument("focus_mass outside [0,1]");
      if (focus_radius <= 0) throw std::invalid_argument("focus_radius must be positive");
      if (static_cast<int>(focus_center.size()) != dim)
        throw std::invalid_argument("focus_center dimension mismatch");
      if (focus_mass < 1) check_box(box_lo, box_hi);
      break;
  }
}

Point QueryDistribution::draw(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  switch (kind) {
    case Kind::UniformBox:
      return draw_uniform_box(box_lo, box_hi, rng);
    case Kind::GaussianMixture: {
      const double u = uni(rng);
      double acc = 0;
      const GaussianComponent* pick = &components.back();
      for (const auto& c : components) {
        acc += c.weight;
        if (u <= acc) {
          pick = &c;
          break;
        }
      }
      // Truncated to the working box: out-of-box draws are redrawn.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Point p(dim);
        std::normal_distribution<double> normal(0.0, pick->sigma);
        for (int i = 0; i < dim; ++i) p[i] = pick->mean[i] + normal(rng);
        if (inside_working_box(p)) return p;
      }
      return pick->mean;
    }
    case Kind::AtomsPlusNoise: {
      const double u = uni(rng);
      if (u < noise_weight) return draw_uniform_box(box_lo, box_hi, rng);
      double acc = noise_weight;
      for (const auto& a : atoms) {
        acc += a.weight;
        if (u <= acc) return a.point;
      }
      return atoms.back().point;
    }
    case Kind::RegionFocused: {
      const double u = uni(rng);
      if (u < focus_mass) {
        // Uniform in the L2 ball by rejection from the surrounding cube.
        for (;;) {
          Point p(dim);
          double r2 = 0;
          for (int i = 0; i < dim; ++i) {
            const double d =
                std::uniform_real_distribution<double>(-focus_radius, focus_radius)(rng);
            p[i] = focus_center[i] + d;
            r2 += d * d;
          }
          if (r2 <= focus_radius * focus_radius) return p;
        }
      }
      return draw_uniform_box(box_lo, box_hi, rng);
    }
  }
  throw std::logic_error("unknown distribution kind");
}

Sampler QueryDistribution::sampler() const {
  QueryDistribution copy = *this;
  return [copy](std::mt19937_64& rng) { return copy.draw(rng); };
}

nlohmann::json QueryDistribution::to_json() const {
  nlohmann::json j;
  j["kind"] = id();
  j["dim"] = dim;
  switch (kind) {
    case Kind::UniformBox:
      j["lo"] = box_lo;
      j["hi"] = box_hi;
      break;
    case Kind::GaussianMixture: {
      nlohmann::json comps = nlohmann::json::array();
      for (const auto& c : components)
        comps.push_back({{"mean", c.mean}, {"sigma", c.sigma}, {"weight", c.weight}});
      j["components"] = comps;
      break;
    }
    case Kind::AtomsPlusNoise: {
      nlohmann::json as = nlohmann::json::array();
      for (const auto& a : atoms)
        as.push_back({{"point", a.point}, {"weight", a.weight}});
      j["atoms"] = as;
      j["noise_weight"] = noise_weight;
      j["noise_bounds"] = {{"lo", box_lo}, {"hi", box_hi}};
      break;
    }
    case Kind::RegionFocused:
      j["focus_center"] = focus_center;
      j["focus_radius"] = focus_radius;
      j["focus_mass"] = focus_mass;
      j["background_bounds"] = {{"lo", box_lo}, {"hi", box_hi}};
      break;
  }
  return j;
}

QueryDistribution QueryDistribution::from_json(const nlohmann::json& j) {
  QueryDistribution d;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform_box") {
    d.kind = Kind::UniformBox;
    d.box_lo = json_vec(j.at("lo"));
    d.box_hi = json_vec(j.at("hi"));
    d.dim = static_cast<int>(d.box_lo.size());
  } else if (kind == "gaussian_mixture") {
    d.kind = Kind::GaussianMixture;
    for (const auto& jc : j.at("components")) {
      GaussianComponent c;
      c.mean = json_vec(jc.at("mean"));
      c.sigma = jc.at("sigma").get<double>();
      c.weight = jc.at("weight").get<double>();
      d.components.push_back(std::move(c));
    }
    d.dim = static_cast<int>(d.components.front().mean.size());
  } else if (kind == "atoms_plus_noise") {
    d.kind = Kind::AtomsPlusNoise;
    for (const auto& ja : j.at("atoms")) {
      Atom a;
      a.point = json_vec(ja.at("point"));
      a.weight = ja.at("weight").get<double>();
      d.atoms.push_back(std::move(a));
    }
    d.noise_weight = j.at("noise_weight").get<double>();
    if (j.contains("noise_bounds")) {
      d.box_lo = json_vec(j.at("noise_bounds").at("lo"));
      d.box_hi = json_vec(j.at("noise_bounds").at("hi"));
    }
    d.dim = static_cast<int>(d.atoms.front().point.size());
  } else if (kind == "region_focused") {
    d.kind = Kind::RegionFocused;
    d.focus_center = json_vec(j.at("focus_center"));
    d.focus_radius = j.at("focus_radius").get<double>();
    d.focus_mass = j.at("focus_mass").get<double>();
    if (j.contains("background_bounds")) {
      d.box_lo = json_vec(j.at("background_bounds").at("lo"));
      d.box_hi = json_vec(j.at("background_bounds").at("hi"));
    }
    d.dim = static_cast<int>(d.focus_center.size());
  } else {
    throw std::invalid_argument("unknown distribution kind: " + kind);
  }
  if (j.contains("dim")) d.dim = j.at("dim").get<int>();
  d.validate();
  return d;
}

double answer_entropy(const QueryDistribution& dist,
                      const std::function<Answer(const Point&)>& answerer,
                      std::int64_t n_draws, std::mt19937_64& rng) {
  std::map<Answer, std::int64_t> counts;
  for (std::int64_t i = 0; i < n_draws; ++i) ++counts[answerer(dist.draw(rng))];
  double h = 0;
  for (const auto& [answer, count] : counts) {
    (void)answer;
    const double p = double(count) / double(n_draws);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace oddson
