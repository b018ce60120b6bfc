#pragma once

#include <cstdint>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "polarcut/geometry.hpp"
#include "polarcut/mask.hpp"
#include "polarcut/volume.hpp"

namespace polarcut {

enum class PhantomShape { sphere, lobed };

/// Synthetic test object. The lobed shape has radius
///   base + amplitude * cos(frequency * azimuth) * sin(polar)^2
/// around `center`, which is star-shaped from the center when amplitude < base.
struct PhantomSpec {
  Dims dims{64, 64, 64};
  Spacing spacing;
  PhantomShape shape = PhantomShape::sphere;
  Vec3 center{32.0, 32.0, 32.0};
  double radius_mm = 10.0;
  double lobe_amplitude_mm = 0.0;
  int lobe_frequency = 0;
  float foreground_mean = 200.0f;
  float background_mean = 100.0f;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 1;

  /// Radius of the object surface along unit direction `dir`.
  double surface_radius(const Vec3& dir) const;
  double max_radius() const;
  bool inside(const Vec3& world_mm) const;
  void validate() const;
};

struct Phantom {
  Volume volume;
  BinaryMask mask;
};

Phantom generate_phantom(const PhantomSpec& spec);

PhantomSpec phantom_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhantomSpec& spec);

}  // namespace polarcut
