#include "polarcut/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"

namespace polarcut {

using nlohmann::json;

double PhantomSpec::surface_radius(const Vec3& dir) const {
  if (shape == PhantomShape::sphere) return radius_mm;
  const double azimuth = std::atan2(dir.y, dir.x);
  const double sin2_polar = std::max(0.0, 1.0 - dir.z * dir.z);
  return radius_mm + lobe_amplitude_mm * std::cos(lobe_frequency * azimuth) * sin2_polar;
}

double PhantomSpec::max_radius() const {
  return shape == PhantomShape::sphere ? radius_mm : radius_mm + std::fabs(lobe_amplitude_mm);
}

bool PhantomSpec::inside(const Vec3& p) const {
  const Vec3 d = p - center;
  const double r = d.norm();
  if (r == 0.0) return true;
  return r <= surface_radius(d * (1.0 / r));
}

void PhantomSpec::validate() const {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) throw Error(errc::bad_config, "dims must be >= 1");
  if (!(spacing.sx > 0 && spacing.sy > 0 && spacing.sz > 0))
    throw Error(errc::bad_config, "spacing must be positive");
  if (!(radius_mm > 0)) throw Error(errc::bad_config, "radius must be positive");
  if (foreground_mean == background_mean)
    throw Error(errc::bad_config, "foreground and background means must differ");
  if (!(noise_sigma >= 0)) throw Error(errc::bad_config, "noise sigma must be >= 0");
  if (shape == PhantomShape::lobed) {
    if (!(std::fabs(lobe_amplitude_mm) < radius_mm))
      throw Error(errc::bad_config, "lobe amplitude must be smaller than the base radius");
    if (lobe_frequency < 0) throw Error(errc::bad_config, "lobe frequency must be >= 0");
  }
  const double r = max_radius();
  auto fits = [r](double c, std::size_t n, double s) {
    return c - r >= 0.0 && c + r <= static_cast<double>(n - 1) * s;
  };
  if (!fits(center.x, dims.nx, spacing.sx) || !fits(center.y, dims.ny, spacing.sy) ||
      !fits(center.z, dims.nz, spacing.sz))
    throw Error(errc::bad_config, "object not fully inside the volume");
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Dims& d = spec.dims;
  std::vector<float> data(d.voxel_count());
  BinaryMask mask(d, spec.spacing);
  for (std::size_t k = 0; k < d.nz; ++k)
    for (std::size_t j = 0; j < d.ny; ++j)
      for (std::size_t i = 0; i < d.nx; ++i) {
        const Vec3 p{i * spec.spacing.sx, j * spec.spacing.sy, k * spec.spacing.sz};
        const bool in = spec.inside(p);
        mask.set(i, j, k, in);
        data[d.index(i, j, k)] = in ? spec.foreground_mean : spec.background_mean;
      }
  if (spec.noise_sigma > 0) {
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (float& v : data) v = static_cast<float>(v + noise(rng));
  }
  return {Volume(d, spec.spacing, std::move(data)), std::move(mask)};
}

PhantomSpec phantom_spec_from_json(const json& j) {
  PhantomSpec s;
  try {
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3) throw Error(errc::bad_config, "dims needs three entries");
    s.dims = {dims[0], dims[1], dims[2]};
    if (j.contains("spacing_mm")) {
      const auto sp = j.at("spacing_mm").get<std::vector<double>>();
      if (sp.size() != 3) throw Error(errc::bad_config, "spacing_mm needs three entries");
      s.spacing = {sp[0], sp[1], sp[2]};
    }
    const std::string shape = j.value("shape", "sphere");
    if (shape == "sphere") s.shape = PhantomShape::sphere;
    else if (shape == "lobed") s.shape = PhantomShape::lobed;
    else throw Error(errc::bad_config, "unknown shape " + shape);
    if (j.contains("center_mm")) {
      const auto c = j.at("center_mm").get<std::vector<double>>();
      if (c.size() != 3) throw Error(errc::bad_config, "center_mm needs three entries");
      s.center = {c[0], c[1], c[2]};
    } else {
      s.center = {(s.dims.nx - 1) * s.spacing.sx / 2.0, (s.dims.ny - 1) * s.spacing.sy / 2.0,
                  (s.dims.nz - 1) * s.spacing.sz / 2.0};
    }
    s.radius_mm = j.at("radius_mm").get<double>();
    s.lobe_amplitude_mm = j.value("lobe_amplitude_mm", 0.0);
    s.lobe_frequency = j.value("lobe_frequency", 0);
    s.foreground_mean = j.value("foreground_mean", s.foreground_mean);
    s.background_mean = j.value("background_mean", s.background_mean);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.rng_seed = j.value("rng_seed", std::uint64_t{1});
  } catch (const json::exception& e) {
    throw Error(errc::bad_config, std::string("bad phantom spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const PhantomSpec& s) {
  return {{"dims", {s.dims.nx, s.dims.ny, s.dims.nz}},
          {"spacing_mm", {s.spacing.sx, s.spacing.sy, s.spacing.sz}},
          {"shape", s.shape == PhantomShape::sphere ? "sphere" : "lobed"},
          {"center_mm", {s.center.x, s.center.y, s.center.z}},
          {"radius_mm", s.radius_mm},
          {"lobe_amplitude_mm", s.lobe_amplitude_mm},
          {"lobe_frequency", s.lobe_frequency},
          {"foreground_mean", s.foreground_mean},
          {"background_mean", s.background_mean},
          {"noise_sigma", s.noise_sigma},
          {"rng_seed", s.rng_seed}};
}

}  // namespace polarcut
