#include "polarcut/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "raw payloads are read in place as little-endian");

Volume::Volume(Dims dims, Spacing spacing, std::vector<float> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
  if (dims_.nx < 1 || dims_.ny < 1 || dims_.nz < 1)
    throw Error(errc::bad_header, "volume dims must be >= 1");
  if (!(spacing_.sx > 0 && spacing_.sy > 0 && spacing_.sz > 0))
    throw Error(errc::bad_header, "voxel spacing must be positive");
  if (data_.size() != dims_.voxel_count())
    throw Error(errc::payload_mismatch, "payload length mismatch");
  const auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  range_ = {*lo, *hi};
}

bool Volume::contains(const Vec3& p) const {
  const Vec3 v = to_voxel(p);
  auto in = [](double f, std::size_t n) { return f >= 0.0 && f <= static_cast<double>(n - 1); };
  return in(v.x, dims_.nx) && in(v.y, dims_.ny) && in(v.z, dims_.nz);
}

void SeedSet::validate(const Volume& v) const {
  if (!v.contains(primary)) throw Error(errc::seed_out_of_bounds, "primary seed outside volume");
  for (const Vec3& e : extras)
    if (!v.contains(e)) throw Error(errc::seed_out_of_bounds, "extra seed outside volume");
}

VolumeFormat detect_format(const fs::path& path) {
  return path.extension() == ".nii" ? VolumeFormat::nifti1 : VolumeFormat::native;
}

// ---------------------------------------------------------------------------
// Native format

namespace {

fs::path sidecar_path(const fs::path& payload) {
  fs::path p = payload;
  p += ".json";
  return p;
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const void* bytes, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot write " + path.string());
  out.write(static_cast<const char*>(bytes), static_cast<std::streamsize>(size));
  if (!out) throw Error(errc::io, "short write to " + path.string());
}

struct NativeHeader {
  Dims dims;
  Spacing spacing;
  std::string dtype;
};

NativeHeader read_sidecar(const fs::path& payload) {
  const fs::path side = sidecar_path(payload);
  std::ifstream in(side);
  if (!in) throw Error(errc::bad_header, "missing sidecar " + side.string());
  try {
    const json j = json::parse(in);
    const auto d = j.at("dims").get<std::vector<long long>>();
    const auto s = j.at("spacing_mm").get<std::vector<double>>();
    if (d.size() != 3 || s.size() != 3)
      throw Error(errc::bad_header, "dims and spacing_mm need three entries");
    for (long long n : d)
      if (n < 1) throw Error(errc::bad_header, "dims must be >= 1");
    return {{static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]),
             static_cast<std::size_t>(d[2])},
            {s[0], s[1], s[2]},
            j.at("dtype").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(errc::bad_header, std::string("corrupt sidecar: ") + e.what());
  }
}

void write_sidecar(const fs::path& payload, const Dims& d, const Spacing& s, const char* dtype) {
  const json j = {{"dims", {d.nx, d.ny, d.nz}},
                  {"spacing_mm", {s.sx, s.sy, s.sz}},
                  {"dtype", dtype}};
  const std::string text = j.dump(2) + "\n";
  write_file(sidecar_path(payload), text.data(), text.size());
}

Volume load_native(const fs::path& path) {
  const NativeHeader h = read_sidecar(path);
  const std::vector<char> raw = read_file(path);
  const std::size_t n = h.dims.voxel_count();
  std::vector<float> data(n);
  if (h.dtype == "f32") {
    if (raw.size() != n * sizeof(float)) throw Error(errc::payload_mismatch, "payload length mismatch");
    std::memcpy(data.data(), raw.data(), raw.size());
  } else if (h.dtype == "u8") {
    if (raw.size() != n) throw Error(errc::payload_mismatch, "payload length mismatch");
    for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::uint8_t>(raw[i]);
  } else {
    throw Error(errc::unsupported_datatype, "unsupported dtype " + h.dtype);
  }
  return Volume(h.dims, h.spacing, std::move(data));
}

// ---------------------------------------------------------------------------
// NIfTI-1 (single file, uncompressed)

constexpr int kNiftiHeaderSize = 348;
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

template <typename T>
T read_at(const std::vector<char>& buf, std::size_t offset, bool swap) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  if (swap) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

Volume load_nifti(const fs::path& path) {
  const std::vector<char> buf = read_file(path);
  if (buf.size() < kNiftiHeaderSize) throw Error(errc::bad_header, "truncated NIfTI header");
  bool swap = false;
  const auto hdr_size = read_at<std::int32_t>(buf, 0, false);
  if (hdr_size != kNiftiHeaderSize) {
    if (read_at<std::int32_t>(buf, 0, true) != kNiftiHeaderSize)
      throw Error(errc::bad_header, "sizeof_hdr is not 348");
    swap = true;
  }
  if (std::memcmp(buf.data() + 344, "n+1\0", 4) != 0)
    throw Error(errc::bad_header, "magic is not n+1");

  const auto ndim = read_at<std::int16_t>(buf, 40, swap);
  if (ndim < 1 || ndim > 7) throw Error(errc::bad_header, "dim[0] out of range");
  std::int64_t dim[8] = {1, 1, 1, 1, 1, 1, 1, 1};
  for (int i = 1; i <= ndim; ++i) dim[i] = read_at<std::int16_t>(buf, 40 + 2 * i, swap);
  for (int i = 1; i <= 3; ++i)
    if (dim[i] < 1) throw Error(errc::bad_header, "non-positive dimension");
  for (int i = 4; i <= ndim; ++i)
    if (dim[i] > 1) throw Error(errc::unsupported_datatype, "only scalar 3D volumes are supported");

  double pix[4] = {1, 1, 1, 1};
  for (int i = 1; i <= 3; ++i) {
    pix[i] = std::fabs(read_at<float>(buf, 76 + 4 * i, swap));
    if (i > ndim) pix[i] = 1.0;
    if (!(pix[i] > 0)) throw Error(errc::bad_header, "non-positive pixdim");
  }

  const auto datatype = read_at<std::int16_t>(buf, 70, swap);
  const auto vox_offset = static_cast<std::size_t>(read_at<float>(buf, 108, swap));
  const Dims dims{static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]),
                  static_cast<std::size_t>(dim[3])};
  const std::size_t n = dims.voxel_count();

  std::size_t elem = 0;
  switch (datatype) {
    case kDtUint8: elem = 1; break;
    case kDtInt16: elem = 2; break;
    case kDtFloat32: elem = 4; break;
    default: throw Error(errc::unsupported_datatype, "unsupported NIfTI datatype " + std::to_string(datatype));
  }
  if (vox_offset < kNiftiHeaderSize || buf.size() < vox_offset + n * elem)
    throw Error(errc::payload_mismatch, "payload length mismatch");

  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t off = vox_offset + i * elem;
    switch (datatype) {
      case kDtUint8: data[i] = static_cast<std::uint8_t>(buf[off]); break;
      case kDtInt16: data[i] = read_at<std::int16_t>(buf, off, swap); break;
      default: data[i] = read_at<float>(buf, off, swap); break;
    }
  }
  return Volume(dims, {pix[1], pix[2], pix[3]}, std::move(data));
}

template <typename T>
void put(std::vector<char>& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

std::vector<char> encode_nifti(const Dims& d, const Spacing& s, std::int16_t datatype,
                               std::int16_t bitpix, const void* payload, std::size_t bytes) {
  constexpr std::size_t kOffset = 352;
  std::vector<char> buf(kOffset + bytes, 0);
  put<std::int32_t>(buf, 0, kNiftiHeaderSize);
  put<std::int16_t>(buf, 40, 3);
  put<std::int16_t>(buf, 42, static_cast<std::int16_t>(d.nx));
  put<std::int16_t>(buf, 44, static_cast<std::int16_t>(d.ny));
  put<std::int16_t>(buf, 46, static_cast<std::int16_t>(d.nz));
  for (int i = 4; i < 8; ++i) put<std::int16_t>(buf, 40 + 2 * i, 1);
  put<std::int16_t>(buf, 70, datatype);
  put<std::int16_t>(buf, 72, bitpix);
  put<float>(buf, 76, 1.0f);
  put<float>(buf, 80, static_cast<float>(s.sx));
  put<float>(buf, 84, static_cast<float>(s.sy));
  put<float>(buf, 88, static_cast<float>(s.sz));
  put<float>(buf, 108, static_cast<float>(kOffset));
  put<float>(buf, 112, 1.0f);  // scl_slope
  buf[123] = 2;                // xyzt_units: mm
  std::memcpy(buf.data() + 344, "n+1\0", 4);
  std::memcpy(buf.data() + kOffset, payload, bytes);
  return buf;
}

void check_nifti_dims(const Dims& d) {
  if (d.nx > 32767 || d.ny > 32767 || d.nz > 32767)
    throw Error(errc::invalid_argument, "dimension exceeds NIfTI-1 int16 range");
}

}  // namespace

Volume load_volume(const fs::path& path, VolumeFormat format) {
  if (!fs::exists(path)) throw Error(errc::io, "no such file: " + path.string());
  return format == VolumeFormat::nifti1 ? load_nifti(path) : load_native(path);
}

BinaryMask load_mask(const fs::path& path) {
  const Volume v = load_volume(path);
  std::vector<std::uint8_t> bits(v.data().size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const float x = v.data()[i];
    if (x != 0.0f && x != 1.0f) throw Error(errc::bad_header, "mask values must be 0 or 1");
    bits[i] = x != 0.0f;
  }
  return BinaryMask(v.dims(), v.spacing(), std::move(bits));
}

void save_volume_native(const Volume& v, const fs::path& path) {
  write_file(path, v.data().data(), v.data().size_bytes());
  write_sidecar(path, v.dims(), v.spacing(), "f32");
}

void save_mask_native(const BinaryMask& m, const fs::path& path) {
  write_file(path, m.bits().data(), m.bits().size());
  write_sidecar(path, m.dims(), m.spacing(), "u8");
}

void save_volume_nifti(const Volume& v, const fs::path& path) {
  check_nifti_dims(v.dims());
  const auto buf = encode_nifti(v.dims(), v.spacing(), kDtFloat32, 32, v.data().data(),
                                v.data().size_bytes());
  write_file(path, buf.data(), buf.size());
}

std::vector<char> encode_mask_nifti(const BinaryMask& m) {
  check_nifti_dims(m.dims());
  return encode_nifti(m.dims(), m.spacing(), kDtUint8, 8, m.bits().data(), m.bits().size());
}

void save_mask_nifti(const BinaryMask& m, const fs::path& path) {
  const auto buf = encode_mask_nifti(m);
  write_file(path, buf.data(), buf.size());
}

// ---------------------------------------------------------------------------
// Sampling

float sample_trilinear(const Volume& v, const Vec3& p) {
  if (!v.contains(p)) throw Error(errc::out_of_bounds, "sample point outside volume");
  const Vec3 f = v.to_voxel(p);
  const float x = static_cast<float>(f.x), y = static_cast<float>(f.y), z = static_cast<float>(f.z);
  const simd::GridView g{v.data().data(), static_cast<std::int32_t>(v.dims().nx),
                         static_cast<std::int32_t>(v.dims().ny),
                         static_cast<std::int32_t>(v.dims().nz)};
  float out = 0.0f;
  simd::scalar_kernels().trilinear(g, &x, &y, &z, &out, 1);
  return out;
}

double mean_gray_around_seeds(const Volume& v, std::span<const Vec3> seeds, int cube_d) {
  if (seeds.empty()) throw Error(errc::invalid_argument, "mean gray needs at least one seed");
  if (cube_d < 1) throw Error(errc::invalid_argument, "cube edge must be >= 1 voxel");
  const double half = cube_d / 2.0;
  auto range = [half](double c, std::size_t n) {
    const double lo = std::max(0.0, std::ceil(c - half));
    const double hi = std::min(static_cast<double>(n) - 1.0, std::ceil(c + half) - 1.0);
    return std::pair<std::size_t, std::size_t>{static_cast<std::size_t>(lo),
                                               static_cast<std::size_t>(hi)};
  };
  std::vector<double> per_seed;
  per_seed.reserve(seeds.size());
  for (const Vec3& s : seeds) {
    if (!v.contains(s)) throw Error(errc::seed_out_of_bounds, "seed outside volume");
    const Vec3 c = v.to_voxel(s);
    const auto [i0, i1] = range(c.x, v.dims().nx);
    const auto [j0, j1] = range(c.y, v.dims().ny);
    const auto [k0, k1] = range(c.z, v.dims().nz);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = k0; k <= k1; ++k)
      for (std::size_t j = j0; j <= j1; ++j)
        for (std::size_t i = i0; i <= i1; ++i) {
          sum += v.at(i, j, k);
          ++count;
        }
    per_seed.push_back(sum / static_cast<double>(count));
  }
  // Summed in sorted order so the result does not depend on seed order.
  std::sort(per_seed.begin(), per_seed.end());
  double total = 0.0;
  for (double m : per_seed) total += m;
  return total / static_cast<double>(seeds.size());
}

double mean_gray_around_seeds(const Volume& v, const SeedSet& seeds, int cube_d) {
  std::vector<Vec3> all;
  all.reserve(seeds.count());
  all.push_back(seeds.primary);
  all.insert(all.end(), seeds.extras.begin(), seeds.extras.end());
  return mean_gray_around_seeds(v, all, cube_d);
}

}  // namespace polarcut
