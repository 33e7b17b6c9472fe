#include "farpn/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace farpn {

double bilinear_sample(const FeatureMap& map, double x, double y, int channel) {
  if (channel < 0 || channel >= map.channels) {
    throw std::out_of_range("bilinear_sample: invalid channel");
  }
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;

  auto cell = [&](int ix, int iy) -> double {
    if (ix < 0 || iy < 0 || ix >= map.width || iy >= map.height) return 0.0;
    return map.at(iy, ix, channel);
  };

  return (1.0 - fy) * ((1.0 - fx) * cell(x0, y0) + fx * cell(x0 + 1, y0)) +
         fy * ((1.0 - fx) * cell(x0, y0 + 1) + fx * cell(x0 + 1, y0 + 1));
}

namespace {

constexpr char kMagic[4] = {'F', 'A', 'R', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 3])) << 24;
}

float get_f32(const std::string& in, std::size_t pos) {
  const std::uint32_t bits = get_u32(in, pos);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void write_tensor(const FeatureMap& map, const std::string& path) {
  std::string out;
  out.reserve(24 + map.data.size() * 4);
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(map.height));
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_u32(out, static_cast<std::uint32_t>(map.channels));
  put_f32(out, static_cast<float>(map.stride));
  for (double v : map.data) put_f32(out, static_cast<float>(v));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw TensorFormatError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw TensorFormatError("write failed: " + path);
}

FeatureMap read_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw TensorFormatError("cannot open: " + path);
  std::string in((std::istreambuf_iterator<char>(f)),
                 std::istreambuf_iterator<char>());

  if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0) {
    throw TensorFormatError("bad magic");
  }
  if (in.size() < 24) throw TensorFormatError("truncated header");
  const std::uint32_t version = get_u32(in, 4);
  if (version != kVersion) throw TensorFormatError("unsupported version");
  const std::uint32_t h = get_u32(in, 8);
  const std::uint32_t w = get_u32(in, 12);
  const std::uint32_t c = get_u32(in, 16);
  const float stride = get_f32(in, 20);
  if (!(stride > 0.0f) || !std::isfinite(stride)) {
    throw TensorFormatError("invalid stride");
  }

  const std::uint64_t count = static_cast<std::uint64_t>(h) * w * c;
  if (count > (std::numeric_limits<std::uint32_t>::max)() ||
      h > (1u << 24) || w > (1u << 24) || c > (1u << 24)) {
    throw TensorFormatError("dimension overflow");
  }
  if (in.size() != 24 + count * 4) {
    throw TensorFormatError(in.size() < 24 + count * 4 ? "truncated payload"
                                                       : "trailing bytes");
  }

  FeatureMap map = FeatureMap::zeros(static_cast<int>(h), static_cast<int>(w),
                                     static_cast<int>(c), stride);
  for (std::uint64_t i = 0; i < count; ++i) {
    map.data[i] = get_f32(in, 24 + i * 4);
  }
  return map;
}

}  // namespace farpn
