#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace farpn {

// Dense H x W x C feature map, row-major with channel-fastest layout.
// Values are kept as doubles in memory; the on-disk FARP format stores
// little-endian f32 payloads.
struct FeatureMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  double stride = 16.0;  // image pixels per feature cell
  std::vector<double> data;

  static FeatureMap zeros(int height, int width, int channels,
                          double stride = 16.0) {
    FeatureMap m;
    m.height = height;
    m.width = width;
    m.channels = channels;
    m.stride = stride;
    m.data.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
    return m;
  }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  double& at(int y, int x, int c) { return data[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data[index(y, x, c)]; }

  bool operator==(const FeatureMap&) const = default;
};

// Bilinear interpolation of one channel at continuous feature coordinates.
// Cell (ix,iy) sits at integer coordinate (ix,iy); cells outside the grid
// contribute zero. Throws std::out_of_range on an invalid channel.
double bilinear_sample(const FeatureMap& map, double x, double y, int channel);

// FARP binary format: magic "FARP", u32 version=1, u32 height, u32 width,
// u32 channels, f32 stride, then height*width*channels little-endian f32
// values in memory order.
void write_tensor(const FeatureMap& map, const std::string& path);
FeatureMap read_tensor(const std::string& path);

struct TensorFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace farpn
