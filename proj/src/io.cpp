#include "rmirt/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rmirt {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

void write_raw_grid(const std::string& stem, std::span<const double> data, int width,
                    int height, int slices) {
  check_same_size(data.size(),
                  static_cast<std::size_t>(width) * height * slices, "write_raw_grid");
  const std::string raw = stem + ".raw";
  auto out = open_out(raw);
  for (double v : data) {
    const float f = static_cast<float>(v);
    const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  finish(out, raw);

  std::ostringstream hdr;
  hdr << "width " << width << "\nheight " << height << "\nslices " << slices
      << "\ntype float32\nbyte_order little_endian\n";
  write_text(stem + ".hdr", hdr.str());
}

RawGrid read_raw_grid(const std::string& stem) {
  std::ifstream hdr(stem + ".hdr");
  if (!hdr) throw IoError("cannot open '" + stem + ".hdr'");
  RawGrid g;
  std::string key, value;
  while (hdr >> key >> value) {
    if (key == "width") g.width = std::stoi(value);
    else if (key == "height") g.height = std::stoi(value);
    else if (key == "slices") g.slices = std::stoi(value);
    else if (key == "type" && value != "float32") throw IoError("unsupported type " + value);
  }
  std::ifstream raw(stem + ".raw", std::ios::binary);
  if (!raw) throw IoError("cannot open '" + stem + ".raw'");
  const std::size_t n = static_cast<std::size_t>(g.width) * g.height * g.slices;
  g.data.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t bits = 0;
    if (!raw.read(reinterpret_cast<char*>(&bits), sizeof bits))
      throw IoError("'" + stem + ".raw' is truncated");
    g.data[k] = std::bit_cast<float>(to_little(bits));
  }
  return g;
}

void write_pgm(const std::string& path, std::span<const double> data, int width, int height) {
  check_same_size(data.size(), static_cast<std::size_t>(width) * height, "write_pgm");
  auto out = open_out(path);
  out << "P5\n" << width << " " << height << "\n255\n";
  for (double v : data) {
    const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * c))));
  }
  finish(out, path);
}

void write_text(const std::string& path, const std::string& contents) {
  auto out = open_out(path);
  out << contents;
  finish(out, path);
}

}  // namespace rmirt
