#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "rmirt/core.hpp"

namespace rmirt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `slices` stacked width x height grids as 32-bit little-endian
/// floats to `stem`.raw, with a text sidecar `stem`.hdr:
///
///   width <W>
///   height <H>
///   slices <S>
///   type float32
///   byte_order little_endian
void write_raw_grid(const std::string& stem, std::span<const double> data, int width,
                    int height, int slices = 1);

struct RawGrid {
  int width = 0;
  int height = 0;
  int slices = 0;
  Vec data;
};

RawGrid read_raw_grid(const std::string& stem);

/// 8-bit binary PGM; values are windowed to [0,1].
void write_pgm(const std::string& path, std::span<const double> data, int width, int height);

void write_text(const std::string& path, const std::string& contents);

}  // namespace rmirt
