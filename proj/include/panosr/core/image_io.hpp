#pragma once

#include <string>

#include "panosr/core/tensor.hpp"

namespace panosr {

// PNG I/O. Values are normalized to [0,1]; 8- and 16-bit gray/RGB supported.
Tensor read_png(const std::string& path);
void write_png(const std::string& path, const Tensor& chw, int bit_depth = 8);

// Baseline JPEG round trip in memory (encode at the given quality, decode).
// Input is quantized to 8 bits per channel before encoding.
Tensor jpeg_roundtrip_raster(const Tensor& chw, int quality);

}  // namespace panosr
