#pragma once

#include <string>

#include "tierforge/frame.hpp"

namespace tierforge {

// 8- or 16-bit grayscale/RGB PNG, normalized by (2^depth - 1) into [0,1].
Frame load_frame(const std::string& path);

// Quantizes with rounding; round trip is exact up to half a quantization step.
void save_frame(const Frame& frame, const std::string& path, int bit_depth = 16);

} // namespace tierforge
