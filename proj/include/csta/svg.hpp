// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "csta/tensor.hpp"

namespace csta {

/// Grayscale heatmap of a T x N matrix: rows are frames, columns joints,
/// linear mapping with the minimum in white and the maximum in black, plus
/// a legend stating both extremes. A constant matrix renders all white.
void write_heatmap_svg(std::ostream& out, const Tensor& map);

} // namespace csta
