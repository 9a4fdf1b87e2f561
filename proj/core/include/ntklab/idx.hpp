#pragma once

#include <string>
#include <vector>

#include "ntklab/numerics.hpp"

namespace ntklab {

struct IdxData {
  Matrix images;            // n x pixels, rows unit-normalized
  std::vector<int> labels;  // 0..9
};

// Reads an IDX image/label file pair (big-endian magics 2051 / 2049).
// Pixels are scaled to [0,1] and each row normalized to unit l2 norm.
IdxData load_idx(const std::string& path_images, const std::string& path_labels);

}  // namespace ntklab
