#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pupolicy/matrix.hpp"

namespace pupolicy {

// IDX payloads as used by the MNIST distribution: big-endian header,
// magic 0x00000801 for 1-D label vectors, 0x00000803 for 3-D image stacks.

// Labels in 0..9, one per example.
std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

// Images flattened to rows x (h*w), pixel values scaled into [0,1].
Matrix parse_idx_images(const std::vector<std::uint8_t>& bytes);

// Reads a file; gzip-compressed content is decompressed transparently.
std::vector<std::uint8_t> read_idx_file(const std::filesystem::path& path);

}  // namespace pupolicy
