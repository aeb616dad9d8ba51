#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "harnacklab/grid.hpp"

namespace harnack {

/// Face-connected component labels of the flagged nodes: 0 for unflagged
/// nodes, 1..count otherwise, numbered in order of first appearance.
struct Labeling {
  std::vector<std::uint32_t> labels;
  std::uint32_t count = 0;
};

Labeling label_components(const Grid& grid, const std::vector<std::uint8_t>& flags);

/// Shortest face-adjacency path from `from` to `to` through flagged nodes.
std::optional<std::vector<std::size_t>> shortest_path(const Grid& grid, const std::vector<std::uint8_t>& flags,
                                                      std::size_t from, std::size_t to);

}  // namespace harnack
