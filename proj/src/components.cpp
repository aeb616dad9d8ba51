#include "harnacklab/components.hpp"

#include <numeric>
#include <queue>

namespace harnack {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

// Two-pass union-find labeling over the backward face neighbors.
Labeling label_components(const Grid& grid, const std::vector<std::uint8_t>& flags) {
  const std::size_t size = grid.size();
  std::vector<std::size_t> parent(size);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) {
    if (!flags[i]) continue;
    const Index idx = grid.multi_index(i);
    for (int a = 0; a < grid.dim(); ++a) {
      if (idx[static_cast<std::size_t>(a)] == 0) continue;
      const std::size_t j = i - grid.stride(a);
      if (!flags[j]) continue;
      const std::size_t ri = find_root(parent, i), rj = find_root(parent, j);
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }
  Labeling out;
  out.labels.assign(size, 0);
  std::vector<std::uint32_t> root_label(size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    if (!flags[i]) continue;
    const std::size_t r = find_root(parent, i);
    if (root_label[r] == 0) root_label[r] = ++out.count;
    out.labels[i] = root_label[r];
  }
  return out;
}

std::optional<std::vector<std::size_t>> shortest_path(const Grid& grid, const std::vector<std::uint8_t>& flags,
                                                      std::size_t from, std::size_t to) {
  if (!flags[from] || !flags[to]) return std::nullopt;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(grid.size(), none);
  std::queue<std::size_t> q;
  prev[from] = from;
  q.push(from);
  while (!q.empty() && prev[to] == none) {
    const std::size_t x = q.front();
    q.pop();
    grid.for_each_neighbor(x, [&](std::size_t y) {
      if (flags[y] && prev[y] == none) {
        prev[y] = x;
        q.push(y);
      }
    });
  }
  if (prev[to] == none) return std::nullopt;
  std::vector<std::size_t> path;
  for (std::size_t x = to; x != from; x = prev[x]) path.push_back(x);
  path.push_back(from);
  return std::vector<std::size_t>(path.rbegin(), path.rend());
}

}  // namespace harnack
