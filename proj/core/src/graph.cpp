#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>

#include "escrate/sparse.hpp"

namespace escrate {

// Iterative Tarjan; the recursive form overflows the stack at 2^20 states.
ComponentDecomposition strongly_connected_components(const SparseMatrix& a) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  const auto n = static_cast<std::uint32_t>(a.rows());
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  ComponentDecomposition out;
  out.component_of.assign(n, kUnset);
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t v;
    std::size_t edge;
  };
  std::vector<Frame> call;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      auto& frame = call.back();
      const auto v = frame.v;
      auto cols = a.row_cols(v);
      if (frame.edge < cols.size()) {
        const auto w = cols[frame.edge++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        const auto id = static_cast<std::uint32_t>(out.members.size());
        out.members.emplace_back();
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component_of[w] = id;
          out.members.back().push_back(w);
        } while (w != v);
        std::sort(out.members.back().begin(), out.members.back().end());
      }
      call.pop_back();
      if (!call.empty()) {
        const auto parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return out;
}

std::size_t component_period(const SparseMatrix& a, const std::vector<std::uint32_t>& members,
                             const std::vector<std::uint32_t>& component_of, std::uint32_t id) {
  if (members.empty()) return 0;
  // BFS levels; the period is the gcd of level(u) + 1 - level(v) over edges u -> v.
  std::vector<std::int64_t> level(a.rows(), -1);
  std::queue<std::uint32_t> q;
  level[members.front()] = 0;
  q.push(members.front());
  std::size_t g = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : a.row_cols(u)) {
      if (component_of[v] != id) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        auto diff = level[u] + 1 - level[v];
        g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
      }
    }
  }
  return g;
}

}  // namespace escrate
