#pragma once

#include <vector>

namespace ftc {

// Strongly connected components (iterative Tarjan). Components are emitted in
// reverse topological order: every component appears after all components it reaches.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj);

}  // namespace ftc
