#include "ftc/scc.hpp"

#include <algorithm>

namespace ftc {

std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> out;
    int counter = 0;
    std::vector<std::pair<int, size_t>> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos == 0 && index[v] < 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (pos < adj[v].size()) {
                int w = adj[v][pos++];
                if (index[w] < 0) {
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return out;
}

}  // namespace ftc
