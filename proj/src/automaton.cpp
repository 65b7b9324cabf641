#include "ftc/automaton.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ftc {

Automaton::Automaton(std::shared_ptr<const NeighborGraph> g, AutomatonOptions opt)
    : g_(std::move(g)), chain_(std::make_unique<RegionChain>(*g_)), opt_(opt) {
    if (g_->status() != ClosureStatus::Finite)
        throw std::invalid_argument("automaton needs a verified finite neighbour graph");
    const auto& sp = ifs().space();
    CharVector root;
    root.U = {g_->identity_node(0)};
    root.V = {0};
    root.r = intern_r(Similitude::identity(sp));
    states_.push_back(root);
    index_[root] = 0;
    out_.emplace_back();
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        auto kids = expand(s);
        for (auto& [cv, e] : kids) {
            auto it = index_.find(cv);
            int id;
            if (it == index_.end()) {
                if (states_.size() >= opt_.max_states)
                    throw AutomatonBudgetExceeded("automaton exceeded " + std::to_string(opt_.max_states) + " states");
                id = static_cast<int>(states_.size());
                states_.push_back(cv);
                index_[cv] = id;
                out_.emplace_back();
                queue.push_back(id);
            } else {
                id = it->second;
            }
            if (edge_index_.count({s, id})) {
                ++anomalies_;  // two sibling atoms with one characteristic vector
                continue;
            }
            e.from = s;
            e.to = id;
            edge_index_[{s, id}] = static_cast<int>(edges_.size());
            out_[s].push_back(static_cast<int>(edges_.size()));
            edges_.push_back(std::move(e));
        }
    }
}

int Automaton::intern_r(const Similitude& m) {
    auto it = r_index_.find(m);
    if (it != r_index_.end()) return it->second;
    int id = static_cast<int>(r_maps_.size());
    r_maps_.push_back(m);
    r_index_.emplace(m, id);
    return id;
}

std::vector<ChildCylinder> Automaton::make_child_cylinders(int s) const {
    const auto& cv = states_[s];
    std::vector<ChildCylinder> out;
    std::unordered_map<Similitude, int, SimilitudeHash> seen;
    for (size_t a = 0; a < cv.U.size(); ++a) {
        const auto& node = g_->node(cv.U[a]);
        const auto& ext = ifs().ext(node.eb);
        for (size_t w = 0; w < ext.size(); ++w) {
            Similitude c = node.h.compose(ext[w].map);
            auto it = seen.find(c);
            if (it != seen.end()) {
                out[it->second].sources.push_back({static_cast<int>(a), static_cast<int>(w)});
                continue;
            }
            seen.emplace(c, static_cast<int>(out.size()));
            out.push_back({std::move(c), ext[w].new_tag, {{static_cast<int>(a), static_cast<int>(w)}}});
        }
    }
    return out;
}

std::vector<std::pair<CharVector, AutomatonEdge>> Automaton::expand(int s) {
    if (child_cyl_.size() <= static_cast<size_t>(s)) child_cyl_.resize(s + 1);
    child_cyl_[s] = make_child_cylinders(s);
    const auto& C = child_cyl_[s];
    const CharVector cv = states_[s];
    const int n = static_cast<int>(C.size());
    std::vector<char> inV(cv.U.size(), 0);
    for (int p : cv.V) inV[p] = 1;

    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
        bool fromV = false, fromOther = false;
        for (auto [a, w] : C[i].sources) (inV[a] ? fromV : fromOther) = true;
        if (fromV && !fromOther) candidates.push_back(i);
    }
    // for each V entry, the last candidate position that covers it
    std::map<int, int> last_cover;
    std::vector<std::vector<int>> covers(candidates.size());
    for (size_t k = 0; k < candidates.size(); ++k)
        for (auto [a, w] : C[candidates[k]].sources)
            if (inV[a]) {
                covers[k].push_back(a);
                last_cover[a] = static_cast<int>(k);
            }
    for (int p : cv.V)
        if (!last_cover.count(p)) {
            ++anomalies_;  // a containing cylinder without admissible children
            return {};
        }

    std::map<std::pair<int, int>, int> rel_cache;
    auto rel = [&](int i, int j) {
        auto key = std::make_pair(i, j);
        auto it = rel_cache.find(key);
        if (it != rel_cache.end()) return it->second;
        int id = g_->find(C[i].map.inverse().compose(C[j].map), C[i].tag, C[j].tag);
        if (id >= 0 && !g_->node(id).alive) id = -1;
        rel_cache[key] = id;
        return id;
    };
    auto tuple_ok = [&](const std::vector<int>& set) {
        if (set.size() <= 1) return true;
        std::vector<int> nodes;
        for (size_t t = 1; t < set.size(); ++t) {
            int id = rel(set[0], set[t]);
            if (id < 0) return false;
            nodes.push_back(id);
        }
        return g_->tuple_intersects_nodes(C[set[0]].tag, nodes);
    };

    std::vector<std::pair<CharVector, AutomatonEdge>> result;
    std::set<CharVector> produced;
    std::vector<int> chosen;
    std::map<int, int> covered;  // V position -> count
    std::function<void(size_t)> dfs = [&](size_t k) {
        if (k == candidates.size()) {
            for (int p : cv.V)
                if (!covered[p]) return;
            std::vector<int> nb;
            for (int i = 0; i < n; ++i) {
                if (std::binary_search(chosen.begin(), chosen.end(), i)) {
                    nb.push_back(i);
                    continue;
                }
                bool ok = true;
                for (int c : chosen)
                    if (rel(c, i) < 0) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                std::vector<int> t = chosen;
                t.push_back(i);
                if (tuple_ok(t)) nb.push_back(i);
            }
            const int f1 = chosen[0];
            CharVector child;
            for (int i : nb) child.U.push_back(i == f1 ? g_->identity_node(C[f1].tag) : rel(f1, i));
            for (size_t p = 0; p < nb.size(); ++p)
                if (std::binary_search(chosen.begin(), chosen.end(), nb[p])) child.V.push_back(static_cast<int>(p));
            if (opt_.exact_atoms) {
                RegionQuery q;
                q.base_tag = C[f1].tag;
                for (size_t t = 1; t < chosen.size(); ++t) q.inside.push_back(rel(f1, chosen[t]));
                for (int i : nb)
                    if (!std::binary_search(chosen.begin(), chosen.end(), i)) q.outside.push_back(rel(f1, i));
                if (!chain_->nonempty(q)) return;
            }
            child.r = intern_r(C[f1].map);
            if (!produced.insert(child).second) {
                ++anomalies_;
                return;
            }
            AutomatonEdge e;
            e.lambda = chosen;
            e.nbhd = nb;
            result.push_back({std::move(child), std::move(e)});
            return;
        }
        const int c = candidates[k];
        // include
        bool pair_ok = true;
        for (int x : chosen)
            if (rel(x, c) < 0) {
                pair_ok = false;
                break;
            }
        if (pair_ok) {
            chosen.push_back(c);
            if (tuple_ok(chosen)) {
                for (int a : covers[k]) ++covered[a];
                dfs(k + 1);
                for (int a : covers[k]) --covered[a];
            }
            chosen.pop_back();
        }
        // exclude, unless it strands a V entry
        for (int a : covers[k])
            if (last_cover[a] == static_cast<int>(k) && covered[a] == 0) return;
        dfs(k + 1);
    };
    dfs(0);
    return result;
}

std::vector<int> Automaton::children(int s) const {
    std::vector<int> out;
    for (int e : out_[s]) out.push_back(edges_[e].to);
    return out;
}

const AutomatonEdge* Automaton::edge(int from, int to) const {
    auto it = edge_index_.find({from, to});
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

std::optional<int> Automaton::resolve(const std::vector<int>& address) const {
    if (address.empty() || address[0] != root()) return std::nullopt;
    for (size_t i = 1; i < address.size(); ++i)
        if (!edge(address[i - 1], address[i])) return std::nullopt;
    return address.back();
}

std::vector<std::vector<int>> Automaton::addresses(int depth) const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur{root()};
    std::function<void(int)> rec = [&](int d) {
        if (d == depth) {
            out.push_back(cur);
            return;
        }
        for (int e : out_[cur.back()]) {
            cur.push_back(edges_[e].to);
            rec(d + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

RegionQuery Automaton::region_of(int s) const {
    const auto& cv = states_[s];
    RegionQuery q;
    q.base_tag = cv.tag(*g_);
    std::vector<char> inV(cv.U.size(), 0);
    for (int p : cv.V) inV[p] = 1;
    for (size_t p = 0; p < cv.U.size(); ++p) {
        if (static_cast<int>(p) == cv.V[0]) continue;
        (inV[p] ? q.inside : q.outside).push_back(cv.U[p]);
    }
    return q;
}

std::optional<Point> Automaton::witness(int s) const {
    RegionWitness w;
    if (!chain_->nonempty(region_of(s), &w)) return std::nullopt;
    return chain_->witness_point(w);
}

std::string Automaton::to_dot() const {
    std::ostringstream os;
    os << "digraph automaton {\n  node [shape=ellipse, fontsize=10];\n";
    for (size_t i = 0; i < states_.size(); ++i) {
        const auto& cv = states_[i];
        os << "  s" << i << " [label=\"" << i << " (" << cv.V.size() << "," << cv.U.size() << ")\\n"
           << r_maps_[cv.r].str() << "\"];\n";
    }
    for (const auto& e : edges_) os << "  s" << e.from << " -> s" << e.to << ";\n";
    os << "}\n";
    return os.str();
}

std::string Automaton::to_json() const {
    nlohmann::ordered_json j;
    j["neighbors"] = nlohmann::ordered_json::array();
    for (int id : g_->gamma()) {
        const auto& n = g_->node(id);
        j["neighbors"].push_back({{"id", id}, {"map", n.h.str()}, {"tags", {n.ea, n.eb}}});
    }
    j["states"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < states_.size(); ++i) {
        const auto& cv = states_[i];
        j["states"].push_back({{"id", i}, {"U", cv.U}, {"V", cv.V}, {"r", r_maps_[cv.r].str()}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges_)
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"lambda", e.lambda}, {"nbhd", e.nbhd}});
    return j.dump(1);
}

}  // namespace ftc
