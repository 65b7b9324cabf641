#include "ftc/region.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "ftc/linalg.hpp"
#include "ftc/scc.hpp"

namespace ftc {

namespace {
const std::vector<int> kFail{-1};
}

RegionChain::RegionChain(const NeighborGraph& g) : g_(g) {}

RegionChain::Key RegionChain::normalize(int tag, std::vector<std::vector<int>> pos,
                                        std::vector<std::vector<int>> neg) const {
    std::vector<std::vector<int>> p2, n2;
    for (auto& s : pos) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (s.empty()) return kFail;
        bool has_id = std::any_of(s.begin(), s.end(), [&](int n) { return g_.node(n).is_identity; });
        if (!has_id) p2.push_back(std::move(s));
    }
    for (auto& s : neg) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (s.empty()) continue;
        if (std::any_of(s.begin(), s.end(), [&](int n) { return g_.node(n).is_identity; })) return kFail;
        n2.push_back(std::move(s));
    }
    std::sort(p2.begin(), p2.end());
    p2.erase(std::unique(p2.begin(), p2.end()), p2.end());
    std::sort(n2.begin(), n2.end());
    n2.erase(std::unique(n2.begin(), n2.end()), n2.end());
    Key k{tag, static_cast<int>(p2.size())};
    for (const auto& s : p2) {
        k.push_back(static_cast<int>(s.size()));
        k.insert(k.end(), s.begin(), s.end());
    }
    k.push_back(static_cast<int>(n2.size()));
    for (const auto& s : n2) {
        k.push_back(static_cast<int>(s.size()));
        k.insert(k.end(), s.begin(), s.end());
    }
    return k;
}

int RegionChain::intern(const Key& k) const {
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(keys_.size());
    ids_.emplace(k, id);
    keys_.push_back(k);
    StateInfo info;
    if (k == kFail) {
        info.fail = true;
    } else {
        info.tag = k[0];
        size_t i = 2;
        for (int t = 0; t < k[1]; ++t) i += 1 + k[i];
        info.has_negative = k[i] > 0;
    }
    info_.push_back(std::move(info));
    expanded_.push_back(0);
    value_.push_back(info_.back().fail ? std::optional<Q>(Q(0)) : std::nullopt);
    return id;
}

void RegionChain::expand(int s) const {
    if (expanded_[s]) return;
    expanded_[s] = 1;
    if (info_[s].fail) return;
    const Key k = keys_[s];
    const int tag = k[0];
    std::vector<std::vector<int>> pos, neg;
    size_t i = 1;
    for (int which = 0; which < 2; ++which) {
        int cnt = k[i++];
        for (int t = 0; t < cnt; ++t) {
            int len = k[i++];
            std::vector<int> set(k.begin() + i, k.begin() + i + len);
            i += len;
            (which == 0 ? pos : neg).push_back(std::move(set));
        }
    }
    const auto& ext = g_.ifs().ext(tag);
    for (size_t wa = 0; wa < ext.size(); ++wa) {
        auto step = [&](const std::vector<std::vector<int>>& tracks) {
            std::vector<std::vector<int>> out;
            for (const auto& set : tracks) {
                std::vector<int> next;
                for (int n : set) {
                    const auto& l = g_.succ_first(n, static_cast<int>(wa));
                    next.insert(next.end(), l.begin(), l.end());
                }
                out.push_back(std::move(next));
            }
            return out;
        };
        Key child = normalize(ext[wa].new_tag, step(pos), step(neg));
        int c = intern(child);
        info_[s].succ.push_back({ext[wa].prob, c});
        info_[s].succ_ext.push_back(static_cast<int>(wa));
    }
}

RegionChain::Key RegionChain::start_key(const RegionQuery& q) const {
    std::vector<std::vector<int>> pos, neg;
    for (int n : q.inside) {
        if (n < 0 || !g_.node(n).alive) return kFail;
        if (g_.node(n).ea != q.base_tag) throw std::invalid_argument("region node tag differs from base tag");
        pos.push_back({n});
    }
    for (int n : q.outside) {
        if (n < 0 || !g_.node(n).alive) continue;
        if (g_.node(n).ea != q.base_tag) throw std::invalid_argument("region node tag differs from base tag");
        neg.push_back({n});
    }
    return normalize(q.base_tag, std::move(pos), std::move(neg));
}

Q RegionChain::probability(const RegionQuery& q) const {
    std::lock_guard<std::mutex> lock(mu_);
    int start = intern(start_key(q));
    if (value_[start]) return *value_[start];
    // collect the unvalued reachable part
    std::vector<int> local;
    std::map<int, int> local_id;
    std::deque<int> queue{start};
    local_id[start] = 0;
    local.push_back(start);
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        expand(s);
        for (const auto& [p, t] : info_[s].succ) {
            if (value_[t] || local_id.count(t)) continue;
            local_id[t] = static_cast<int>(local.size());
            local.push_back(t);
            queue.push_back(t);
        }
    }
    std::vector<std::vector<int>> adj(local.size());
    for (size_t i = 0; i < local.size(); ++i)
        for (const auto& [p, t] : info_[local[i]].succ)
            if (!value_[t]) adj[i].push_back(local_id[t]);
    auto comps = strongly_connected(adj);
    for (const auto& comp : comps) {
        std::map<int, int> pos;  // global id -> row
        for (size_t r = 0; r < comp.size(); ++r) pos[local[comp[r]]] = static_cast<int>(r);
        bool closed = true;
        for (int li : comp)
            for (const auto& [p, t] : info_[local[li]].succ)
                if (!pos.count(t)) closed = false;
        if (closed) {
            Q v = info_[local[comp[0]]].has_negative ? Q(0) : Q(1);
            for (int li : comp) value_[local[li]] = v;
            continue;
        }
        const size_t n = comp.size();
        QMat a(n, QVec(n, Q(0)));
        QVec b(n, Q(0));
        for (size_t r = 0; r < n; ++r) {
            a[r][r] += 1;
            for (const auto& [p, t] : info_[local[comp[r]]].succ) {
                auto it = pos.find(t);
                if (it != pos.end())
                    a[r][it->second] -= p;
                else
                    b[r] += p * *value_[t];
            }
        }
        QVec x = solve_rational(std::move(a), std::move(b));
        for (size_t r = 0; r < n; ++r) value_[local[comp[r]]] = x[r];
    }
    return *value_[start];
}

bool RegionChain::nonempty(const RegionQuery& q, RegionWitness* w) const {
    std::lock_guard<std::mutex> lock(mu_);
    int start = intern(start_key(q));
    if (info_[start].fail) return false;
    std::vector<int> local;
    std::map<int, int> local_id;
    std::vector<int> parent, parent_ext;
    std::deque<int> queue{start};
    local_id[start] = 0;
    local.push_back(start);
    parent.push_back(-1);
    parent_ext.push_back(-1);
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        expand(s);
        for (size_t e = 0; e < info_[s].succ.size(); ++e) {
            int t = info_[s].succ[e].second;
            if (info_[t].fail || local_id.count(t)) continue;
            local_id[t] = static_cast<int>(local.size());
            local.push_back(t);
            parent.push_back(local_id[s]);
            parent_ext.push_back(info_[s].succ_ext[e]);
            queue.push_back(t);
        }
    }
    auto good = [&](int gid) { return !info_[gid].fail && !info_[gid].has_negative; };
    std::vector<std::vector<int>> adj(local.size());
    for (size_t i = 0; i < local.size(); ++i) {
        if (!good(local[i])) continue;
        for (const auto& [p, t] : info_[local[i]].succ)
            if (local_id.count(t) && good(t)) adj[i].push_back(local_id[t]);
    }
    auto comps = strongly_connected(adj);
    for (const auto& comp : comps) {
        if (!good(local[comp[0]])) continue;
        bool cyc = comp.size() > 1 ||
                   std::find(adj[comp[0]].begin(), adj[comp[0]].end(), comp[0]) != adj[comp[0]].end();
        if (!cyc) continue;
        if (w) {
            const int entry = *std::min_element(comp.begin(), comp.end());
            w->prefix.clear();
            w->prefix_tags.clear();
            for (int v = entry; parent[v] >= 0; v = parent[v]) {
                w->prefix.push_back(parent_ext[v]);
                w->prefix_tags.push_back(info_[local[parent[v]]].tag);
            }
            std::reverse(w->prefix.begin(), w->prefix.end());
            std::reverse(w->prefix_tags.begin(), w->prefix_tags.end());
            // BFS inside the component back to entry
            std::set<int> in(comp.begin(), comp.end());
            std::map<int, std::pair<int, int>> from;  // node -> (prev, ext)
            std::deque<int> bq{entry};
            bool found = false;
            int last = -1, last_ext = -1;
            std::set<int> seen{entry};
            while (!bq.empty() && !found) {
                int v = bq.front();
                bq.pop_front();
                const auto& inf = info_[local[v]];
                for (size_t e = 0; e < inf.succ.size(); ++e) {
                    int t = inf.succ[e].second;
                    if (!local_id.count(t)) continue;
                    int lt = local_id[t];
                    if (!in.count(lt)) continue;
                    if (lt == entry) {
                        found = true;
                        last = v;
                        last_ext = inf.succ_ext[e];
                        break;
                    }
                    if (seen.insert(lt).second) {
                        from[lt] = {v, inf.succ_ext[e]};
                        bq.push_back(lt);
                    }
                }
            }
            w->cycle.clear();
            w->cycle_tags.clear();
            w->cycle.push_back(last_ext);
            w->cycle_tags.push_back(info_[local[last]].tag);
            for (int v = last; v != entry; v = from[v].first) {
                w->cycle.push_back(from[v].second);
                w->cycle_tags.push_back(info_[local[from[v].first]].tag);
            }
            std::reverse(w->cycle.begin(), w->cycle.end());
            std::reverse(w->cycle_tags.begin(), w->cycle_tags.end());
        }
        return true;
    }
    return false;
}

Point RegionChain::witness_point(const RegionWitness& w) const {
    const auto& ifs = g_.ifs();
    const auto& sp = ifs.space();
    Similitude cyc = Similitude::identity(sp);
    for (size_t i = 0; i < w.cycle.size(); ++i) cyc = cyc.compose(ifs.ext(w.cycle_tags[i])[w.cycle[i]].map);
    Similitude pre = Similitude::identity(sp);
    for (size_t i = 0; i < w.prefix.size(); ++i) pre = pre.compose(ifs.ext(w.prefix_tags[i])[w.prefix[i]].map);
    return pre.apply(cyc.fixed_point());
}

size_t RegionChain::explored_states() const {
    std::lock_guard<std::mutex> lock(mu_);
    return keys_.size();
}

}  // namespace ftc
