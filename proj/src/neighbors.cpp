#include "ftc/neighbors.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ftc {

BoundingBall bounding_ball(const IFS& ifs) {
    const auto& sp = ifs.space();
    const int d = sp->dim();
    const auto& f = sp->field();
    Point c(d, FieldElement::zero(f));
    for (const auto& m : ifs.maps()) {
        Point p = m.fixed_point();
        for (int i = 0; i < d; ++i) c[i] += p[i];
    }
    Q inv_m(1, ifs.size());
    for (auto& x : c) x = x.scaled(inv_m);
    Interval rmax(Q(0), 96);
    Interval dist(Q(0), 96);
    for (const auto& m : ifs.maps()) {
        Point y = m.apply(c);
        Point diff(d);
        for (int i = 0; i < d; ++i) diff[i] = y[i] - c[i];
        dist = Interval::hull(dist, sp->norm2(diff).sqrt());
        rmax = Interval::hull(rmax, m.ratio());
    }
    Interval R = dist / (Interval(Q(1), 96) - rmax);
    // keep only the upper bound: [0, hi]
    Interval up(96);
    mpfr_set_ui(up.lo(), 0, MPFR_RNDD);
    mpfr_set(up.hi(), R.hi(), MPFR_RNDU);
    if (mpfr_sgn(dist.hi()) == 0) mpfr_set_ui(up.hi(), 0, MPFR_RNDU);
    return {c, up};
}

NeighborGraph::NeighborGraph(std::shared_ptr<const IFS> ifs, size_t max_nodes) : ifs_(std::move(ifs)) {
    if (max_nodes < 1) throw std::invalid_argument("maxNodes must be >= 1");
    ball_ = bounding_ball(*ifs_);
    const auto& sp = ifs_->space();
    auto add = [&](Similitude h, int ea, int eb) -> std::pair<int, bool> {
        NeighborKey key{h, ea, eb};
        auto it = index_.find(key);
        if (it != index_.end()) return {it->second, false};
        int id = static_cast<int>(nodes_.size());
        NeighborNode n;
        n.is_identity = (ea == eb) && h.is_identity();
        n.h = std::move(h);
        n.ea = ea;
        n.eb = eb;
        nodes_.push_back(std::move(n));
        index_.emplace(std::move(key), id);
        return {id, true};
    };
    std::deque<int> queue;
    queue.push_back(add(Similitude::identity(sp), 0, 0).first);
    const long K = ifs_->level_exponent();
    while (!queue.empty()) {
        if (nodes_.size() > max_nodes) {
            status_ = ClosureStatus::ExceededBound;
            frontier_ = queue.size();
            break;
        }
        int id = queue.front();
        queue.pop_front();
        const int ea = nodes_[id].ea, eb = nodes_[id].eb;
        const auto& xa = ifs_->ext(ea);
        const auto& xb = ifs_->ext(eb);
        for (size_t i = 0; i < xa.size(); ++i) {
            Similitude left = xa[i].map.inverse().compose(nodes_[id].h);
            for (size_t j = 0; j < xb.size(); ++j) {
                Similitude h2 = left.compose(xb[j].map);
                if (std::labs(h2.exponent()) >= K) throw std::logic_error("neighbour exponent left the bounded band");
                if (!ball_test(h2)) continue;
                auto [tid, fresh] = add(std::move(h2), xa[i].new_tag, xb[j].new_tag);
                nodes_[id].out.push_back({static_cast<int>(i), static_cast<int>(j), tid});
                if (fresh) queue.push_back(tid);
            }
        }
    }
    prune();
    succ_first_.resize(nodes_.size());
    for (size_t id = 0; id < nodes_.size(); ++id) {
        succ_first_[id].resize(ifs_->ext(nodes_[id].ea).size());
        if (!nodes_[id].alive) continue;
        for (const auto& e : nodes_[id].out)
            if (nodes_[e.target].alive) succ_first_[id][e.wa].push_back(e.target);
        for (auto& v : succ_first_[id]) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
}

bool NeighborGraph::ball_test(const Similitude& h) const {
    Point y = h.apply(ball_.center);
    Point diff(y.size());
    for (size_t i = 0; i < y.size(); ++i) diff[i] = y[i] - ball_.center[i];
    Interval lhs = ifs_->space()->norm2(diff);
    Interval bound = (Interval(Q(1), 96) + h.ratio()) * ball_.radius;
    return possibly_le(lhs, bound.sqr());
}

void NeighborGraph::prune() {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& n : nodes_) {
            if (!n.alive) continue;
            bool any = false;
            for (const auto& e : n.out)
                if (nodes_[e.target].alive) {
                    any = true;
                    break;
                }
            if (!any) {
                n.alive = false;
                changed = true;
            }
        }
    }
    // an incomplete closure cannot certify deadness of frontier nodes
    if (status_ == ClosureStatus::ExceededBound)
        for (auto& n : nodes_) n.alive = n.alive || n.out.empty();
}

int NeighborGraph::find(const Similitude& h, int ea, int eb) const {
    auto it = index_.find(NeighborKey{h, ea, eb});
    return it == index_.end() ? -1 : it->second;
}

int NeighborGraph::identity_node(int tag) const { return find(Similitude::identity(ifs_->space()), tag, tag); }

size_t NeighborGraph::gamma_size() const {
    return std::count_if(nodes_.begin(), nodes_.end(), [](const NeighborNode& n) { return n.alive; });
}

std::vector<int> NeighborGraph::gamma() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive) out.push_back(static_cast<int>(i));
    return out;
}

bool NeighborGraph::intersects(const Similitude& f, const Similitude& g) const {
    if (ifs_->level_of(f.exponent()) != ifs_->level_of(g.exponent()))
        throw std::invalid_argument("intersects: maps are not from a common stopping level");
    if (f == g) return true;
    int id = find(f.inverse().compose(g), ifs_->tag_of(f.exponent()), ifs_->tag_of(g.exponent()));
    return id >= 0 && nodes_[id].alive;
}

std::vector<int> NeighborGraph::canonical_tuple(int tag, std::vector<int> nodes) const {
    std::vector<int> key;
    key.push_back(tag);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int n : nodes)
        if (!nodes_[n].is_identity) key.push_back(n);
    return key;
}

bool NeighborGraph::tuple_alive(const std::vector<int>& key, std::map<std::vector<int>, int>& status,
                                size_t& budget) const {
    if (key.size() <= 2) {
        if (key.size() == 1) return true;
        return nodes_[key[1]].alive;
    }
    auto memo = tuple_memo_.find(key);
    if (memo != tuple_memo_.end()) return memo->second;
    auto st = status.find(key);
    if (st != status.end()) {
        if (st->second == 1) return true;  // cycle on the current path
        return st->second == 2;
    }
    if (budget == 0) throw TupleBudgetExceeded("tuple intersection state budget exceeded");
    --budget;
    status[key] = 1;
    const int tag = key[0];
    const auto& ext = ifs_->ext(tag);
    bool alive = false;
    for (size_t wa = 0; wa < ext.size() && !alive; ++wa) {
        std::vector<const std::vector<int>*> lists;
        bool ok = true;
        for (size_t t = 1; t < key.size(); ++t) {
            const auto& l = succ_first_[key[t]][wa];
            if (l.empty()) {
                ok = false;
                break;
            }
            lists.push_back(&l);
        }
        if (!ok) continue;
        std::set<std::vector<int>> seen;
        std::vector<int> choice(lists.size(), 0);
        while (!alive) {
            std::vector<int> picked;
            for (size_t t = 0; t < lists.size(); ++t) picked.push_back((*lists[t])[choice[t]]);
            auto child = canonical_tuple(ext[wa].new_tag, picked);
            if (seen.insert(child).second && tuple_alive(child, status, budget)) alive = true;
            size_t t = 0;
            while (t < lists.size() && ++choice[t] == static_cast<int>(lists[t]->size())) choice[t++] = 0;
            if (t == lists.size()) break;
        }
    }
    status[key] = alive ? 2 : 3;
    if (!alive) tuple_memo_[key] = false;
    return alive;
}

bool NeighborGraph::tuple_intersects_nodes(int base_tag, std::vector<int> nodes) const {
    for (int n : nodes)
        if (n < 0 || !nodes_[n].alive) return false;
    auto key = canonical_tuple(base_tag, std::move(nodes));
    std::lock_guard<std::mutex> lock(memo_mu_);
    std::map<std::vector<int>, int> status;
    size_t budget = 2000000;
    bool r = tuple_alive(key, status, budget);
    // every state that reached "alive" is a true positive; cache them
    for (const auto& [k, s] : status)
        if (s == 2 || (s == 1 && r)) tuple_memo_[k] = true;
    return r;
}

bool NeighborGraph::tuple_intersects(const std::vector<Similitude>& maps) const {
    if (maps.empty()) return true;
    const int lvl = ifs_->level_of(maps[0].exponent());
    for (const auto& m : maps)
        if (ifs_->level_of(m.exponent()) != lvl)
            throw std::invalid_argument("tuple_intersects: maps are not from a common stopping level");
    Similitude g1inv = maps[0].inverse();
    const int e1 = ifs_->tag_of(maps[0].exponent());
    std::vector<int> nodes;
    for (size_t t = 1; t < maps.size(); ++t) {
        int id = find(g1inv.compose(maps[t]), e1, ifs_->tag_of(maps[t].exponent()));
        if (id < 0 || !nodes_[id].alive) return false;
        nodes.push_back(id);
    }
    return tuple_intersects_nodes(e1, nodes);
}

std::string NeighborGraph::to_dot() const {
    std::ostringstream os;
    os << "digraph neighbors {\n  node [shape=box, fontsize=10];\n";
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        os << "  n" << i << " [label=\"" << i << ": " << n.h.str();
        if (ifs_->level_exponent() > 1) os << " [" << n.ea << "," << n.eb << "]";
        os << "\"";
        if (!n.alive) os << ", style=dashed";
        os << "];\n";
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (const auto& e : nodes_[i].out) {
            os << "  n" << i << " -> n" << e.target << " [label=\""
               << word_str(ifs_->ext(nodes_[i].ea)[e.wa].word) << "," << word_str(ifs_->ext(nodes_[i].eb)[e.wb].word)
               << "\"";
            if (!nodes_[i].alive || !nodes_[e.target].alive) os << ", style=dashed";
            os << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace ftc
