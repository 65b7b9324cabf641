#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ftc/similitude.hpp"

namespace ftc {

struct BoundingBall {
    Point center;
    Interval radius;  // upper enclosure of R
};

// c = mean of generator fixed points, R = max |S_i(c) - c| / (1 - max ratio)
BoundingBall bounding_ball(const IFS& ifs);

struct NeighborEdge {
    int wa = 0;  // index into ext(ea)
    int wb = 0;  // index into ext(eb)
    int target = -1;
};

struct NeighborNode {
    Similitude h;
    int ea = 0, eb = 0;
    bool alive = true;
    bool is_identity = false;
    std::vector<NeighborEdge> out;
};

enum class ClosureStatus { Finite, ExceededBound };

struct NeighborKey {
    Similitude h;
    int ea, eb;
    bool operator==(const NeighborKey& o) const { return ea == o.ea && eb == o.eb && h == o.h; }
};
struct NeighborKeyHash {
    size_t operator()(const NeighborKey& k) const { return k.h.hash() ^ (size_t(k.ea) * 131 + size_t(k.eb) * 7919); }
};

class TupleBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nodes are relative maps h = S_I^{-1} S_J of two same-level cylinders with
// tags (ea, eb); edges refine both sides by one stopping extension.
class NeighborGraph {
public:
    NeighborGraph(std::shared_ptr<const IFS> ifs, size_t max_nodes);

    const IFS& ifs() const { return *ifs_; }
    const std::shared_ptr<const IFS>& ifs_ptr() const { return ifs_; }
    ClosureStatus status() const { return status_; }
    size_t frontier() const { return frontier_; }
    const BoundingBall& ball() const { return ball_; }

    size_t size() const { return nodes_.size(); }
    const NeighborNode& node(int id) const { return nodes_[id]; }
    int find(const Similitude& h, int ea, int eb) const;
    int identity_node(int tag) const;
    // number of surviving nodes (the set of true neighbours, identities included)
    size_t gamma_size() const;
    std::vector<int> gamma() const;

    // alive successors of a node along first-side extension wa
    const std::vector<int>& succ_first(int id, int wa) const { return succ_first_[id][wa]; }

    // f, g cylinder maps of a common stopping level
    bool intersects(const Similitude& f, const Similitude& g) const;
    // maps of a common stopping level; decides whether their images share a point
    bool tuple_intersects(const std::vector<Similitude>& maps) const;
    // same question for relative nodes over a base cylinder with the given tag
    bool tuple_intersects_nodes(int base_tag, std::vector<int> nodes) const;

    std::string to_dot() const;

private:
    bool ball_test(const Similitude& h) const;
    void prune();
    bool tuple_alive(const std::vector<int>& key, std::map<std::vector<int>, int>& status, size_t& budget) const;
    std::vector<int> canonical_tuple(int tag, std::vector<int> nodes) const;

    std::shared_ptr<const IFS> ifs_;
    BoundingBall ball_;
    ClosureStatus status_ = ClosureStatus::Finite;
    size_t frontier_ = 0;
    std::vector<NeighborNode> nodes_;
    std::unordered_map<NeighborKey, int, NeighborKeyHash> index_;
    std::vector<std::vector<std::vector<int>>> succ_first_;

    mutable std::mutex memo_mu_;
    mutable std::map<std::vector<int>, bool> tuple_memo_;
};

}  // namespace ftc
