#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "ftc/neighbors.hpp"

namespace ftc {

// Region ⋂ h(K) \ ⋃ g(K) over a base cylinder, all maps given as relative
// neighbour nodes sharing the base tag. A μ-random point of the base cylinder
// is refined one stopping extension at a time; each h or g is tracked by the set
// of neighbour nodes still compatible with the point's address so far.
struct RegionQuery {
    int base_tag = 0;
    std::vector<int> inside;   // node ids (first tag == base_tag)
    std::vector<int> outside;  // node ids; -1 entries are ignored
};

struct RegionWitness {
    std::vector<int> prefix;  // ext indices
    std::vector<int> cycle;   // ext indices, nonempty
    std::vector<int> prefix_tags, cycle_tags;
};

class RegionChain {
public:
    explicit RegionChain(const NeighborGraph& g);

    // exact μ-probability that a random point of the base cylinder lies in the region,
    // in the base cylinder's own coordinates (i.e. μ(base^{-1} region))
    Q probability(const RegionQuery& q) const;
    // exact decision of nonemptiness; witness address when nonempty
    bool nonempty(const RegionQuery& q, RegionWitness* w = nullptr) const;
    // point of the region (in base coordinates) built from a witness
    Point witness_point(const RegionWitness& w) const;

    size_t explored_states() const;

private:
    using Key = std::vector<int>;  // encoded state
    struct StateInfo {
        bool fail = false;
        bool has_negative = false;
        int tag = 0;
        std::vector<std::pair<Q, int>> succ;  // probability, state index
        std::vector<int> succ_ext;            // ext index for each successor
    };

    Key normalize(int tag, std::vector<std::vector<int>> pos, std::vector<std::vector<int>> neg) const;
    int intern(const Key& k) const;
    void expand(int s) const;
    Key start_key(const RegionQuery& q) const;

    const NeighborGraph& g_;
    mutable std::mutex mu_;
    mutable std::map<Key, int> ids_;
    mutable std::vector<Key> keys_;
    mutable std::vector<StateInfo> info_;
    mutable std::vector<char> expanded_;
    mutable std::vector<std::optional<Q>> value_;
};

}  // namespace ftc
