#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftc/neighbors.hpp"
#include "ftc/region.hpp"

namespace ftc {

// Characteristic vector of an atom, normalised by its first containing cylinder f1.
// U lists neighbour nodes f1^{-1} g for the cylinders g meeting the atom's core,
// in the ⪯ order; V marks which of them contain the atom (V[0] is the identity);
// r is the first containing cylinder expressed in the parent's coordinates.
struct CharVector {
    std::vector<int> U;
    std::vector<int> V;  // positions into U
    int r = 0;           // index into Automaton::r_maps()

    int tag(const NeighborGraph& g) const { return g.node(U[V[0]]).ea; }
    bool operator<(const CharVector& o) const {
        if (U != o.U) return U < o.U;
        if (V != o.V) return V < o.V;
        return r < o.r;
    }
    bool operator==(const CharVector& o) const { return U == o.U && V == o.V && r == o.r; }
};

// A child cylinder c = psi_a o S_W of the parent's U entries (parent coordinates).
struct ChildCylinder {
    Similitude map;
    int tag = 0;
    std::vector<std::pair<int, int>> sources;  // all (U position a, ext index w) producing it, ⪯ first
};

struct AutomatonEdge {
    int from = -1, to = -1;
    std::vector<int> lambda;  // indices into the parent's child-cylinder list, ⪯ order (= child V)
    std::vector<int> nbhd;    // indices into the parent's child-cylinder list (= child U)
};

class AutomatonBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AutomatonOptions {
    size_t max_states = 20000;
    bool exact_atoms = true;  // false keeps every tuple-consistent signature (superset)
};

class Automaton {
public:
    Automaton(std::shared_ptr<const NeighborGraph> g, AutomatonOptions opt = {});

    const NeighborGraph& graph() const { return *g_; }
    const std::shared_ptr<const NeighborGraph>& graph_ptr() const { return g_; }
    const RegionChain& regions() const { return *chain_; }
    const IFS& ifs() const { return g_->ifs(); }

    int root() const { return 0; }
    size_t num_states() const { return states_.size(); }
    const CharVector& state(int id) const { return states_[id]; }
    const std::vector<AutomatonEdge>& edges() const { return edges_; }
    const std::vector<int>& out_edges(int s) const { return out_[s]; }
    const std::vector<Similitude>& r_maps() const { return r_maps_; }
    const Similitude& r_map(int s) const { return r_maps_[states_[s].r]; }
    // the normalised V entries phi_i and U entries psi_j of a state
    Similitude phi(int s, int i) const { return g_->node(states_[s].U[states_[s].V[i]]).h; }
    int phi_tag(int s, int i) const { return g_->node(states_[s].U[states_[s].V[i]]).eb; }

    // child cylinder list of a state in ⪯ order
    const std::vector<ChildCylinder>& child_cylinders(int s) const { return child_cyl_[s]; }
    std::vector<int> children(int s) const;  // child state ids in edge order
    const AutomatonEdge* edge(int from, int to) const;

    // address: state ids a_0 = root, a_1, ..., a_n
    std::optional<int> resolve(const std::vector<int>& address) const;
    // all admissible addresses of depth n (n edges)
    std::vector<std::vector<int>> addresses(int depth) const;

    // point in the atom, in the state's normalised coordinates
    std::optional<Point> witness(int s) const;
    RegionQuery region_of(int s) const;

    std::string to_dot() const;
    std::string to_json() const;
    size_t anomalies() const { return anomalies_; }

private:
    int intern_r(const Similitude& m);
    std::vector<std::pair<CharVector, AutomatonEdge>> expand(int s);
    std::vector<ChildCylinder> make_child_cylinders(int s) const;

    std::shared_ptr<const NeighborGraph> g_;
    std::unique_ptr<RegionChain> chain_;
    AutomatonOptions opt_;
    std::vector<CharVector> states_;
    std::map<CharVector, int> index_;
    std::vector<AutomatonEdge> edges_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<ChildCylinder>> child_cyl_;
    std::vector<Similitude> r_maps_;
    std::unordered_map<Similitude, int, SimilitudeHash> r_index_;
    std::map<std::pair<int, int>, int> edge_index_;
    size_t anomalies_ = 0;
};

}  // namespace ftc
