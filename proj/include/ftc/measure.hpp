#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftc/automaton.hpp"
#include "ftc/linalg.hpp"

namespace ftc {

class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sparse block matrix: only the column block of one alphabet letter is nonzero.
struct GlobalMatrix {
    int letter = 0;                          // alphabet index i
    std::vector<std::pair<int, QMat>> rows;  // (alphabet index k, block T(eta_k, eta_i))
};

struct GlobalMatrices {
    std::vector<int> alphabet;  // state ids; alphabet[0] is the root
    std::vector<int> offset;    // block offsets; size = alphabet.size() + 1
    std::map<int, int> letter_of;  // state id -> alphabet index
    std::vector<GlobalMatrix> M;
    std::vector<QVec> w;  // each of dimension N
    int dimension() const { return offset.back(); }
};

class Measure {
public:
    explicit Measure(std::shared_ptr<const Automaton> a);

    const Automaton& automaton() const { return *a_; }
    const std::shared_ptr<const Automaton>& automaton_ptr() const { return a_; }

    // v(alpha) over all V positions, and the positions with positive mass
    const QVec& v(int s) const { return v_[s]; }
    const std::vector<int>& star(int s) const { return star_[s]; }
    bool positive(int s) const { return !star_[s].empty(); }
    std::vector<int> positive_states() const;

    // full |V(from)| x |V(to)| matrix of an admissible edge
    const QMat& full_transition(int from, int to) const;
    // restricted to the positive positions
    QMat transition_matrix(int from, int to) const;

    Q mass(const std::vector<int>& address) const;
    QVec u(const std::vector<int>& address) const;  // restricted u vector

    const GlobalMatrices& global() const { return global_; }
    Q mass_global(const std::vector<int>& address) const;

    // product of full transition matrices along an admissible path a_1..a_n
    QMat product_entries(const std::vector<int>& path) const;

    // maps of the V entries of the atoms along an address (root coordinates)
    std::vector<std::vector<Similitude>> actual_lambda(const std::vector<int>& address) const;

    std::string to_json() const;

private:
    void compute_vectors();
    void compute_transitions();
    void verify_consistency() const;
    void build_global();

    std::shared_ptr<const Automaton> a_;
    std::vector<QVec> v_;
    std::vector<std::vector<int>> star_;
    std::map<std::pair<int, int>, QMat> T_;
    GlobalMatrices global_;
};

}  // namespace ftc
