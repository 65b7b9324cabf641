#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ftc/similitude.hpp"

// Brute-force references. Nothing here uses the neighbour graph or the automaton.
namespace ftc::oracle {

enum class Tri { No, Yes, Unknown };
std::string tri_str(Tri t);

// Ball containing the attractor: c = fixed point of S_1, R = max |S_i c - c| / (1 - max ratio)
struct Ball {
    Point center;
    Interval radius;
};
Ball attractor_ball(const IFS& ifs);

// Weighted support points S_I(x0), I over the stopping set with threshold t = level * K;
// coincident points are merged exactly.
class DiscreteMeasure {
public:
    static DiscreteMeasure build(const IFS& ifs, int level, size_t max_points = 3000000);
    // every threshold 0..t, returned as a list indexed by threshold
    static std::vector<DiscreteMeasure> build_thresholds(const IFS& ifs, long t, size_t max_points = 3000000);

    const std::vector<Point>& points() const { return points_; }
    const std::vector<Q>& weights() const { return weights_; }
    Q total() const;

private:
    std::vector<Point> points_;
    std::vector<Q> weights_;
};

struct MassBounds {
    Q lower, upper;  // yes-weight and yes+unknown weight
};
MassBounds estimate_mass(const DiscreteMeasure& m, const std::function<Tri(const Point&)>& pred);

struct McEstimate {
    double value = 0, stderr_ = 0;
    size_t samples = 0, unknown = 0;
    uint64_t seed = 0;
};

// i.i.d. points S_{i_1...i_depth}(x0) in double precision
McEstimate estimate_mass_mc(const IFS& ifs, const std::function<Tri(const double*)>& pred, size_t samples, int depth,
                            uint64_t seed);

// Monte-Carlo frequencies of containment signatures: for a sampled point, the set of
// level-n cylinders (root coordinates) whose images contain it, n = 1..max_level.
class AtomSampler {
public:
    AtomSampler(const IFS& ifs, int max_level, int depth = 0);  // depth 0: chosen from the ratio
    void run(size_t samples, uint64_t seed);
    // frequency of the signature equal to the given set of level-n cylinder maps
    McEstimate atom_mass(int level, const std::vector<Similitude>& cylinders) const;
    int depth() const { return depth_; }
    size_t signatures(int level) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    int max_level_, depth_;
    size_t samples_ = 0;
    uint64_t seed_ = 0;
};

struct DyadicSum {
    int n = 0;        // dyadic level
    int level = 0;    // stopping level of the discrete measure used
    double q = 0;
    double log2_sum = 0;  // log2 of sum over cells of mu(D)^q
    size_t cells = 0;
};

// sums for every q and n in [n_min, n_max]
std::vector<DyadicSum> dyadic_lq_sums(const IFS& ifs, const std::vector<double>& qs, int n_min, int n_max,
                                      size_t max_points = 3000000);
double dyadic_lq_sum(const IFS& ifs, double q, int n);  // log2 of the sum

struct TauFit {
    double tau = 0;
    double residual = 0;  // rms of the least-squares fit
    std::vector<DyadicSum> sums;
};
TauFit tau_dyadic(const IFS& ifs, double q, int n_min, int n_max);
std::vector<TauFit> tau_dyadic(const IFS& ifs, const std::vector<double>& qs, int n_min, int n_max);

// f, g cylinders of a common stopping level; certified subdivision to the given depth
Tri subdivision_intersects(const IFS& ifs, const Similitude& f, const Similitude& g, int level, int depth);

// sum of p_W over sequences W of `steps` stopping extensions from `tag` with base o S_W == target
Q word_sum_entry(const IFS& ifs, const Similitude& base, int tag, const Similitude& target, int steps,
                 size_t max_words = 20000000);

// level-n stopping words with their cylinder maps (for sampling test pairs)
struct Cylinder {
    Word word;
    Similitude map;
    int tag = 0;
};
std::vector<Cylinder> cylinders(const IFS& ifs, int level);

}  // namespace ftc::oracle
