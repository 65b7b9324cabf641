#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ftc/numberfield.hpp"

namespace ftc {

using Point = std::vector<FieldElement>;

// Ambient geometry shared by all maps of one system: field, dimension, backend
// and base ratio r. In the complex backend d = 1 and r may be non-real.
class Space {
public:
    static std::shared_ptr<const Space> create(FieldPtr field, int dim, bool complex, FieldElement base);

    const FieldPtr& field() const { return field_; }
    int dim() const { return dim_; }
    bool complex() const { return complex_; }
    const FieldElement& base() const { return base_; }
    const Interval& base_abs() const { return base_abs_; }  // |r| enclosure
    FieldElement rpow(long k) const;
    Interval abs_pow(long k) const;  // |r|^k enclosure
    // |x|^2 enclosure of a point
    Interval norm2(const Point& x) const;

private:
    Space() = default;
    FieldPtr field_;
    int dim_ = 1;
    bool complex_ = false;
    FieldElement base_;
    Interval base_abs_;
    std::vector<FieldElement> pos_pow_, neg_pow_;
};
using SpacePtr = std::shared_ptr<const Space>;

// x -> r^k O x + b. For the complex backend O is a single unit scalar.
class Similitude {
public:
    Similitude() = default;
    Similitude(SpacePtr sp, long k, std::vector<FieldElement> orth, Point b);

    static Similitude identity(const SpacePtr& sp);

    const SpacePtr& space() const { return sp_; }
    long exponent() const { return k_; }
    const std::vector<FieldElement>& orth() const { return o_; }
    const Point& translation() const { return b_; }

    Similitude compose(const Similitude& g) const;  // this o g
    Similitude inverse() const;
    Point apply(const Point& x) const;
    Point apply_linear(const Point& x) const;
    Interval ratio() const { return sp_->abs_pow(k_); }
    bool is_identity() const;

    // exact orthogonality of O (complex: u * conj(u) == 1, or enclosure when conj is unavailable)
    bool orthogonal_ok() const;
    // fixed point; requires a proper contraction (k >= 1)
    Point fixed_point() const;

    friend bool operator==(const Similitude& a, const Similitude& b);
    friend bool operator!=(const Similitude& a, const Similitude& b) { return !(a == b); }
    size_t hash() const;
    std::string str() const;

private:
    SpacePtr sp_;
    long k_ = 0;
    std::vector<FieldElement> o_;
    Point b_;
};

struct SimilitudeHash {
    size_t operator()(const Similitude& s) const { return s.hash(); }
};

using Word = std::vector<int>;  // 0-based letters

std::string word_str(const Word& w);  // 1-based digits, "e" for the empty word

struct Extension {
    Word word;
    int new_tag = 0;
    Q prob;
    Similitude map;
};

class IFS {
public:
    IFS(SpacePtr sp, std::vector<Similitude> maps, std::vector<Q> probs);

    const SpacePtr& space() const { return sp_; }
    int size() const { return static_cast<int>(maps_.size()); }
    const Similitude& map(int i) const { return maps_[i]; }
    const std::vector<Similitude>& maps() const { return maps_; }
    const Q& prob(int i) const { return probs_[i]; }
    const std::vector<Q>& probs() const { return probs_; }
    long exponent(int i) const { return maps_[i].exponent(); }
    // K = max exponent; one level of the stopping hierarchy scales by r^K
    long level_exponent() const { return K_; }
    bool equicontractive() const { return equi_; }

    Similitude word_map(const Word& w) const;
    Q word_prob(const Word& w) const;
    long word_exponent(const Word& w) const;

    // minimal words W with e + k_W >= K, lexicographic; new tag e + k_W - K
    const std::vector<Extension>& ext(int tag) const { return ext_.at(tag); }

    // words with exponent sum >= t whose proper prefixes stay below t
    std::vector<Word> stopping_words_exponent(long t) const;
    // level-n stopping set: threshold n*K
    std::vector<Word> stopping_words(int n) const { return stopping_words_exponent(n * K_); }

    // level and tag of a cylinder with exponent k
    int level_of(long k) const { return static_cast<int>(k / K_); }
    int tag_of(long k) const { return static_cast<int>(k % K_); }

private:
    SpacePtr sp_;
    std::vector<Similitude> maps_;
    std::vector<Q> probs_;
    long K_ = 1;
    bool equi_ = true;
    std::vector<std::vector<Extension>> ext_;
};

// Solve A x = y over the field (A row-major n x n). Throws if singular.
std::vector<FieldElement> solve_linear(std::vector<FieldElement> a, std::vector<FieldElement> y, int n);

}  // namespace ftc
