#include "ftc/similitude.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ftc {

namespace {
constexpr int kPowTable = 64;
}

std::shared_ptr<const Space> Space::create(FieldPtr field, int dim, bool complex, FieldElement base) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (complex && dim != 1) throw std::invalid_argument("complex backend requires dimension 1");
    if (base.field() != field) throw std::invalid_argument("base ratio is not in the configured field");
    if (base.is_zero()) throw std::invalid_argument("base ratio must be nonzero");
    auto* raw = new Space();
    std::shared_ptr<Space> s(raw);
    s->field_ = std::move(field);
    s->dim_ = dim;
    s->complex_ = complex;
    s->base_ = base;
    CInterval e = base.enclose(128);
    if (!complex) {
        if (!e.im.contains_zero() || !s->field_->is_real())
            throw std::invalid_argument("real backend needs a real field embedding");
        if (!e.re.is_positive()) throw std::invalid_argument("base ratio must be positive in the real backend");
    }
    s->base_abs_ = e.modulus();
    if (!certainly_lt(s->base_abs_, Interval(Q(1), 128)))
        throw std::invalid_argument("base ratio must have modulus < 1");
    FieldElement inv = base.inverse();
    FieldElement p = FieldElement::one(s->field_), n = p;
    for (int i = 0; i <= kPowTable; ++i) {
        s->pos_pow_.push_back(p);
        s->neg_pow_.push_back(n);
        p = p * base;
        n = n * inv;
    }
    return s;
}

FieldElement Space::rpow(long k) const {
    if (k >= 0 && k <= kPowTable) return pos_pow_[k];
    if (k < 0 && -k <= kPowTable) return neg_pow_[-k];
    return base_.pow(k);
}

Interval Space::abs_pow(long k) const {
    CInterval e = rpow(k).enclose(96);
    if (!complex_) return e.re;
    return e.modulus();
}

Interval Space::norm2(const Point& x) const {
    Interval acc(Q(0), 96);
    for (const auto& xi : x) acc = acc + xi.enclose(96).norm2();
    return acc;
}

// ---------------------------------------------------------------- Similitude

Similitude::Similitude(SpacePtr sp, long k, std::vector<FieldElement> orth, Point b)
    : sp_(std::move(sp)), k_(k), o_(std::move(orth)), b_(std::move(b)) {
    const size_t d = sp_->dim();
    const size_t osz = sp_->complex() ? 1 : d * d;
    if (o_.size() != osz) throw std::invalid_argument("orthogonal part has wrong size");
    if (b_.size() != d) throw std::invalid_argument("translation has wrong dimension");
}

Similitude Similitude::identity(const SpacePtr& sp) {
    const int d = sp->dim();
    const auto& f = sp->field();
    std::vector<FieldElement> o;
    if (sp->complex()) {
        o.push_back(FieldElement::one(f));
    } else {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) o.push_back(i == j ? FieldElement::one(f) : FieldElement::zero(f));
    }
    return Similitude(sp, 0, std::move(o), Point(d, FieldElement::zero(f)));
}

Point Similitude::apply_linear(const Point& x) const {
    const int d = sp_->dim();
    FieldElement s = sp_->rpow(k_);
    if (sp_->complex()) return {s * o_[0] * x[0]};
    Point y(d, FieldElement::zero(sp_->field()));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j)
            if (!o_[i * d + j].is_zero()) y[i] += o_[i * d + j] * x[j];
        y[i] = y[i] * s;
    }
    return y;
}

Point Similitude::apply(const Point& x) const {
    Point y = apply_linear(x);
    for (size_t i = 0; i < y.size(); ++i) y[i] += b_[i];
    return y;
}

Similitude Similitude::compose(const Similitude& g) const {
    const int d = sp_->dim();
    std::vector<FieldElement> o;
    if (sp_->complex()) {
        o.push_back(o_[0] * g.o_[0]);
    } else {
        o.assign(d * d, FieldElement::zero(sp_->field()));
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) {
                if (o_[i * d + l].is_zero()) continue;
                for (int j = 0; j < d; ++j) o[i * d + j] += o_[i * d + l] * g.o_[l * d + j];
            }
    }
    Point b = apply(g.b_);
    return Similitude(sp_, k_ + g.k_, std::move(o), std::move(b));
}

Similitude Similitude::inverse() const {
    const int d = sp_->dim();
    std::vector<FieldElement> o;
    if (sp_->complex()) {
        o.push_back(o_[0].inverse());
    } else {
        o.resize(d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) o[i * d + j] = o_[j * d + i];
    }
    Similitude inv(sp_, -k_, std::move(o), Point(d, FieldElement::zero(sp_->field())));
    Point b = inv.apply_linear(b_);
    for (auto& x : b) x = -x;
    inv.b_ = std::move(b);
    return inv;
}

bool Similitude::is_identity() const { return *this == identity(sp_); }

bool Similitude::orthogonal_ok() const {
    const int d = sp_->dim();
    const auto& f = sp_->field();
    if (sp_->complex()) {
        auto c = o_[0].conj();
        if (c) return o_[0] * *c == FieldElement::one(f);
        Interval n = o_[0].enclose(128).norm2();
        return n.contains(Q(1));
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            FieldElement s = FieldElement::zero(f);
            for (int l = 0; l < d; ++l) s += o_[l * d + i] * o_[l * d + j];
            if (s != (i == j ? FieldElement::one(f) : FieldElement::zero(f))) return false;
        }
    return true;
}

Point Similitude::fixed_point() const {
    const int d = sp_->dim();
    const auto& f = sp_->field();
    FieldElement s = sp_->rpow(k_);
    if (sp_->complex()) return {b_[0] * (FieldElement::one(f) - s * o_[0]).inverse()};
    std::vector<FieldElement> a(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            a[i * d + j] = (i == j ? FieldElement::one(f) : FieldElement::zero(f)) - s * o_[i * d + j];
    return solve_linear(std::move(a), b_, d);
}

bool operator==(const Similitude& a, const Similitude& b) {
    return a.k_ == b.k_ && a.o_ == b.o_ && a.b_ == b.b_;
}

size_t Similitude::hash() const {
    size_t h = std::hash<long>()(k_) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&](size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& x : o_) mix(x.hash());
    for (const auto& x : b_) mix(x.hash());
    return h;
}

std::string Similitude::str() const {
    std::ostringstream os;
    os << "r^" << k_;
    const int d = sp_->dim();
    if (sp_->complex()) {
        if (o_[0] != FieldElement::one(sp_->field())) os << "*(" << o_[0].str() << ")";
        os << "*z + (" << b_[0].str() << ")";
        return os.str();
    }
    if (!(d == 1 && o_[0] == FieldElement::one(sp_->field()))) {
        os << "*[";
        for (int i = 0; i < d * d; ++i) os << (i ? (i % d ? ", " : "; ") : "") << o_[i].str();
        os << "]";
    }
    os << "*x + (";
    for (int i = 0; i < d; ++i) os << (i ? ", " : "") << b_[i].str();
    os << ")";
    return os.str();
}

std::string word_str(const Word& w) {
    if (w.empty()) return "e";
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(w[i] + 1);
    }
    return s;
}

// ---------------------------------------------------------------- IFS

IFS::IFS(SpacePtr sp, std::vector<Similitude> maps, std::vector<Q> probs)
    : sp_(std::move(sp)), maps_(std::move(maps)), probs_(std::move(probs)) {
    if (maps_.empty()) throw std::invalid_argument("IFS needs at least one map");
    if (probs_.size() != maps_.size()) throw std::invalid_argument("probability vector length differs from map count");
    Q total = 0;
    for (const auto& p : probs_) {
        if (p <= 0) throw std::invalid_argument("probabilities must be positive");
        total += p;
    }
    if (total != 1) throw std::invalid_argument("probabilities must sum to 1 exactly, got " + rational_str(total));
    K_ = 0;
    for (size_t i = 0; i < maps_.size(); ++i) {
        const auto& m = maps_[i];
        if (m.space() != sp_) throw std::invalid_argument("map built over a different space");
        if (m.exponent() < 1) throw std::invalid_argument("generator scale exponents must be >= 1");
        if (!m.orthogonal_ok()) throw std::invalid_argument("map " + std::to_string(i + 1) + " is not a similitude");
        for (size_t j = 0; j < i; ++j)
            if (maps_[j] == m) throw std::invalid_argument("maps must be distinct");
        K_ = std::max(K_, m.exponent());
    }
    equi_ = true;
    for (const auto& m : maps_) equi_ = equi_ && m.exponent() == K_;
    ext_.resize(K_);
    for (int e = 0; e < K_; ++e) {
        std::function<void(Word&, long)> rec = [&](Word& w, long acc) {
            for (int i = 0; i < size(); ++i) {
                w.push_back(i);
                long a = acc + exponent(i);
                if (a >= K_)
                    ext_[e].push_back({w, static_cast<int>(a - K_), word_prob(w), word_map(w)});
                else
                    rec(w, a);
                w.pop_back();
            }
        };
        Word w;
        rec(w, e);
    }
}

Similitude IFS::word_map(const Word& w) const {
    Similitude s = Similitude::identity(sp_);
    for (int i : w) s = s.compose(maps_.at(i));
    return s;
}

Q IFS::word_prob(const Word& w) const {
    Q p = 1;
    for (int i : w) p *= probs_.at(i);
    return p;
}

long IFS::word_exponent(const Word& w) const {
    long k = 0;
    for (int i : w) k += exponent(i);
    return k;
}

std::vector<Word> IFS::stopping_words_exponent(long t) const {
    std::vector<Word> out;
    if (t <= 0) {
        out.push_back({});
        return out;
    }
    std::function<void(Word&, long)> rec = [&](Word& w, long acc) {
        for (int i = 0; i < size(); ++i) {
            w.push_back(i);
            long a = acc + exponent(i);
            if (a >= t)
                out.push_back(w);
            else
                rec(w, a);
            w.pop_back();
        }
    };
    Word w;
    rec(w, 0);
    return out;
}

std::vector<FieldElement> solve_linear(std::vector<FieldElement> a, std::vector<FieldElement> y, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        while (piv < n && a[piv * n + k].is_zero()) ++piv;
        if (piv == n) throw std::domain_error("singular linear system over the field");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(y[k], y[piv]);
        }
        FieldElement inv = a[k * n + k].inverse();
        for (int i = 0; i < n; ++i) {
            if (i == k || a[i * n + k].is_zero()) continue;
            FieldElement f = a[i * n + k] * inv;
            for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            y[i] -= f * y[k];
        }
    }
    std::vector<FieldElement> x(n);
    for (int i = 0; i < n; ++i) x[i] = y[i] * a[i * n + i].inverse();
    return x;
}

}  // namespace ftc
