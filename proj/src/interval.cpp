#include "ftc/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ftc {

namespace {

void set_q(mpfr_t x, const Q& q, mpfr_rnd_t rnd) { mpfr_set_q(x, q.get_mpq_t(), rnd); }

mpfr_prec_t pmax(const Interval& a, const Interval& b) { return std::max(a.prec(), b.prec()); }

void min4(mpfr_t out, mpfr_srcptr a, mpfr_srcptr b, mpfr_srcptr c, mpfr_srcptr d) {
    mpfr_set(out, a, MPFR_RNDD);
    if (mpfr_less_p(b, out)) mpfr_set(out, b, MPFR_RNDD);
    if (mpfr_less_p(c, out)) mpfr_set(out, c, MPFR_RNDD);
    if (mpfr_less_p(d, out)) mpfr_set(out, d, MPFR_RNDD);
}

void max4(mpfr_t out, mpfr_srcptr a, mpfr_srcptr b, mpfr_srcptr c, mpfr_srcptr d) {
    mpfr_set(out, a, MPFR_RNDU);
    if (mpfr_greater_p(b, out)) mpfr_set(out, b, MPFR_RNDU);
    if (mpfr_greater_p(c, out)) mpfr_set(out, c, MPFR_RNDU);
    if (mpfr_greater_p(d, out)) mpfr_set(out, d, MPFR_RNDU);
}

}  // namespace

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Q& q, mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    set_q(lo_, q, MPFR_RNDD);
    set_q(hi_, q, MPFR_RNDU);
}

Interval::Interval(const Q& lo, const Q& hi, mpfr_prec_t prec) : prec_(prec) {
    if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    set_q(lo_, lo, MPFR_RNDD);
    set_q(hi_, hi, MPFR_RNDU);
}

Interval::Interval(const Interval& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
    if (this == &o) return *this;
    if (prec_ != o.prec_) {
        prec_ = o.prec_;
        mpfr_set_prec(lo_, prec_);
        mpfr_set_prec(hi_, prec_);
    }
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
    return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
    std::swap(prec_, o.prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r(pmax(a, b));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r(pmax(a, b));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator-() const {
    Interval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    mpfr_prec_t p = pmax(a, b);
    Interval r(p);
    mpfr_t t[4];
    for (auto& x : t) mpfr_init2(x, p);
    mpfr_mul(t[0], a.lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(t[1], a.lo_, b.hi_, MPFR_RNDD);
    mpfr_mul(t[2], a.hi_, b.lo_, MPFR_RNDD);
    mpfr_mul(t[3], a.hi_, b.hi_, MPFR_RNDD);
    min4(r.lo_, t[0], t[1], t[2], t[3]);
    mpfr_mul(t[0], a.lo_, b.lo_, MPFR_RNDU);
    mpfr_mul(t[1], a.lo_, b.hi_, MPFR_RNDU);
    mpfr_mul(t[2], a.hi_, b.lo_, MPFR_RNDU);
    mpfr_mul(t[3], a.hi_, b.hi_, MPFR_RNDU);
    max4(r.hi_, t[0], t[1], t[2], t[3]);
    for (auto& x : t) mpfr_clear(x);
    return r;
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw std::domain_error("Interval: division by interval containing zero");
    mpfr_prec_t p = pmax(a, b);
    Interval r(p);
    mpfr_t t[4];
    for (auto& x : t) mpfr_init2(x, p);
    mpfr_div(t[0], a.lo_, b.lo_, MPFR_RNDD);
    mpfr_div(t[1], a.lo_, b.hi_, MPFR_RNDD);
    mpfr_div(t[2], a.hi_, b.lo_, MPFR_RNDD);
    mpfr_div(t[3], a.hi_, b.hi_, MPFR_RNDD);
    min4(r.lo_, t[0], t[1], t[2], t[3]);
    mpfr_div(t[0], a.lo_, b.lo_, MPFR_RNDU);
    mpfr_div(t[1], a.lo_, b.hi_, MPFR_RNDU);
    mpfr_div(t[2], a.hi_, b.lo_, MPFR_RNDU);
    mpfr_div(t[3], a.hi_, b.hi_, MPFR_RNDU);
    max4(r.hi_, t[0], t[1], t[2], t[3]);
    for (auto& x : t) mpfr_clear(x);
    return r;
}

Interval Interval::sqr() const {
    Interval r(prec_);
    if (mpfr_sgn(lo_) >= 0) {
        mpfr_sqr(r.lo_, lo_, MPFR_RNDD);
        mpfr_sqr(r.hi_, hi_, MPFR_RNDU);
    } else if (mpfr_sgn(hi_) <= 0) {
        mpfr_sqr(r.lo_, hi_, MPFR_RNDD);
        mpfr_sqr(r.hi_, lo_, MPFR_RNDU);
    } else {
        mpfr_set_zero(r.lo_, 1);
        mpfr_t a, b;
        mpfr_init2(a, prec_);
        mpfr_init2(b, prec_);
        mpfr_sqr(a, lo_, MPFR_RNDU);
        mpfr_sqr(b, hi_, MPFR_RNDU);
        mpfr_max(r.hi_, a, b, MPFR_RNDU);
        mpfr_clear(a);
        mpfr_clear(b);
    }
    return r;
}

Interval Interval::sqrt() const {
    if (mpfr_sgn(hi_) < 0) throw std::domain_error("Interval: sqrt of negative interval");
    Interval r(prec_);
    if (mpfr_sgn(lo_) <= 0)
        mpfr_set_zero(r.lo_, 1);
    else
        mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::abs() const {
    if (mpfr_sgn(lo_) >= 0) return *this;
    if (mpfr_sgn(hi_) <= 0) return -*this;
    Interval r(prec_);
    mpfr_set_zero(r.lo_, 1);
    mpfr_t a;
    mpfr_init2(a, prec_);
    mpfr_neg(a, lo_, MPFR_RNDU);
    mpfr_max(r.hi_, a, hi_, MPFR_RNDU);
    mpfr_clear(a);
    return r;
}

Interval Interval::log() const {
    if (!is_positive()) throw std::domain_error("Interval: log of non-positive interval");
    Interval r(prec_);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(pmax(a, b));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::contains(const Q& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool Interval::is_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::is_negative() const { return mpfr_sgn(hi_) < 0; }

double Interval::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Interval::mid_d() const { return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)); }

double Interval::log2_width() const {
    mpfr_t w;
    mpfr_init2(w, prec_);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double r;
    if (mpfr_zero_p(w)) {
        r = -std::numeric_limits<double>::infinity();
    } else {
        long e;
        double m = mpfr_get_d_2exp(&e, w, MPFR_RNDU);
        r = std::log2(m) + static_cast<double>(e);
    }
    mpfr_clear(w);
    return r;
}

Q Interval::lo_q() const {
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, lo_);
    Q r(q);
    mpq_clear(q);
    return r;
}

Q Interval::hi_q() const {
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, hi_);
    Q r(q);
    mpq_clear(q);
    return r;
}

bool certainly_lt(const Interval& a, const Interval& b) { return mpfr_less_p(a.hi_, b.lo_); }
bool certainly_le(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.hi_, b.lo_); }
bool possibly_le(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.lo_, b.hi_); }

std::string Interval::str(int digits) const {
    char* s1 = nullptr;
    char* s2 = nullptr;
    mpfr_asprintf(&s1, "%.*RDe", digits, lo_);
    mpfr_asprintf(&s2, "%.*RUe", digits, hi_);
    std::string r = std::string("[") + s1 + ", " + s2 + "]";
    mpfr_free_str(s1);
    mpfr_free_str(s2);
    return r;
}

CInterval operator/(const CInterval& a, const CInterval& b) {
    Interval d = b.norm2();
    if (!d.is_positive()) throw std::domain_error("CInterval: division by interval containing zero");
    CInterval num = a * CInterval(b.re, -b.im);
    return {num.re / d, num.im / d};
}

bool CInterval::strictly_inside(const CInterval& o) const {
    return mpfr_greater_p(re.lo(), o.re.lo()) && mpfr_less_p(re.hi(), o.re.hi()) && mpfr_greater_p(im.lo(), o.im.lo()) &&
           mpfr_less_p(im.hi(), o.im.hi());
}

std::string CInterval::str(int digits) const { return re.str(digits) + " + i" + im.str(digits); }

}  // namespace ftc
