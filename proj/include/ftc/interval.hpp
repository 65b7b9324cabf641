#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace ftc {

using Q = mpq_class;

// Closed real interval with MPFR endpoints and outward rounding.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 128);
    Interval(const Q& q, mpfr_prec_t prec);
    Interval(const Q& lo, const Q& hi, mpfr_prec_t prec);
    Interval(const Interval& o);
    Interval(Interval&& o) noexcept;
    Interval& operator=(const Interval& o);
    Interval& operator=(Interval&& o) noexcept;
    ~Interval();

    mpfr_prec_t prec() const { return prec_; }

    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);
    Interval operator-() const;

    Interval sqr() const;
    Interval sqrt() const;  // lower endpoint clamped at 0
    Interval abs() const;
    Interval log() const;   // requires positive interval

    static Interval hull(const Interval& a, const Interval& b);

    bool contains_zero() const;
    bool contains(const Q& q) const;
    bool is_positive() const;  // lo > 0
    bool is_negative() const;  // hi < 0

    double lo_d() const;  // rounded down
    double hi_d() const;  // rounded up
    double mid_d() const;
    // width as an upper bound, log2 scale; returns -inf for point intervals
    double log2_width() const;
    Q lo_q() const;
    Q hi_q() const;

    // certain comparisons
    friend bool certainly_lt(const Interval& a, const Interval& b);
    friend bool certainly_le(const Interval& a, const Interval& b);
    friend bool possibly_le(const Interval& a, const Interval& b);

    std::string str(int digits = 20) const;

    const __mpfr_struct* lo() const { return lo_; }
    const __mpfr_struct* hi() const { return hi_; }
    __mpfr_struct* lo() { return lo_; }
    __mpfr_struct* hi() { return hi_; }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_;
    mpfr_t hi_;
};

// Rectangular complex interval.
struct CInterval {
    Interval re;
    Interval im;

    explicit CInterval(mpfr_prec_t prec = 128) : re(prec), im(prec) {}
    CInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}

    friend CInterval operator+(const CInterval& a, const CInterval& b) { return {a.re + b.re, a.im + b.im}; }
    friend CInterval operator-(const CInterval& a, const CInterval& b) { return {a.re - b.re, a.im - b.im}; }
    friend CInterval operator*(const CInterval& a, const CInterval& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend CInterval operator/(const CInterval& a, const CInterval& b);
    CInterval operator-() const { return {-re, -im}; }

    Interval norm2() const { return re.sqr() + im.sqr(); }
    Interval modulus() const { return norm2().sqrt(); }
    bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
    // this strictly inside o (interior)
    bool strictly_inside(const CInterval& o) const;
    std::string str(int digits = 20) const;
};

}  // namespace ftc
