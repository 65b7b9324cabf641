#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftc/interval.hpp"

namespace ftc {

Q parse_rational(const std::string& s);
std::string rational_str(const Q& q);

// Rational box isolating one root; a real root uses im_lo = im_hi = 0.
struct RootBox {
    Q re_lo, re_hi, im_lo, im_hi;
    bool is_real() const { return im_lo == 0 && im_hi == 0; }
};

class MinimalPolynomial {
public:
    MinimalPolynomial() = default;
    // coefficients c0..cD, low to high; must be monic
    MinimalPolynomial(std::vector<Q> coeffs, RootBox box);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Q>& coeffs() const { return c_; }
    const RootBox& box() const { return box_; }

    Q eval(const Q& x) const;
    CInterval eval(const CInterval& z) const;
    CInterval eval_derivative(const CInterval& z) const;
    // number of distinct real roots in (a, b]
    int sturm_count(const Q& a, const Q& b) const;

private:
    std::vector<Q> c_;
    RootBox box_;
};

struct IrreducibilityReport {
    bool irreducible = false;
    bool certified = false;  // false above degree 4 (trusted with a warning)
    std::string method;
};

IrreducibilityReport check_irreducible(const std::vector<Q>& coeffs);

// Enclosures of all complex roots of a monic rational polynomial via
// Weierstrass inclusion disks; returns the disk centres/radii as boxes.
std::vector<CInterval> enclose_all_roots(const std::vector<Q>& coeffs, mpfr_prec_t bits);

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
public:
    // Validates monicity, irreducibility and that the box isolates exactly one root.
    static FieldPtr create(MinimalPolynomial p);

    int degree() const { return poly_.degree(); }
    const MinimalPolynomial& poly() const { return poly_; }
    bool is_real() const { return real_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    const IrreducibilityReport& irreducibility() const { return irr_; }

    // certified enclosure of the selected root, width below 2^-bits
    CInterval root_enclosure(mpfr_prec_t bits) const;

    // reduce a polynomial (low to high) modulo the minimal polynomial
    std::vector<Q> reduce(std::vector<Q> p) const;

    // image of the generator under complex conjugation, when it lies in the field
    const std::optional<std::vector<Q>>& conj_generator() const { return conj_gen_; }

private:
    Field() = default;
    CInterval refine_root(mpfr_prec_t bits) const;

    MinimalPolynomial poly_;
    bool real_ = true;
    IrreducibilityReport irr_;
    std::vector<std::string> warnings_;
    std::optional<std::vector<Q>> conj_gen_;
    mpfr_prec_t cached_bits_ = 0;
    std::shared_ptr<CInterval> cached_root_;
};

class FieldElement {
public:
    FieldElement() = default;
    FieldElement(FieldPtr f, std::vector<Q> coeffs);  // reduces

    static FieldElement zero(const FieldPtr& f);
    static FieldElement one(const FieldPtr& f);
    static FieldElement rational(const FieldPtr& f, const Q& q);
    static FieldElement generator(const FieldPtr& f);

    const FieldPtr& field() const { return f_; }
    const std::vector<Q>& coeffs() const { return c_; }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    FieldElement operator-() const;
    FieldElement& operator+=(const FieldElement& b) { return *this = *this + b; }
    FieldElement& operator-=(const FieldElement& b) { return *this = *this - b; }
    FieldElement& operator*=(const FieldElement& b) { return *this = *this * b; }
    FieldElement scaled(const Q& q) const;

    FieldElement inverse() const;
    FieldElement pow(long k) const;  // negative k allowed for nonzero elements

    bool is_zero() const;
    bool is_rational() const;
    friend bool operator==(const FieldElement& a, const FieldElement& b);
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }
    // strict total order on coefficient vectors (not the real order)
    friend bool coeff_less(const FieldElement& a, const FieldElement& b);

    CInterval enclose(mpfr_prec_t bits = 128) const;
    std::optional<FieldElement> conj() const;

    std::string str() const;                  // human readable, e.g. "1/2 - r"
    std::vector<std::string> to_strings() const;  // coefficient strings "num/den"
    size_t hash() const;

private:
    FieldPtr f_;
    std::vector<Q> c_;
};

void require_same_field(const FieldElement& a, const FieldElement& b);

enum class PisotClass { Pisot, ComplexPisot, Neither };
std::string pisot_class_name(PisotClass c);

struct PisotReport {
    PisotClass cls = PisotClass::Neither;
    bool algebraic_integer = false;
    bool irreducible = false;
    std::vector<CInterval> inverse_roots;  // enclosures of conjugates of 1/rho
    std::string detail;
};

// Classifies 1/rho for the root selected by the box. Advisory only.
PisotReport check_pisot(const std::vector<Q>& coeffs, const RootBox& box);

}  // namespace ftc
