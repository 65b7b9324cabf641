#include "ftc/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ftc {

// ---------------------------------------------------------------- rationals

Q parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (s[0] == '+') s.erase(0, 1);
    auto slash = s.find('/');
    auto check_int = [&](const std::string& t) {
        size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
        if (i >= t.size()) throw std::invalid_argument("bad rational literal: " + raw);
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw std::invalid_argument("bad rational literal: " + raw);
    };
    if (slash == std::string::npos) {
        check_int(s);
        return Q(mpz_class(s, 10));
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    check_int(a);
    check_int(b);
    mpz_class den(b, 10);
    if (den == 0) throw std::invalid_argument("zero denominator in literal: " + raw);
    Q q(mpz_class(a, 10), den);
    q.canonicalize();
    return q;
}

std::string rational_str(const Q& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------- polynomial helpers over Q

namespace {

using Poly = std::vector<Q>;

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly derivative(const Poly& p) {
    Poly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    trim(d);
    return d;
}

// remainder of a divided by b (b nonzero)
Poly poly_rem(Poly a, const Poly& b) {
    trim(a);
    const size_t db = b.size() - 1;
    while (a.size() >= b.size()) {
        Q f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

bool divides(const Poly& a, const Poly& b) {
    Poly r = poly_rem(a, b);
    return r.empty();
}

int sign_at(const Poly& p, const Q& x) {
    Q v = 0;
    for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return sgn(v);
}

int variations(const std::vector<Poly>& chain, const Q& x) {
    int count = 0, last = 0;
    for (const auto& p : chain) {
        int s = sign_at(p, x);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

std::vector<mpz_class> positive_divisors(mpz_class n) {
    if (n < 0) n = -n;
    std::vector<mpz_class> out;
    if (n == 0) return out;
    if (n > mpz_class(1000000000)) throw std::runtime_error("irreducibility test: coefficient too large for divisor search");
    for (mpz_class d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<mpz_class> integer_scaled(const Poly& p) {
    mpz_class l = 1;
    for (const auto& c : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<mpz_class> out;
    for (const auto& c : p) out.push_back(mpz_class(c * l));
    return out;
}

Interval thin_mid(const Interval& x, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_add(r.lo(), x.lo(), x.hi(), MPFR_RNDN);
    mpfr_div_2ui(r.lo(), r.lo(), 1, MPFR_RNDN);
    mpfr_set(r.hi(), r.lo(), MPFR_RNDN);
    return r;
}

CInterval thin_mid(const CInterval& z, mpfr_prec_t prec) { return {thin_mid(z.re, prec), thin_mid(z.im, prec)}; }

CInterval from_ld(std::complex<long double> z, mpfr_prec_t prec) {
    CInterval r(prec);
    mpfr_set_ld(r.re.lo(), z.real(), MPFR_RNDN);
    mpfr_set_ld(r.re.hi(), z.real(), MPFR_RNDN);
    mpfr_set_ld(r.im.lo(), z.imag(), MPFR_RNDN);
    mpfr_set_ld(r.im.hi(), z.imag(), MPFR_RNDN);
    return r;
}

CInterval horner(const Poly& p, const CInterval& z) {
    mpfr_prec_t prec = z.re.prec();
    CInterval acc(prec);
    for (size_t i = p.size(); i-- > 0;) {
        acc = acc * z;
        acc.re = acc.re + Interval(p[i], prec);
    }
    return acc;
}

std::vector<std::complex<long double>> durand_kerner(const Poly& p) {
    const int n = static_cast<int>(p.size()) - 1;
    std::vector<std::complex<long double>> c(p.size());
    for (size_t i = 0; i < p.size(); ++i) c[i] = static_cast<long double>(p[i].get_d());
    long double bound = 1;
    for (int i = 0; i < n; ++i) bound = std::max(bound, 1 + std::abs(c[i]) / std::abs(c[n]));
    std::vector<std::complex<long double>> z(n);
    const std::complex<long double> seed(0.4L, 0.9L);
    std::complex<long double> w = 1;
    for (int k = 0; k < n; ++k) {
        z[k] = w * (bound * 0.5L);
        w *= seed;
    }
    auto eval = [&](std::complex<long double> x) {
        std::complex<long double> a = 0;
        for (int i = n; i >= 0; --i) a = a * x + c[i];
        return a;
    };
    for (int it = 0; it < 2000; ++it) {
        long double delta = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<long double> den = c[n];
            for (int j = 0; j < n; ++j)
                if (j != i) den *= (z[i] - z[j]);
            if (std::abs(den) == 0) den = 1e-30L;
            std::complex<long double> step = eval(z[i]) / den;
            z[i] -= step;
            delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-30L) break;
    }
    return z;
}

}  // namespace

// ---------------------------------------------------------------- MinimalPolynomial

MinimalPolynomial::MinimalPolynomial(std::vector<Q> coeffs, RootBox box) : c_(std::move(coeffs)), box_(std::move(box)) {
    if (c_.size() < 2) throw std::invalid_argument("minimal polynomial must have degree >= 1");
    if (c_.back() != 1) throw std::invalid_argument("minimal polynomial must be monic");
    if (box_.re_lo > box_.re_hi || box_.im_lo > box_.im_hi) throw std::invalid_argument("isolating box has reversed bounds");
}

Q MinimalPolynomial::eval(const Q& x) const {
    Q v = 0;
    for (size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
    return v;
}

CInterval MinimalPolynomial::eval(const CInterval& z) const { return horner(c_, z); }

CInterval MinimalPolynomial::eval_derivative(const CInterval& z) const { return horner(derivative(c_), z); }

int MinimalPolynomial::sturm_count(const Q& a, const Q& b) const {
    std::vector<Poly> chain{c_, derivative(c_)};
    while (chain.back().size() > 1) {
        Poly r = poly_rem(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& x : r) x = -x;
        chain.push_back(r);
    }
    return variations(chain, a) - variations(chain, b);
}

// ---------------------------------------------------------------- irreducibility

IrreducibilityReport check_irreducible(const std::vector<Q>& coeffs) {
    IrreducibilityReport rep;
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg == 1) {
        rep.irreducible = rep.certified = true;
        rep.method = "degree 1";
        return rep;
    }
    auto z = integer_scaled(coeffs);
    if (z[0] == 0) {
        rep.method = "root 0";
        rep.certified = true;
        return rep;
    }
    // rational root test
    for (const auto& pnum : positive_divisors(z[0])) {
        for (const auto& qden : positive_divisors(z[deg])) {
            for (int s : {1, -1}) {
                Q cand(pnum * s, qden);
                cand.canonicalize();
                if (sign_at(coeffs, cand) == 0) {
                    rep.method = "rational root " + rational_str(cand);
                    rep.certified = true;
                    return rep;
                }
            }
        }
    }
    if (deg <= 3) {
        rep.irreducible = rep.certified = true;
        rep.method = "rational root test";
        return rep;
    }
    if (deg == 4) {
        // quadratic factors over Z: u x^2 + v x + w with u | a4, w | a0 (Gauss)
        auto roots = durand_kerner(coeffs);
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                auto s = roots[i] + roots[j];
                auto t = roots[i] * roots[j];
                if (std::abs(s.imag()) > 1e-9L || std::abs(t.imag()) > 1e-9L) continue;
                for (const auto& u : positive_divisors(z[4])) {
                    long double ud = u.get_d();
                    long double v = -s.real() * ud, w = t.real() * ud;
                    long double vr = std::round(v), wr = std::round(w);
                    if (std::abs(v - vr) > 1e-6L || std::abs(w - wr) > 1e-6L) continue;
                    Poly f{Q(static_cast<long>(wr)), Q(static_cast<long>(vr)), Q(u)};
                    if (divides(coeffs, f)) {
                        rep.method = "quadratic factor found";
                        rep.certified = true;
                        return rep;
                    }
                }
            }
        }
        rep.irreducible = rep.certified = true;
        rep.method = "rational root test + quadratic factor search";
        return rep;
    }
    rep.irreducible = true;
    rep.certified = false;
    rep.method = "rational root test only (degree > 4, trusted)";
    return rep;
}

std::vector<CInterval> enclose_all_roots(const std::vector<Q>& coeffs, mpfr_prec_t bits) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    const mpfr_prec_t wp = bits + 64;
    auto approx = durand_kerner(coeffs);
    std::vector<CInterval> z;
    for (auto a : approx) z.push_back(from_ld(a, wp));
    Poly dp = derivative(coeffs);
    // Newton polishing at working precision
    int iters = 8 + static_cast<int>(std::log2(static_cast<double>(bits)));
    for (auto& zi : z) {
        for (int it = 0; it < iters; ++it) {
            CInterval d = horner(dp, zi);
            if (d.contains_zero()) break;
            zi = thin_mid(zi - horner(coeffs, zi) / d, wp);
        }
    }
    std::vector<CInterval> out;
    for (int i = 0; i < n; ++i) {
        CInterval den(Interval(Q(1), wp), Interval(Q(0), wp));
        for (int j = 0; j < n; ++j)
            if (j != i) den = den * (z[i] - z[j]);
        Interval radius(Q(0), wp);
        if (!den.contains_zero()) {
            CInterval w = horner(coeffs, z[i]) / den;
            radius = w.modulus() * Interval(Q(n), wp);
        } else {
            radius = Interval(Q(1000000), wp);
        }
        Interval rr(wp);
        mpfr_set(rr.lo(), radius.hi(), MPFR_RNDU);
        mpfr_set(rr.hi(), radius.hi(), MPFR_RNDU);
        Interval sym = Interval::hull(-rr, rr);
        out.push_back(CInterval(z[i].re + sym, z[i].im + sym));
    }
    return out;
}

namespace {

bool boxes_overlap(const CInterval& a, const CInterval& b) {
    return mpfr_lessequal_p(a.re.lo(), b.re.hi()) && mpfr_lessequal_p(b.re.lo(), a.re.hi()) &&
           mpfr_lessequal_p(a.im.lo(), b.im.hi()) && mpfr_lessequal_p(b.im.lo(), a.im.hi());
}

CInterval box_interval(const RootBox& b, mpfr_prec_t prec) {
    return {Interval(b.re_lo, b.re_hi, prec), Interval(b.im_lo, b.im_hi, prec)};
}

bool box_contains(const CInterval& outer, const CInterval& inner) {
    return mpfr_lessequal_p(outer.re.lo(), inner.re.lo()) && mpfr_lessequal_p(inner.re.hi(), outer.re.hi()) &&
           mpfr_lessequal_p(outer.im.lo(), inner.im.lo()) && mpfr_lessequal_p(inner.im.hi(), outer.im.hi());
}

// index of the unique root disk meeting the box, or -1
int select_root(const std::vector<CInterval>& roots, const RootBox& box, bool& inside, bool& disjoint) {
    CInterval b = box_interval(box, roots.empty() ? 128 : roots[0].re.prec());
    disjoint = true;
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (boxes_overlap(roots[i], roots[j])) disjoint = false;
    int found = -1, count = 0;
    for (size_t i = 0; i < roots.size(); ++i) {
        if (boxes_overlap(roots[i], b)) {
            ++count;
            found = static_cast<int>(i);
        }
    }
    inside = (count == 1) && box_contains(b, roots[found]);
    return count == 1 ? found : -1;
}

}  // namespace

// ---------------------------------------------------------------- Field

FieldPtr Field::create(MinimalPolynomial p) {
    auto* raw = new Field();
    std::shared_ptr<Field> f(raw);
    f->poly_ = std::move(p);
    const auto& c = f->poly_.coeffs();
    const auto& box = f->poly_.box();
    f->irr_ = check_irreducible(c);
    if (!f->irr_.irreducible)
        throw std::invalid_argument("minimal polynomial is reducible (" + f->irr_.method + ")");
    if (!f->irr_.certified) f->warnings_.push_back("irreducibility trusted: " + f->irr_.method);
    f->real_ = box.is_real();
    const int deg = f->poly_.degree();
    if (f->real_) {
        int cnt = f->poly_.sturm_count(box.re_lo, box.re_hi) + (f->poly_.eval(box.re_lo) == 0 ? 1 : 0);
        if (cnt != 1)
            throw std::invalid_argument("isolating interval contains " + std::to_string(cnt) + " real roots, expected 1");
        f->conj_gen_ = std::vector<Q>{0, 1};
        if (deg == 1) f->conj_gen_ = std::vector<Q>{-c[0]};
    } else {
        auto roots = enclose_all_roots(c, 128);
        bool inside = false, disjoint = false;
        int idx = select_root(roots, box, inside, disjoint);
        if (!disjoint) throw std::invalid_argument("root inclusion disks are not separated");
        if (idx < 0 || !inside) throw std::invalid_argument("isolating box does not contain exactly one root");
        if (roots[idx].im.contains_zero()) throw std::invalid_argument("complex isolating box selects a real root");
        if (deg == 2) f->conj_gen_ = std::vector<Q>{-c[1], -1};
    }
    f->cached_bits_ = 256;
    f->cached_root_ = std::make_shared<CInterval>(f->refine_root(256));
    return f;
}

CInterval Field::refine_root(mpfr_prec_t bits) const {
    const auto& c = poly_.coeffs();
    const auto& box = poly_.box();
    const mpfr_prec_t wp = bits + 32;
    if (poly_.degree() == 1) {
        Q r = -c[0];
        return {Interval(r, wp), Interval(Q(0), wp)};
    }
    if (real_) {
        Q lo = box.re_lo, hi = box.re_hi;
        if (poly_.eval(lo) == 0) return {Interval(lo, wp), Interval(Q(0), wp)};
        if (poly_.eval(hi) == 0) return {Interval(hi, wp), Interval(Q(0), wp)};
        int slo = sgn(poly_.eval(lo));
        Q target(1);
        target /= mpz_class(1) << static_cast<unsigned>(bits + 2);
        while (hi - lo > target) {
            Q mid = (lo + hi) / 2;
            int s = sgn(poly_.eval(mid));
            if (s == 0) return {Interval(mid, wp), Interval(Q(0), wp)};
            if (s == slo)
                lo = mid;
            else
                hi = mid;
        }
        return {Interval(lo, hi, wp), Interval(Q(0), wp)};
    }
    // complex: Newton from the box centre, then an interval Newton inclusion test
    const mpfr_prec_t np = bits + 96;
    CInterval z(Interval((box.re_lo + box.re_hi) / 2, np), Interval((box.im_lo + box.im_hi) / 2, np));
    auto roots = enclose_all_roots(c, 128);
    bool inside = false, disjoint = false;
    int idx = select_root(roots, box, inside, disjoint);
    if (idx >= 0) z = thin_mid(roots[idx], np);
    for (int it = 0; it < 200; ++it) {
        CInterval d = poly_.eval_derivative(z);
        CInterval step = poly_.eval(z) / d;
        z = thin_mid(z - step, np);
        if (step.modulus().log2_width() < -static_cast<double>(bits) - 60 &&
            step.modulus().hi_d() < std::ldexp(1.0, -static_cast<int>(bits) - 40))
            break;
    }
    CInterval boxb = box_interval(box, np);
    for (int widen = 2; widen < 64; widen += 4) {
        Interval eps(np);
        mpfr_set_ui_2exp(eps.lo(), 1, -static_cast<long>(bits) - 1 + widen, MPFR_RNDD);
        mpfr_set_ui_2exp(eps.hi(), 1, -static_cast<long>(bits) - 1 + widen, MPFR_RNDU);
        Interval sym = Interval::hull(-eps, eps);
        CInterval B(z.re + sym, z.im + sym);
        CInterval dB = poly_.eval_derivative(B);
        if (dB.contains_zero()) continue;
        CInterval N = z - poly_.eval(z) / dB;
        if (N.strictly_inside(B) && box_contains(boxb, B)) return N;
    }
    throw std::runtime_error("complex root refinement failed to certify");
}

CInterval Field::root_enclosure(mpfr_prec_t bits) const {
    if (bits <= cached_bits_ - 16) return *cached_root_;
    return refine_root(bits);
}

std::vector<Q> Field::reduce(std::vector<Q> p) const {
    const auto& c = poly_.coeffs();
    const size_t D = c.size() - 1;
    for (size_t i = p.size(); i-- > D;) {
        if (p[i] == 0) continue;
        Q t = p[i];
        for (size_t j = 0; j < D; ++j) p[i - D + j] -= t * c[j];
        p[i] = 0;
    }
    p.resize(D);
    return p;
}

// ---------------------------------------------------------------- FieldElement

void require_same_field(const FieldElement& a, const FieldElement& b) {
    if (!a.field() || a.field() != b.field()) throw std::invalid_argument("field elements from different fields");
}

FieldElement::FieldElement(FieldPtr f, std::vector<Q> coeffs) : f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("null field");
    c_ = f_->reduce(std::move(coeffs));
}

FieldElement FieldElement::zero(const FieldPtr& f) { return FieldElement(f, {}); }
FieldElement FieldElement::one(const FieldPtr& f) { return FieldElement(f, {Q(1)}); }
FieldElement FieldElement::rational(const FieldPtr& f, const Q& q) { return FieldElement(f, {q}); }
FieldElement FieldElement::generator(const FieldPtr& f) { return FieldElement(f, {Q(0), Q(1)}); }

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    FieldElement r = a;
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    FieldElement r = a;
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
}

FieldElement FieldElement::operator-() const {
    FieldElement r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    const size_t D = a.c_.size();
    std::vector<Q> p(2 * D - 1);
    for (size_t i = 0; i < D; ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < D; ++j)
            if (b.c_[j] != 0) p[i + j] += a.c_[i] * b.c_[j];
    }
    return FieldElement(a.f_, std::move(p));
}

FieldElement FieldElement::scaled(const Q& q) const {
    FieldElement r = *this;
    for (auto& x : r.c_) x *= q;
    return r;
}

FieldElement FieldElement::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero field element");
    const size_t D = c_.size();
    if (D == 1) return FieldElement(f_, {1 / c_[0]});
    // columns: this * r^j
    std::vector<std::vector<Q>> m(D, std::vector<Q>(D + 1));
    FieldElement col = *this, gen = generator(f_);
    for (size_t j = 0; j < D; ++j) {
        for (size_t i = 0; i < D; ++i) m[i][j] = col.c_[i];
        col = col * gen;
    }
    m[0][D] = 1;
    for (size_t k = 0; k < D; ++k) {
        size_t piv = k;
        while (piv < D && m[piv][k] == 0) ++piv;
        if (piv == D) throw std::domain_error("singular multiplication matrix");
        std::swap(m[k], m[piv]);
        for (size_t i = 0; i < D; ++i) {
            if (i == k || m[i][k] == 0) continue;
            Q f = m[i][k] / m[k][k];
            for (size_t j = k; j <= D; ++j) m[i][j] -= f * m[k][j];
        }
    }
    std::vector<Q> y(D);
    for (size_t i = 0; i < D; ++i) y[i] = m[i][D] / m[i][i];
    return FieldElement(f_, std::move(y));
}

FieldElement FieldElement::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    FieldElement base = *this, acc = one(f_);
    while (k > 0) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

bool FieldElement::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Q& x) { return x == 0; });
}

bool FieldElement::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

bool operator==(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    return a.c_ == b.c_;
}

bool coeff_less(const FieldElement& a, const FieldElement& b) {
    for (size_t i = 0; i < a.c_.size(); ++i) {
        int c = cmp(a.c_[i], b.c_[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

CInterval FieldElement::enclose(mpfr_prec_t bits) const {
    mpfr_prec_t wp = bits + 64;
    for (int attempt = 0; attempt < 6; ++attempt) {
        CInterval root = f_->root_enclosure(wp);
        CInterval acc(wp);
        for (size_t i = c_.size(); i-- > 0;) {
            acc = acc * root;
            acc.re = acc.re + Interval(c_[i], wp);
        }
        if (acc.re.log2_width() < -static_cast<double>(bits) && acc.im.log2_width() < -static_cast<double>(bits))
            return acc;
        wp *= 2;
    }
    throw std::runtime_error("enclosure failed to reach requested precision");
}

std::optional<FieldElement> FieldElement::conj() const {
    const auto& g = f_->conj_generator();
    if (!g) return std::nullopt;
    FieldElement sg(f_, *g), acc = zero(f_);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * sg + rational(f_, c_[i]);
    return acc;
}

std::string FieldElement::str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        Q a = c_[i];
        if (!first) {
            os << (a < 0 ? " - " : " + ");
            a = abs(a);
        } else if (a < 0 && i > 0) {
            os << "-";
            a = abs(a);
        }
        first = false;
        if (i == 0) {
            os << rational_str(a);
        } else {
            if (a != 1) os << rational_str(a) << "*";
            os << "r";
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

std::vector<std::string> FieldElement::to_strings() const {
    std::vector<std::string> out;
    for (const auto& x : c_) out.push_back(rational_str(x));
    return out;
}

size_t FieldElement::hash() const {
    size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& x : c_) {
        size_t a = mpz_get_ui(x.get_num_mpz_t()) * 1000003u + mpz_size(x.get_num_mpz_t()) * 31u +
                   static_cast<size_t>(mpz_sgn(x.get_num_mpz_t()) + 1);
        size_t b = mpz_get_ui(x.get_den_mpz_t());
        h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------- Pisot advisory

std::string pisot_class_name(PisotClass c) {
    switch (c) {
        case PisotClass::Pisot: return "pisot";
        case PisotClass::ComplexPisot: return "complex-pisot";
        default: return "neither";
    }
}

PisotReport check_pisot(const std::vector<Q>& coeffs, const RootBox& box) {
    PisotReport rep;
    const int deg = static_cast<int>(coeffs.size()) - 1;
    rep.irreducible = check_irreducible(coeffs).irreducible;
    if (coeffs[0] == 0) {
        rep.detail = "zero is a root";
        return rep;
    }
    // reversed polynomial made monic: roots are the reciprocals
    rep.algebraic_integer = true;
    for (int i = 0; i <= deg; ++i) {
        Q a = coeffs[deg - i] / coeffs[0];
        if (a.get_den() != 1) rep.algebraic_integer = false;
    }
    auto roots = enclose_all_roots(coeffs, 128);
    bool inside = false, disjoint = false;
    int sel = select_root(roots, box, inside, disjoint);
    const mpfr_prec_t wp = roots.empty() ? 128 : roots[0].re.prec();
    CInterval one(Interval(Q(1), wp), Interval(Q(0), wp));
    for (const auto& r : roots) rep.inverse_roots.push_back(one / r);
    if (sel < 0 || !disjoint) {
        rep.detail = "selected root not isolated";
        return rep;
    }
    const CInterval& beta = rep.inverse_roots[sel];
    Interval unit(Q(1), wp);
    bool beta_real = beta.im.contains_zero() && box.is_real();
    bool others_small = true;
    int conj_idx = -1;
    if (!beta_real) {
        CInterval cb(beta.re, -beta.im);
        for (int i = 0; i < deg; ++i) {
            if (i == sel) continue;
            const auto& o = rep.inverse_roots[i];
            if (boxes_overlap(o, cb)) conj_idx = i;
        }
    }
    for (int i = 0; i < deg; ++i) {
        if (i == sel || i == conj_idx) continue;
        if (!certainly_lt(rep.inverse_roots[i].modulus(), unit)) others_small = false;
    }
    std::ostringstream os;
    os << "1/rho = " << beta.str(12);
    if (beta_real) {
        bool gt1 = certainly_lt(unit, beta.re);
        if (gt1 && others_small && rep.algebraic_integer) rep.cls = PisotClass::Pisot;
        if (!gt1) os << "; not greater than 1";
    } else {
        bool big = certainly_lt(unit, beta.modulus());
        if (big && others_small && rep.algebraic_integer && conj_idx >= 0) rep.cls = PisotClass::ComplexPisot;
    }
    if (!others_small) os << "; a conjugate has modulus >= 1";
    if (!rep.algebraic_integer) os << "; not an algebraic integer";
    if (!rep.irreducible) os << "; polynomial is reducible";
    rep.detail = os.str();
    return rep;
}

}  // namespace ftc
