#include "ftc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "ftc/scc.hpp"

namespace ftc {

namespace {

double log_add(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// log of a sum of exponentials, Kahan-compensated
double log_sum(const std::vector<double>& xs) {
    double mx = -INFINITY;
    for (double x : xs) mx = std::max(mx, x);
    if (mx == -INFINITY) return mx;
    double s = 0, c = 0;
    for (double x : xs) {
        double y = std::exp(x - mx) - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return mx + std::log(s);
}

struct VecHash {
    size_t operator()(const std::vector<long long>& v) const {
        size_t h = 1469598103934665603ull;
        for (long long x : v) h = (h ^ static_cast<size_t>(x)) * 1099511628211ull;
        return h;
    }
};

constexpr double kDirScale = 1e13;

struct PowerResult {
    double value = 0, lower = 0, upper = 0;
    int iterations = 0;
    bool converged = false;
};

// Perron root of a nonnegative operator given as y = x B (row-vector action).
PowerResult perron_root(size_t dim, const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                        double tol, int max_iter) {
    std::vector<double> x(dim, 1.0 / static_cast<double>(dim)), y(dim);
    auto normalize = [](std::vector<double>& v) {
        double s = 0;
        for (double t : v) s += t;
        for (double& t : v) t /= s;
        return s;
    };
    // rough radius for the shift; keeps the iteration aperiodic
    double guess = 0;
    for (int k = 0; k < 60; ++k) {
        apply(x, y);
        guess = normalize(y);
        std::swap(x, y);
    }
    const double c = guess;
    PowerResult res;
    for (int it = 1; it <= max_iter; ++it) {
        apply(x, y);
        for (size_t i = 0; i < dim; ++i) y[i] += c * x[i];
        double lo = INFINITY, hi = 0;
        for (size_t i = 0; i < dim; ++i) {
            if (x[i] <= 1e-280) continue;
            double rt = y[i] / x[i];
            lo = std::min(lo, rt);
            hi = std::max(hi, rt);
        }
        double lam = normalize(y);
        double resid = 0;
        for (size_t i = 0; i < dim; ++i) resid += std::abs(y[i] - x[i]);
        std::swap(x, y);
        res.iterations = it;
        if ((hi - lo) <= tol * lam || resid <= tol) {
            res.value = lam - c;
            res.lower = std::max(lo, lam * (1 - resid)) - c;
            res.upper = std::min(hi, lam * (1 + resid)) - c;
            res.lower = std::min(res.lower, res.value);
            res.upper = std::max(res.upper, res.value);
            res.converged = true;
            return res;
        }
        res.value = lam - c;
        res.lower = lo - c;
        res.upper = hi - c;
    }
    return res;
}

}  // namespace

bool EssentialClass::scalar() const {
    return std::all_of(dims.begin(), dims.end(), [](int d) { return d == 1; });
}

std::string method_name(PressureMethod m) {
    switch (m) {
        case PressureMethod::FiniteN: return "finite-n";
        case PressureMethod::IntegerSpectral: return "integer-spectral";
        case PressureMethod::ScalarSpectral: return "scalar-spectral";
    }
    return "?";
}

EssentialClass essential_class(const Measure& m) {
    const Automaton& a = m.automaton();
    const auto pos = m.positive_states();
    if (pos.empty()) throw InvariantViolation("no state carries positive mass");
    std::map<int, int> local;
    for (size_t i = 0; i < pos.size(); ++i) local[pos[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(pos.size());
    for (size_t i = 0; i < pos.size(); ++i)
        for (int c : a.children(pos[i]))
            if (local.count(c)) adj[i].push_back(local[c]);
    auto comps = strongly_connected(adj);
    std::vector<int> comp_of(pos.size());
    for (size_t k = 0; k < comps.size(); ++k)
        for (int v : comps[k]) comp_of[v] = static_cast<int>(k);
    EssentialClass cls;
    cls.terminal_components = 0;
    int best = -1;
    for (size_t k = 0; k < comps.size(); ++k) {
        bool terminal = true;
        for (int v : comps[k])
            for (int w : adj[v])
                if (comp_of[w] != static_cast<int>(k)) terminal = false;
        if (!terminal) continue;
        ++cls.terminal_components;
        if (best < 0 || pos[comps[k][0]] < pos[comps[best][0]]) best = static_cast<int>(k);
    }
    for (int v : comps[best]) cls.states.push_back(pos[v]);
    std::sort(cls.states.begin(), cls.states.end());
    std::map<int, int> idx;
    for (size_t i = 0; i < cls.states.size(); ++i) idx[cls.states[i]] = static_cast<int>(i);
    cls.offset.push_back(0);
    for (int s : cls.states) {
        cls.dims.push_back(static_cast<int>(m.star(s).size()));
        cls.offset.push_back(cls.offset.back() + cls.dims.back());
    }
    cls.succ.resize(cls.states.size());
    for (size_t i = 0; i < cls.states.size(); ++i)
        for (int c : a.children(cls.states[i])) {
            if (!m.positive(c)) continue;
            auto it = idx.find(c);
            if (it == idx.end()) throw InvariantViolation("essential class is not closed at state " + std::to_string(c));
            cls.succ[i].push_back(it->second);
        }
    // communication, checked both ways from the first state
    auto reach = [&](bool forward) {
        std::vector<std::vector<int>> g(cls.states.size());
        for (size_t i = 0; i < cls.succ.size(); ++i)
            for (int j : cls.succ[i]) (forward ? g[i] : g[j]).push_back(forward ? j : static_cast<int>(i));
        std::vector<char> seen(g.size(), 0);
        std::deque<int> q{0};
        seen[0] = 1;
        size_t cnt = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : g[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++cnt;
                    q.push_back(w);
                }
        }
        return cnt == g.size();
    };
    if (!reach(true) || !reach(false)) throw InvariantViolation("essential class does not communicate");
    const int L = cls.dimension();
    cls.H.assign(L, QVec(L, Q(0)));
    for (size_t i = 0; i < cls.states.size(); ++i)
        for (int j : cls.succ[i]) {
            QMat t = m.transition_matrix(cls.states[i], cls.states[j]);
            for (size_t r = 0; r < t.size(); ++r)
                for (size_t c = 0; c < t[r].size(); ++c) cls.H[cls.offset[i] + r][cls.offset[j] + c] = t[r][c];
        }
    return cls;
}

IrreducibilityResult irreducibility_check(const QMat& H) {
    const size_t L = H.size();
    IrreducibilityResult res;
    std::vector<std::vector<double>> h(L, std::vector<double>(L)), s;
    std::vector<std::vector<char>> bh(L, std::vector<char>(L)), bs;
    for (size_t i = 0; i < L; ++i)
        for (size_t j = 0; j < L; ++j) {
            h[i][j] = H[i][j].get_d();
            bh[i][j] = H[i][j] > 0;
        }
    s = h;
    bs = bh;
    for (size_t r = 1; r <= L; ++r) {
        bool all = true;
        for (size_t i = 0; i < L && all; ++i)
            for (size_t j = 0; j < L; ++j)
                if (!bs[i][j]) {
                    all = false;
                    break;
                }
        if (all) {
            res.ok = true;
            res.r = static_cast<int>(r);
            double mn = INFINITY;
            for (const auto& row : s)
                for (double x : row)
                    if (x > 0) mn = std::min(mn, x);
            res.delta = mn * (1 - 1e-9);  // slack for floating accumulation
            return res;
        }
        if (r == L) break;
        // S <- H + H S
        std::vector<std::vector<double>> ns(L, std::vector<double>(L, 0));
        std::vector<std::vector<char>> nb(L, std::vector<char>(L, 0));
        for (size_t i = 0; i < L; ++i)
            for (size_t k = 0; k < L; ++k) {
                if (!bh[i][k]) continue;
                for (size_t j = 0; j < L; ++j)
                    if (bs[k][j]) {
                        ns[i][j] += h[i][k] * s[k][j];
                        nb[i][j] = 1;
                    }
            }
        for (size_t i = 0; i < L; ++i)
            for (size_t j = 0; j < L; ++j) {
                ns[i][j] += h[i][j];
                nb[i][j] = nb[i][j] || bh[i][j];
            }
        s = std::move(ns);
        bs = std::move(nb);
    }
    for (size_t i = 0; i < L; ++i)
        for (size_t j = 0; j < L; ++j)
            if (!bs[i][j]) res.zero_pattern.push_back({static_cast<int>(i), static_cast<int>(j)});
    return res;
}

Spectrum::Spectrum(std::shared_ptr<const Measure> m, SpectrumOptions opt) : m_(std::move(m)), opt_(opt) {
    cls_ = essential_class(*m_);
    irr_ = irreducibility_check(cls_.H);
    if (!irr_.ok)
        throw IrreducibilityFailure("irreducibility check failed with " + std::to_string(irr_.zero_pattern.size()) +
                                    " zero entries");
    const auto& ifs = m_->automaton().ifs();
    log_rho_ = static_cast<double>(ifs.level_exponent()) * std::log(ifs.space()->base_abs().mid_d());
    const size_t t = cls_.states.size();
    T_.resize(t);
    vstar_.resize(t);
    start_.assign(t, {});
    for (size_t a = 0; a < t; ++a) start_[a].assign(cls_.dims[a], 0.0);
    for (size_t a = 0; a < t; ++a) {
        const int s = cls_.states[a];
        for (int i : m_->star(s)) vstar_[a].push_back(m_->v(s)[i].get_d());
        for (int b : cls_.succ[a]) {
            QMat q = m_->transition_matrix(s, cls_.states[b]);
            std::vector<std::vector<double>> d(q.size());
            for (size_t r = 0; r < q.size(); ++r)
                for (const auto& x : q[r]) d[r].push_back(x.get_d());
            for (size_t r = 0; r < d.size(); ++r)
                for (size_t c = 0; c < d[r].size(); ++c) start_[b][c] += d[r][c];
            T_[a].push_back(std::move(d));
        }
    }
}

double Spectrum::bridging_constant(double q) const {
    return q * std::abs(std::log(irr_.delta)) + std::log(static_cast<double>(cls_.states.size()));
}

std::vector<PressureEstimate> Spectrum::finite_n_batch(const std::vector<double>& qs, int n, int* used_n) const {
    const size_t nq = qs.size();
    const size_t t = cls_.states.size();
    struct Entry {
        std::vector<double> dir;
        std::vector<double> lw;  // per q: log sum of scale^q over merged paths
    };
    using Layer = std::vector<std::unordered_map<std::vector<long long>, Entry, VecHash>>;
    auto key_of = [](const std::vector<double>& d) {
        std::vector<long long> k(d.size());
        for (size_t i = 0; i < d.size(); ++i) k[i] = std::llround(d[i] * kDirScale);
        return k;
    };
    auto insert = [&](Layer& layer, int st, std::vector<double> dir, const std::vector<double>& lw) {
        auto k = key_of(dir);
        auto it = layer[st].find(k);
        if (it == layer[st].end()) {
            layer[st].emplace(std::move(k), Entry{std::move(dir), lw});
        } else {
            for (size_t j = 0; j < nq; ++j) it->second.lw[j] = log_add(it->second.lw[j], lw[j]);
        }
    };
    Layer cur(t);
    for (size_t a = 0; a < t; ++a) {
        double s = std::accumulate(start_[a].begin(), start_[a].end(), 0.0);
        std::vector<double> dir = start_[a];
        for (double& x : dir) x /= s;
        std::vector<double> lw(nq);
        for (size_t j = 0; j < nq; ++j) lw[j] = qs[j] * std::log(s);
        insert(cur, static_cast<int>(a), std::move(dir), lw);
    }
    // a_k and c_k (v-weighted) for the current layer
    auto measure_layer = [&](const Layer& layer, std::vector<double>& a, std::vector<double>& c) {
        std::vector<std::vector<double>> ta(nq), tc(nq);
        for (size_t st = 0; st < t; ++st)
            for (const auto& [k, e] : layer[st]) {
                double dv = 0;
                for (size_t i = 0; i < e.dir.size(); ++i) dv += e.dir[i] * vstar_[st][i];
                const double ldv = std::log(dv);
                for (size_t j = 0; j < nq; ++j) {
                    ta[j].push_back(e.lw[j]);
                    tc[j].push_back(e.lw[j] + qs[j] * ldv);
                }
            }
        a.resize(nq);
        c.resize(nq);
        for (size_t j = 0; j < nq; ++j) {
            a[j] = log_sum(ta[j]);
            c[j] = log_sum(tc[j]);
        }
    };
    std::vector<double> a_cur, c_cur;
    std::vector<std::vector<double>> c_hist;  // c_k for the last few lengths
    measure_layer(cur, a_cur, c_cur);
    c_hist.push_back(c_cur);
    int len = 1;
    while (len < n) {
        Layer next(t);
        size_t count = 0;
        for (size_t st = 0; st < t; ++st)
            for (const auto& [k, e] : cur[st])
                for (size_t bi = 0; bi < cls_.succ[st].size(); ++bi) {
                    const int b = cls_.succ[st][bi];
                    const auto& T = T_[st][bi];
                    std::vector<double> y(cls_.dims[b], 0.0);
                    for (size_t r = 0; r < T.size(); ++r)
                        for (size_t cc = 0; cc < y.size(); ++cc) y[cc] += e.dir[r] * T[r][cc];
                    double s = std::accumulate(y.begin(), y.end(), 0.0);
                    if (!(s > 0)) continue;
                    for (double& x : y) x /= s;
                    const double ls = std::log(s);
                    std::vector<double> lw(nq);
                    for (size_t j = 0; j < nq; ++j) lw[j] = e.lw[j] + qs[j] * ls;
                    insert(next, b, std::move(y), lw);
                }
        for (const auto& mp : next) count += mp.size();
        if (count > opt_.max_directions) break;
        cur = std::move(next);
        ++len;
        measure_layer(cur, a_cur, c_cur);
        c_hist.push_back(c_cur);
        if (c_hist.size() > 4) c_hist.erase(c_hist.begin());
    }
    if (used_n) *used_n = len;
    std::vector<PressureEstimate> out(nq);
    for (size_t j = 0; j < nq; ++j) {
        auto& p = out[j];
        p.q = qs[j];
        p.n = len;
        p.method = PressureMethod::FiniteN;
        p.upper = a_cur[j] / len;
        p.lower = (a_cur[j] - bridging_constant(qs[j])) / len;
        const size_t h = c_hist.size();
        if (h < 2) {
            p.value = p.upper;
            continue;
        }
        const double d2 = c_hist[h - 1][j] - c_hist[h - 2][j];
        p.value = d2;
        if (h == 4) {
            // the differences converge geometrically; Aitken delta-squared, kept only when tame
            const double d1 = c_hist[h - 2][j] - c_hist[h - 3][j];
            const double d0 = c_hist[h - 3][j] - c_hist[h - 4][j];
            const double den = (d2 - d1) - (d1 - d0);
            if (den != 0 && std::isfinite(den)) {
                const double corr = (d2 - d1) * (d2 - d1) / den;
                if (std::fabs(corr) <= std::fabs(d2 - d1)) p.value = d2 - corr;
            }
        }
    }
    return out;
}

PressureEstimate Spectrum::pressure_finite_n(double q, int n) const {
    return pressure_finite_n(std::vector<double>{q}, n)[0];
}

std::vector<PressureEstimate> Spectrum::pressure_finite_n(const std::vector<double>& qs, int n) const {
    for (double q : qs)
        if (!(q > 0)) throw std::invalid_argument("pressure needs q > 0");
    if (n < 1) throw std::invalid_argument("pressure needs n >= 1");
    const int threads = std::max(1, opt_.threads);
    if (threads == 1 || qs.size() < 2) return finite_n_batch(qs, n, nullptr);
    // split q values into contiguous chunks; results are independent of the split
    std::vector<std::vector<PressureEstimate>> parts(threads);
    std::vector<std::thread> pool;
    const size_t chunk = (qs.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        size_t b = t * chunk, e = std::min(qs.size(), b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, t, b, e] {
            parts[t] = finite_n_batch(std::vector<double>(qs.begin() + b, qs.begin() + e), n, nullptr);
        });
    }
    for (auto& th : pool) th.join();
    std::vector<PressureEstimate> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

PressureEstimate Spectrum::pressure_scalar(double q) const {
    if (!(q > 0)) throw std::invalid_argument("pressure needs q > 0");
    if (!cls_.scalar()) throw std::logic_error("scalar route needs a class with v* = 1 throughout");
    const size_t t = cls_.states.size();
    std::vector<std::vector<std::pair<int, double>>> w(t);
    for (size_t a = 0; a < t; ++a)
        for (size_t bi = 0; bi < cls_.succ[a].size(); ++bi)
            w[a].push_back({cls_.succ[a][bi], std::pow(T_[a][bi][0][0], q)});
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::fill(y.begin(), y.end(), 0.0);
        for (size_t a = 0; a < t; ++a)
            for (auto [b, v] : w[a]) y[b] += x[a] * v;
    };
    auto r = perron_root(t, apply, opt_.power_tol, opt_.power_max_iter);
    if (!r.converged) throw InvariantViolation("scalar power iteration did not converge");
    PressureEstimate p;
    p.q = q;
    p.method = PressureMethod::ScalarSpectral;
    p.value = std::log(r.value);
    p.lower = std::log(r.lower);
    p.upper = std::log(r.upper);
    p.n = r.iterations;
    return p;
}

PressureEstimate Spectrum::pressure_integer_q(int q) const {
    if (q < 1) throw std::invalid_argument("integer route needs q >= 1");
    const size_t t = cls_.states.size();
    std::vector<size_t> off{0};
    for (size_t a = 0; a < t; ++a) {
        double sz = std::pow(static_cast<double>(cls_.dims[a]), q);
        if (sz > static_cast<double>(opt_.kronecker_budget)) return pressure_finite_n(q, opt_.pressure_n);
        off.push_back(off.back() + static_cast<size_t>(sz));
    }
    if (off.back() > opt_.kronecker_budget) return pressure_finite_n(q, opt_.pressure_n);
    // y_b += x_a (T(a,b) ⊗ ... ⊗ T(a,b)), applied one tensor mode at a time
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::fill(y.begin(), y.end(), 0.0);
        std::vector<double> cur, nxt;
        for (size_t a = 0; a < t; ++a) {
            const size_t da = cls_.dims[a];
            for (size_t bi = 0; bi < cls_.succ[a].size(); ++bi) {
                const int b = cls_.succ[a][bi];
                const size_t db = cls_.dims[b];
                const auto& T = T_[a][bi];
                cur.assign(x.begin() + off[a], x.begin() + off[a + 1]);
                // shape (db^m, da, da^(q-m-1)) -> (db^m, db, da^(q-m-1))
                size_t left = 1, right = static_cast<size_t>(std::pow(da, q - 1));
                for (int mode = 0; mode < q; ++mode) {
                    nxt.assign(left * db * right, 0.0);
                    for (size_t l = 0; l < left; ++l)
                        for (size_t i = 0; i < da; ++i)
                            for (size_t rr = 0; rr < right; ++rr) {
                                const double xv = cur[(l * da + i) * right + rr];
                                if (xv == 0) continue;
                                for (size_t j = 0; j < db; ++j) nxt[(l * db + j) * right + rr] += xv * T[i][j];
                            }
                    cur.swap(nxt);
                    left *= db;
                    right = right / (da ? da : 1);
                }
                for (size_t k = 0; k < cur.size(); ++k) y[off[b] + k] += cur[k];
            }
        }
    };
    auto r = perron_root(off.back(), apply, opt_.power_tol, opt_.power_max_iter);
    if (!r.converged) throw InvariantViolation("Kronecker power iteration did not converge");
    PressureEstimate p;
    p.q = q;
    p.method = PressureMethod::IntegerSpectral;
    p.value = std::log(r.value);
    p.lower = std::log(r.lower);
    p.upper = std::log(r.upper);
    p.n = r.iterations;
    return p;
}

TauPoint Spectrum::to_tau(const PressureEstimate& p) const {
    TauPoint t;
    t.q = p.q;
    t.n = p.n;
    t.method = p.method;
    t.tau = p.value / log_rho_;
    t.lower = p.upper / log_rho_;
    t.upper = p.lower / log_rho_;
    return t;
}

TauPoint Spectrum::tau(double q) const { return lq_curve({q}).points.at(0); }

SpectrumCurve Spectrum::lq_curve(const std::vector<double>& grid) const {
    for (double q : grid)
        if (!(q > 0)) throw std::invalid_argument("tau is defined here for q > 0 only");
    SpectrumCurve curve;
    std::vector<PressureEstimate> est(grid.size());
    std::vector<double> rest;
    std::vector<size_t> rest_idx;
    for (size_t i = 0; i < grid.size(); ++i) {
        const double q = grid[i];
        if (cls_.scalar()) {
            est[i] = pressure_scalar(q);
        } else if (opt_.integer_q_exact && q == std::floor(q)) {
            est[i] = pressure_integer_q(static_cast<int>(q));
        } else {
            rest.push_back(q);
            rest_idx.push_back(i);
        }
    }
    if (!rest.empty()) {
        auto r = pressure_finite_n(rest, opt_.pressure_n);
        for (size_t k = 0; k < r.size(); ++k) est[rest_idx[k]] = r[k];
    }
    for (const auto& p : est) {
        curve.points.push_back(to_tau(p));
        curve.max_width = std::max(curve.max_width, curve.points.back().upper - curve.points.back().lower);
    }
    const auto& P = curve.points;
    curve.max_second_difference = -INFINITY;
    std::vector<double> sd;
    for (size_t i = 1; i + 1 < P.size(); ++i) {
        curve.max_second_difference = std::max(curve.max_second_difference, P[i - 1].tau - 2 * P[i].tau + P[i + 1].tau);
        sd.push_back((P[i + 1].tau - P[i - 1].tau) / (P[i + 1].q - P[i - 1].q));
    }
    if (P.size() < 3) curve.max_second_difference = 0;
    for (size_t i = 1; i < sd.size(); ++i) curve.smoothness_jump = std::max(curve.smoothness_jump, std::abs(sd[i] - sd[i - 1]));
    return curve;
}

std::vector<double> parse_grid(const std::string& spec) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || b < a)
        throw std::invalid_argument("grid must look like a:b:step with step > 0 and a <= b");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        double q = std::round((a + k * step) * 1e12) / 1e12;
        if (q > b + 1e-12) break;
        out.push_back(q);
    }
    return out;
}

}  // namespace ftc
