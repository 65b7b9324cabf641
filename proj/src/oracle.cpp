#include "ftc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace ftc::oracle {

namespace {

struct PointHash {
    size_t operator()(const Point& p) const {
        size_t h = 0x9e3779b97f4a7c15ull;
        for (const auto& x : p) h = (h ^ x.hash()) * 0x100000001b3ull;
        return h;
    }
};

Point sub(const Point& a, const Point& b) {
    Point out;
    for (size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return out;
}

// Similitude in double precision on R^m, m <= 3 (complex backend as m = 2)
struct DMap {
    int m = 1;
    double A[9] = {0};
    double b[3] = {0};
    double s = 1;  // similarity ratio

    static DMap identity(int m) {
        DMap d;
        d.m = m;
        for (int i = 0; i < m; ++i) d.A[i * m + i] = 1;
        return d;
    }
    DMap compose(const DMap& g) const {
        DMap r;
        r.m = m;
        r.s = s * g.s;
        for (int i = 0; i < m; ++i) {
            double acc = b[i];
            for (int k = 0; k < m; ++k) acc += A[i * m + k] * g.b[k];
            r.b[i] = acc;
            for (int j = 0; j < m; ++j) {
                double a = 0;
                for (int k = 0; k < m; ++k) a += A[i * m + k] * g.A[k * m + j];
                r.A[i * m + j] = a;
            }
        }
        return r;
    }
    DMap inverse() const {
        DMap r;
        r.m = m;
        r.s = 1 / s;
        const double s2 = s * s;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) r.A[i * m + j] = A[j * m + i] / s2;
        for (int i = 0; i < m; ++i) {
            double acc = 0;
            for (int k = 0; k < m; ++k) acc += r.A[i * m + k] * b[k];
            r.b[i] = -acc;
        }
        return r;
    }
    void apply(const double* x, double* y) const {
        for (int i = 0; i < m; ++i) {
            double acc = b[i];
            for (int k = 0; k < m; ++k) acc += A[i * m + k] * x[k];
            y[i] = acc;
        }
    }
    std::vector<long long> key(double scale) const {
        std::vector<long long> k;
        for (int i = 0; i < m * m; ++i) k.push_back(std::llround(A[i] * scale));
        for (int i = 0; i < m; ++i) k.push_back(std::llround(b[i] * scale));
        return k;
    }
};

int real_dim(const Space& sp) { return sp.complex() ? 2 : sp.dim(); }

DMap to_dmap(const Similitude& f) {
    const auto& sp = *f.space();
    const int m = real_dim(sp);
    if (m > 3) throw std::invalid_argument("sampling oracle supports real dimension <= 3");
    DMap d;
    d.m = m;
    d.s = f.ratio().mid_d();
    const FieldElement rk = sp.rpow(f.exponent());
    if (sp.complex()) {
        CInterval c = (rk * f.orth()[0]).enclose(96);
        const double re = c.re.mid_d(), im = c.im.mid_d();
        d.A[0] = re;
        d.A[1] = -im;
        d.A[2] = im;
        d.A[3] = re;
        CInterval t = f.translation()[0].enclose(96);
        d.b[0] = t.re.mid_d();
        d.b[1] = t.im.mid_d();
    } else {
        for (int i = 0; i < m * m; ++i) d.A[i] = (rk * f.orth()[i]).enclose(96).re.mid_d();
        for (int i = 0; i < m; ++i) d.b[i] = f.translation()[i].enclose(96).re.mid_d();
    }
    return d;
}

std::vector<double> to_doubles(const Space& sp, const Point& p) {
    std::vector<double> out;
    for (const auto& x : p) {
        CInterval c = x.enclose(96);
        out.push_back(c.re.mid_d());
        if (sp.complex()) out.push_back(c.im.mid_d());
    }
    return out;
}

constexpr double kKeyScale = 1e9;

struct IntVecHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = 0xcbf29ce484222325ull;
        for (int x : v) h = (h ^ static_cast<size_t>(x)) * 0x100000001b3ull;
        return h;
    }
};

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int pick(const std::vector<double>& cum, double u) {
    for (size_t i = 0; i + 1 < cum.size(); ++i)
        if (u < cum[i]) return static_cast<int>(i);
    return static_cast<int>(cum.size()) - 1;
}

// Smallest stopping level whose level ratio is at most 2^-n.
int matched_level(const IFS& ifs, int n) {
    const double rho = std::pow(ifs.space()->base_abs().mid_d(), static_cast<double>(ifs.level_exponent()));
    return static_cast<int>(std::ceil(n * std::log(2.0) / std::log(1 / rho) - 1e-12));
}

// mu^(t) = delta_x0 for t <= 0, else sum_i p_i (S_i)_* mu^(t - k_i); calls visit(t, layer)
void layers(const IFS& ifs, long t_max, size_t max_points,
            const std::function<void(long, const std::unordered_map<Point, Q, PointHash>&)>& visit) {
    using Layer = std::unordered_map<Point, Q, PointHash>;
    long kmax = 1;
    for (int i = 0; i < ifs.size(); ++i) kmax = std::max(kmax, ifs.exponent(i));
    std::vector<Layer> ring(kmax + 1);
    Layer base;
    base[ifs.map(0).fixed_point()] = Q(1);
    visit(0, base);
    for (long t = 1; t <= t_max; ++t) {
        Layer cur;
        for (int i = 0; i < ifs.size(); ++i) {
            const long src = t - ifs.exponent(i);
            for (const auto& [p, w] : src <= 0 ? base : ring[src % (kmax + 1)]) cur[ifs.map(i).apply(p)] += ifs.prob(i) * w;
            if (cur.size() > max_points) throw std::length_error("discrete measure exceeds the point budget");
        }
        ring[t % (kmax + 1)] = std::move(cur);
        visit(t, ring[t % (kmax + 1)]);
    }
}

// floor(x * 2^n) for the real or imaginary part of x
long long dyadic_index(const FieldElement& x, int n, bool imag) {
    const Q scale = Q(mpz_class(1) << n);
    for (mpfr_prec_t bits = 96; bits <= 4096; bits *= 2) {
        CInterval c = x.enclose(bits);
        const Interval& v = imag ? c.im : c.re;
        Q lo = v.lo_q() * scale, hi = v.hi_q() * scale;
        mpz_class flo, fhi;
        mpz_fdiv_q(flo.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
        mpz_fdiv_q(fhi.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
        if (flo == fhi) return flo.get_si();
    }
    throw std::runtime_error("dyadic cell of a support point is undecided at 4096 bits");
}

}  // namespace

std::string tri_str(Tri t) {
    switch (t) {
        case Tri::No: return "no";
        case Tri::Yes: return "yes";
        case Tri::Unknown: return "unknown";
    }
    return "?";
}

Ball attractor_ball(const IFS& ifs) {
    const auto& sp = *ifs.space();
    Ball b;
    b.center = ifs.map(0).fixed_point();
    Q dmax = 0, rmax = 0;
    for (const auto& f : ifs.maps()) {
        Q d = sp.norm2(sub(f.apply(b.center), b.center)).sqrt().hi_q();
        dmax = std::max(dmax, d);
        rmax = std::max(rmax, f.ratio().hi_q());
    }
    if (rmax >= 1) throw std::invalid_argument("maps must be contractions");
    b.radius = Interval(dmax / (1 - rmax), 128);
    return b;
}

DiscreteMeasure DiscreteMeasure::build(const IFS& ifs, int level, size_t max_points) {
    const long t = level * ifs.level_exponent();
    DiscreteMeasure out;
    layers(ifs, t, max_points, [&](long s, const auto& layer) {
        if (s != t) return;
        for (const auto& [p, w] : layer) {
            out.points_.push_back(p);
            out.weights_.push_back(w);
        }
    });
    return out;
}

std::vector<DiscreteMeasure> DiscreteMeasure::build_thresholds(const IFS& ifs, long t, size_t max_points) {
    std::vector<DiscreteMeasure> out;
    layers(ifs, t, max_points, [&](long, const auto& layer) {
        DiscreteMeasure d;
        for (const auto& [p, w] : layer) {
            d.points_.push_back(p);
            d.weights_.push_back(w);
        }
        out.push_back(std::move(d));
    });
    return out;
}

Q DiscreteMeasure::total() const {
    Q s = 0;
    for (const auto& w : weights_) s += w;
    return s;
}

MassBounds estimate_mass(const DiscreteMeasure& m, const std::function<Tri(const Point&)>& pred) {
    MassBounds b{Q(0), Q(0)};
    for (size_t i = 0; i < m.points().size(); ++i) {
        Tri t = pred(m.points()[i]);
        if (t == Tri::Yes) b.lower += m.weights()[i];
        if (t != Tri::No) b.upper += m.weights()[i];
    }
    return b;
}

McEstimate estimate_mass_mc(const IFS& ifs, const std::function<Tri(const double*)>& pred, size_t samples, int depth,
                            uint64_t seed) {
    std::vector<DMap> maps;
    std::vector<double> cum;
    double acc = 0;
    for (int i = 0; i < ifs.size(); ++i) {
        maps.push_back(to_dmap(ifs.map(i)));
        acc += ifs.prob(i).get_d();
        cum.push_back(acc);
    }
    const auto x0 = to_doubles(*ifs.space(), ifs.map(0).fixed_point());
    std::mt19937_64 rng(seed);
    McEstimate e;
    e.seed = seed;
    e.samples = samples;
    size_t hits = 0;
    double y[3];
    for (size_t s = 0; s < samples; ++s) {
        DMap f = DMap::identity(maps[0].m);
        for (int k = 0; k < depth; ++k) f = f.compose(maps[pick(cum, uniform(rng))]);
        f.apply(x0.data(), y);
        Tri t = pred(y);
        if (t == Tri::Yes) ++hits;
        if (t == Tri::Unknown) ++e.unknown;
    }
    e.value = static_cast<double>(hits) / static_cast<double>(samples);
    e.stderr_ = std::sqrt(e.value * (1 - e.value) / static_cast<double>(samples));
    return e;
}

// ---------------------------------------------------------------------------

struct AtomSampler::Impl {
    struct Ext {
        DMap map, inv;
        int tag;
    };
    struct Node {
        DMap h;
        int tag;
        // per (first-side tag, extension): surviving (second-side extension, successor)
        std::vector<std::vector<std::pair<int, int>>> succ;
    };
    struct Cyl {
        DMap map;
        int tag;
        std::vector<int> child;  // per extension, -1 until built
    };
    int m = 1;
    std::vector<std::vector<Ext>> ext;
    std::vector<std::vector<double>> cum;
    double c[3] = {0};
    double R = 0;
    double level_ratio = 1;
    std::vector<Node> nodes;
    std::map<std::pair<std::vector<long long>, int>, int> node_index;
    std::vector<Cyl> cyls;  // cylinders in root coordinates; id 0 is the root
    std::map<std::vector<long long>, int> cyl_index;  // interned by map, per level via tag-free key
    std::vector<int> cyl_level;
    std::vector<std::map<std::vector<int>, size_t>> counts;

    bool near(const DMap& h) const {
        double hc[3];
        h.apply(c, hc);
        double d2 = 0;
        for (int i = 0; i < m; ++i) d2 += (hc[i] - c[i]) * (hc[i] - c[i]);
        const double lim = R * (1 + h.s) * (1 + 1e-6);
        return d2 <= lim * lim;
    }
    int node_id(const DMap& h, int tag) {
        auto key = std::make_pair(h.key(kKeyScale), tag);
        auto it = node_index.find(key);
        if (it != node_index.end()) return it->second;
        nodes.push_back({h, tag, {}});
        node_index.emplace(std::move(key), static_cast<int>(nodes.size()) - 1);
        return static_cast<int>(nodes.size()) - 1;
    }
    const std::vector<std::pair<int, int>>& successors(int id, int first_tag, int w) {
        auto& nd = nodes[id];
        const size_t slot = static_cast<size_t>(first_tag) * 64 + static_cast<size_t>(w);
        if (nd.succ.size() <= slot) nd.succ.resize(slot + 1);
        if (nd.succ[slot].empty()) {
            std::vector<std::pair<int, int>> out;
            const DMap h = nd.h;
            const int tag = nd.tag;
            const auto& inv = ext[first_tag][w].inv;
            for (size_t w2 = 0; w2 < ext[tag].size(); ++w2) {
                DMap h2 = inv.compose(h).compose(ext[tag][w2].map);
                if (!near(h2)) continue;
                const int t2 = ext[tag][w2].tag;
                out.push_back({static_cast<int>(w2), node_id(h2, t2)});
            }
            if (out.empty()) out.push_back({-1, -1});  // marks "computed, nothing survives"
            nodes[id].succ[slot] = std::move(out);
        }
        return nodes[id].succ[slot];
    }
    int child_cyl(int id, int w) {
        if (cyls[id].child.empty()) cyls[id].child.assign(ext[cyls[id].tag].size(), -1);
        if (cyls[id].child[w] >= 0) return cyls[id].child[w];
        DMap g = cyls[id].map.compose(ext[cyls[id].tag][w].map);
        auto key = g.key(kKeyScale);
        key.push_back(cyl_level[id] + 1);
        int cid;
        auto it = cyl_index.find(key);
        if (it != cyl_index.end()) {
            cid = it->second;
        } else {
            cid = static_cast<int>(cyls.size());
            cyls.push_back({g, ext[cyls[id].tag][w].tag, {}});
            cyl_level.push_back(cyl_level[id] + 1);
            cyl_index.emplace(std::move(key), cid);
        }
        cyls[id].child[w] = cid;
        return cid;
    }
};

AtomSampler::AtomSampler(const IFS& ifs, int max_level, int depth) : impl_(std::make_shared<Impl>()), max_level_(max_level) {
    auto& I = *impl_;
    I.m = real_dim(*ifs.space());
    const long K = ifs.level_exponent();
    for (long tag = 0; tag < K; ++tag) {
        std::vector<Impl::Ext> row;
        std::vector<double> cum;
        double acc = 0;
        for (const auto& e : ifs.ext(static_cast<int>(tag))) {
            DMap d = to_dmap(e.map);
            row.push_back({d, d.inverse(), e.new_tag});
            acc += e.prob.get_d();
            cum.push_back(acc);
        }
        if (row.size() > 64) throw std::invalid_argument("sampling oracle supports at most 64 extensions per tag");
        I.ext.push_back(std::move(row));
        I.cum.push_back(std::move(cum));
    }
    Ball b = attractor_ball(ifs);
    auto cd = to_doubles(*ifs.space(), b.center);
    for (int i = 0; i < I.m; ++i) I.c[i] = cd[i];
    I.R = b.radius.hi_d();
    I.level_ratio = std::pow(ifs.space()->base_abs().mid_d(), static_cast<double>(K));
    // relative maps are re-derived from cached representatives, so depth is limited only by
    // how close to a cylinder boundary a sample may sit undetected
    depth_ = depth > 0 ? depth : static_cast<int>(std::ceil(10 * std::log(10.0) / std::log(1 / I.level_ratio)));
    depth_ = std::max(depth_, max_level_ + 2);
    I.cyls.push_back({DMap::identity(I.m), 0, {}});
    I.cyl_level.push_back(0);
    I.counts.resize(max_level_ + 1);
}

void AtomSampler::run(size_t samples, uint64_t seed) {
    auto& I = *impl_;
    samples_ = samples;
    seed_ = seed;
    for (auto& c : I.counts) c.clear();
    std::mt19937_64 rng(seed);
    const int L = max_level_;
    const int root = I.node_id(DMap::identity(I.m), 0);
    struct Entry {
        int node;
        int chain;      // levels <= L: second-side cylinder ids of levels 1..L, stride L
        uint64_t mask;  // levels > L: which level-L entries it descends from
    };
    std::vector<Entry> cur, next;
    std::vector<int> chains, ids;
    std::vector<int> level_l;  // chains of the level-L entries
    std::vector<int> stamp, slot;
    int stamp_now = 0;
    std::unordered_map<std::vector<int>, size_t, IntVecHash> outcomes;  // surviving chains -> count
    for (size_t s = 0; s < samples; ++s) {
        int eF = 0;
        chains.assign(L, 0);  // chain 0: the root entry's (empty) chain
        cur.assign(1, {root, 0, 0});
        for (int k = 1; k <= depth_; ++k) {
            const int w = pick(I.cum[eF], uniform(rng));
            const int first_tag = eF;
            eF = I.ext[eF][w].tag;
            next.clear();
            if (k <= L) {
                for (const auto& e : cur)
                    for (auto [w2, nd] : I.successors(e.node, first_tag, w)) {
                        if (w2 < 0) continue;
                        const int parent_cyl = k == 1 ? 0 : chains[e.chain * L + k - 2];
                        const int c = I.child_cyl(parent_cyl, w2);
                        const int id = static_cast<int>(chains.size() / L);
                        for (int j = 0; j < k - 1; ++j) chains.push_back(chains[e.chain * L + j]);
                        chains.push_back(c);
                        for (int j = k; j < L; ++j) chains.push_back(0);
                        next.push_back({nd, id, 0});
                    }
                if (k == L) {
                    if (next.size() > 64) throw std::length_error("more than 64 cylinders meet a sample");
                    level_l.clear();
                    for (size_t i = 0; i < next.size(); ++i) {
                        level_l.push_back(next[i].chain);
                        next[i].mask = uint64_t(1) << i;
                    }
                }
            } else {
                ++stamp_now;
                for (const auto& e : cur)
                    for (auto [w2, nd] : I.successors(e.node, first_tag, w)) {
                        if (w2 < 0) continue;
                        if (static_cast<size_t>(nd) >= stamp.size()) {
                            stamp.resize(nd + 1024, 0);
                            slot.resize(stamp.size(), 0);
                        }
                        if (stamp[nd] != stamp_now) {
                            stamp[nd] = stamp_now;
                            slot[nd] = static_cast<int>(next.size());
                            next.push_back({nd, 0, e.mask});
                        } else {
                            next[slot[nd]].mask |= e.mask;
                        }
                    }
            }
            cur.swap(next);
            if (k > L) {
                // the entry holding the identity never dies; once every entry carries the
                // same mask, the outcome is fixed
                bool same = true;
                for (const auto& e : cur) same = same && e.mask == cur[0].mask;
                if (same) break;
            }
        }
        uint64_t alive = 0;
        for (const auto& e : cur) alive |= e.mask;
        ids.clear();
        for (size_t i = 0; i < level_l.size(); ++i)
            if (alive >> i & 1) ids.insert(ids.end(), chains.begin() + level_l[i] * L, chains.begin() + (level_l[i] + 1) * L);
        ++outcomes[ids];
    }
    for (const auto& [flat, cnt] : outcomes) {
        for (int n = 1; n <= L; ++n) {
            std::vector<int> sig;
            for (size_t j = n - 1; j < flat.size(); j += L) sig.push_back(flat[j]);
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            I.counts[n][sig] += cnt;
        }
    }
}

McEstimate AtomSampler::atom_mass(int level, const std::vector<Similitude>& cylinders) const {
    if (level < 1 || level > max_level_) throw std::out_of_range("level outside the sampled range");
    const auto& I = *impl_;
    std::vector<int> sig;
    for (const auto& f : cylinders) {
        auto key = to_dmap(f).key(kKeyScale);
        key.push_back(level);
        auto it = I.cyl_index.find(key);
        sig.push_back(it == I.cyl_index.end() ? -1 : it->second);
    }
    std::sort(sig.begin(), sig.end());
    sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
    McEstimate e;
    e.samples = samples_;
    e.seed = seed_;
    size_t hits = 0;
    if (sig.empty() || sig[0] >= 0) {
        auto it = I.counts[level].find(sig);
        if (it != I.counts[level].end()) hits = it->second;
    }
    e.value = samples_ ? static_cast<double>(hits) / static_cast<double>(samples_) : 0;
    e.stderr_ = samples_ ? std::sqrt(e.value * (1 - e.value) / static_cast<double>(samples_)) : 0;
    return e;
}


size_t AtomSampler::signatures(int level) const { return impl_->counts.at(level).size(); }

// ---------------------------------------------------------------------------

std::vector<DyadicSum> dyadic_lq_sums(const IFS& ifs, const std::vector<double>& qs, int n_min, int n_max,
                                      size_t max_points) {
    if (n_min < 0 || n_max < n_min) throw std::invalid_argument("bad dyadic range");
    for (double q : qs)
        if (!(q > 0)) throw std::invalid_argument("dyadic sums need q > 0");
    const long K = ifs.level_exponent();
    std::map<long, std::vector<int>> wanted;  // threshold -> dyadic levels
    for (int n = n_min; n <= n_max; ++n) wanted[matched_level(ifs, n) * K].push_back(n);
    const bool cx = ifs.space()->complex();
    const int d = ifs.space()->dim();
    std::vector<DyadicSum> out;
    layers(ifs, wanted.rbegin()->first, max_points, [&](long t, const auto& layer) {
        auto it = wanted.find(t);
        if (it == wanted.end()) return;
        for (int n : it->second) {
            std::map<std::vector<long long>, double> cells;
            for (const auto& [p, w] : layer) {
                std::vector<long long> key;
                for (int i = 0; i < d; ++i) {
                    key.push_back(dyadic_index(p[i], n, false));
                    if (cx) key.push_back(dyadic_index(p[i], n, true));
                }
                cells[key] += w.get_d();
            }
            for (double q : qs) {
                std::vector<double> terms;
                for (const auto& [k, mass] : cells) terms.push_back(q * std::log(mass));
                double mx = *std::max_element(terms.begin(), terms.end());
                double s = 0;
                for (double x : terms) s += std::exp(x - mx);
                DyadicSum ds;
                ds.n = n;
                ds.level = static_cast<int>(t / K);
                ds.q = q;
                ds.log2_sum = (mx + std::log(s)) / std::log(2.0);
                ds.cells = cells.size();
                out.push_back(ds);
            }
        }
    });
    std::sort(out.begin(), out.end(), [](const DyadicSum& a, const DyadicSum& b) {
        return a.q != b.q ? a.q < b.q : a.n < b.n;
    });
    return out;
}

double dyadic_lq_sum(const IFS& ifs, double q, int n) { return dyadic_lq_sums(ifs, {q}, n, n).at(0).log2_sum; }

std::vector<TauFit> tau_dyadic(const IFS& ifs, const std::vector<double>& qs, int n_min, int n_max) {
    auto sums = dyadic_lq_sums(ifs, qs, n_min, n_max);
    std::vector<TauFit> out;
    for (double q : qs) {
        TauFit f;
        for (const auto& s : sums)
            if (s.q == q) f.sums.push_back(s);
        const double N = static_cast<double>(f.sums.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& s : f.sums) {
            sx += s.n;
            sy += s.log2_sum;
            sxx += static_cast<double>(s.n) * s.n;
            sxy += s.n * s.log2_sum;
        }
        const double den = N * sxx - sx * sx;
        const double slope = den != 0 ? (N * sxy - sx * sy) / den : (N ? sy / sx : 0);
        const double icpt = (sy - slope * sx) / N;
        double rss = 0;
        for (const auto& s : f.sums) rss += std::pow(s.log2_sum - (icpt + slope * s.n), 2);
        f.tau = -slope;
        f.residual = std::sqrt(rss / N);
        out.push_back(std::move(f));
    }
    return out;
}

TauFit tau_dyadic(const IFS& ifs, double q, int n_min, int n_max) { return tau_dyadic(ifs, std::vector<double>{q}, n_min, n_max).at(0); }

// ---------------------------------------------------------------------------

Tri subdivision_intersects(const IFS& ifs, const Similitude& f, const Similitude& g, int level, int depth) {
    if (f == g) return Tri::Yes;
    const long K = ifs.level_exponent();
    const int ea = static_cast<int>(f.exponent() - level * K), eb = static_cast<int>(g.exponent() - level * K);
    if (ea < 0 || ea >= K || eb < 0 || eb >= K) throw std::invalid_argument("cylinders are not of the given level");
    const Ball ball = attractor_ball(ifs);
    const auto& sp = *ifs.space();
    auto separated = [&](const Similitude& h) {
        Interval d2 = sp.norm2(sub(h.apply(ball.center), ball.center));
        Interval lim = ball.radius * (Interval(Q(1), 128) + h.ratio());
        return certainly_lt(lim.sqr(), d2);
    };
    struct Node {
        Similitude h;
        int a, b;
    };
    std::vector<Node> path;
    std::function<Tri(const Similitude&, int, int, int)> rec = [&](const Similitude& h, int a, int b, int left) -> Tri {
        if (separated(h)) return Tri::No;
        if (h.is_identity() && a == b) return Tri::Yes;
        // a repeated relative position along one chain yields a common periodic point
        for (const auto& n : path)
            if (n.a == a && n.b == b && n.h == h) return Tri::Yes;
        if (left == 0) return Tri::Unknown;
        path.push_back({h, a, b});
        bool all_no = true;
        Tri res = Tri::No;
        for (const auto& x : ifs.ext(a)) {
            const Similitude xi = x.map.inverse();
            for (const auto& y : ifs.ext(b)) {
                Tri t = rec(xi.compose(h).compose(y.map), x.new_tag, y.new_tag, left - 1);
                if (t == Tri::Yes) {
                    res = Tri::Yes;
                    break;
                }
                if (t == Tri::Unknown) all_no = false;
            }
            if (res == Tri::Yes) break;
        }
        path.pop_back();
        if (res == Tri::Yes) return Tri::Yes;
        return all_no ? Tri::No : Tri::Unknown;
    };
    return rec(f.inverse().compose(g), ea, eb, depth);
}

Q word_sum_entry(const IFS& ifs, const Similitude& base, int tag, const Similitude& target, int steps, size_t max_words) {
    Q sum = 0;
    size_t visited = 0;
    std::function<void(const Similitude&, int, const Q&, int)> rec = [&](const Similitude& cur, int t, const Q& p, int left) {
        if (++visited > max_words) throw std::length_error("word enumeration budget exceeded");
        if (left == 0) {
            if (cur == target) sum += p;
            return;
        }
        for (const auto& x : ifs.ext(t)) rec(cur.compose(x.map), x.new_tag, p * x.prob, left - 1);
    };
    rec(base, tag, Q(1), steps);
    return sum;
}

std::vector<Cylinder> cylinders(const IFS& ifs, int level) {
    std::vector<Cylinder> out;
    const long t = level * ifs.level_exponent();
    for (auto& w : ifs.stopping_words(level)) {
        Cylinder c;
        c.map = ifs.word_map(w);
        c.tag = static_cast<int>(c.map.exponent() - t);
        c.word = std::move(w);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace ftc::oracle
