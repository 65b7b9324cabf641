#include "ftc/measure.hpp"

#include <sstream>

#include "json.hpp"

namespace ftc {

Measure::Measure(std::shared_ptr<const Automaton> a) : a_(std::move(a)) {
    compute_vectors();
    compute_transitions();
    verify_consistency();
    build_global();
}

void Measure::compute_vectors() {
    const auto& g = a_->graph();
    const size_t n = a_->num_states();
    v_.resize(n);
    star_.resize(n);
    for (size_t s = 0; s < n; ++s) {
        const auto& cv = a_->state(static_cast<int>(s));
        std::vector<char> inV(cv.U.size(), 0);
        for (int p : cv.V) inV[p] = 1;
        for (size_t i = 0; i < cv.V.size(); ++i) {
            const auto& ni = g.node(cv.U[cv.V[i]]);
            Similitude inv = ni.h.inverse();
            RegionQuery q;
            q.base_tag = ni.eb;
            for (size_t p = 0; p < cv.U.size(); ++p) {
                if (p == static_cast<size_t>(cv.V[i])) continue;
                const auto& np = g.node(cv.U[p]);
                int id = g.find(inv.compose(np.h), ni.eb, np.eb);
                (inV[p] ? q.inside : q.outside).push_back(id);
            }
            Q val = a_->regions().probability(q);
            v_[s].push_back(val);
            if (val > 0) star_[s].push_back(static_cast<int>(i));
        }
    }
}

void Measure::compute_transitions() {
    const auto& ifs = a_->ifs();
    for (const auto& e : a_->edges()) {
        const auto& parent = a_->state(e.from);
        const auto& C = a_->child_cylinders(e.from);
        std::map<int, int> vpos;  // U position -> V index
        for (size_t j = 0; j < parent.V.size(); ++j) vpos[parent.V[j]] = static_cast<int>(j);
        QMat t(parent.V.size(), QVec(e.lambda.size(), Q(0)));
        for (size_t i = 0; i < e.lambda.size(); ++i) {
            for (auto [pa, w] : C[e.lambda[i]].sources) {
                auto it = vpos.find(pa);
                if (it == vpos.end()) continue;
                const auto& node = a_->graph().node(parent.U[pa]);
                t[it->second][i] += ifs.ext(node.eb)[w].prob;
            }
        }
        T_[{e.from, e.to}] = std::move(t);
    }
}

void Measure::verify_consistency() const {
    for (size_t s = 0; s < a_->num_states(); ++s) {
        QVec acc(v_[s].size(), Q(0));
        for (int eid : a_->out_edges(static_cast<int>(s))) {
            const auto& e = a_->edges()[eid];
            QVec tv = mat_vec(T_.at({e.from, e.to}), v_[e.to]);
            for (size_t j = 0; j < acc.size(); ++j) acc[j] += tv[j];
        }
        if (acc != v_[s])
            throw InvariantViolation("mass vector self-consistency fails at state " + std::to_string(s));
        for (int eid : a_->out_edges(static_cast<int>(s))) {
            const auto& e = a_->edges()[eid];
            const auto& t = T_.at({e.from, e.to});
            for (size_t i = 0; i < t[0].size(); ++i) {
                bool any = false;
                for (const auto& row : t) any = any || row[i] > 0;
                if (!any) throw InvariantViolation("transition column without a parent cylinder");
            }
        }
    }
    if (v_[0] != QVec{Q(1)}) throw InvariantViolation("root mass differs from 1");
}

std::vector<int> Measure::positive_states() const {
    std::vector<int> out;
    for (size_t s = 0; s < v_.size(); ++s)
        if (!star_[s].empty()) out.push_back(static_cast<int>(s));
    return out;
}

const QMat& Measure::full_transition(int from, int to) const {
    auto it = T_.find({from, to});
    if (it == T_.end()) throw std::invalid_argument("pair is not admissible");
    return it->second;
}

QMat Measure::transition_matrix(int from, int to) const {
    const auto& t = full_transition(from, to);
    QMat out;
    for (int j : star_[from]) {
        QVec row;
        for (int i : star_[to]) row.push_back(t[j][i]);
        out.push_back(std::move(row));
    }
    return out;
}

QVec Measure::u(const std::vector<int>& address) const {
    if (!a_->resolve(address)) throw std::invalid_argument("address is not admissible");
    QVec u{Q(1)};
    for (size_t k = 1; k < address.size(); ++k) {
        QMat t = transition_matrix(address[k - 1], address[k]);
        if (u.empty() || t.empty()) return {};
        u = vec_mat(u, t);
    }
    return u;
}

Q Measure::mass(const std::vector<int>& address) const {
    QVec uu = u(address);
    if (uu.empty()) return Q(0);
    const int s = address.back();
    QVec vv;
    for (int i : star_[s]) vv.push_back(v_[s][i]);
    return dot(uu, vv);
}

void Measure::build_global() {
    auto& G = global_;
    G.alphabet = positive_states();
    G.offset.push_back(0);
    for (size_t i = 0; i < G.alphabet.size(); ++i) {
        G.letter_of[G.alphabet[i]] = static_cast<int>(i);
        G.offset.push_back(G.offset.back() + static_cast<int>(star_[G.alphabet[i]].size()));
    }
    const int N = G.dimension();
    G.M.resize(G.alphabet.size());
    G.w.resize(G.alphabet.size());
    for (size_t i = 0; i < G.alphabet.size(); ++i) G.M[i].letter = static_cast<int>(i);
    for (const auto& e : a_->edges()) {
        auto fi = G.letter_of.find(e.from), ti = G.letter_of.find(e.to);
        if (fi == G.letter_of.end() || ti == G.letter_of.end()) continue;
        G.M[ti->second].rows.push_back({fi->second, transition_matrix(e.from, e.to)});
    }
    for (auto& m : G.M) std::sort(m.rows.begin(), m.rows.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t i = 0; i < G.alphabet.size(); ++i) {
        QVec w(N, Q(1));
        const int s = G.alphabet[i];
        for (size_t p = 0; p < star_[s].size(); ++p) w[G.offset[i] + p] = v_[s][star_[s][p]];
        G.w[i] = std::move(w);
    }
}

Q Measure::mass_global(const std::vector<int>& address) const {
    if (!a_->resolve(address)) throw std::invalid_argument("address is not admissible");
    const auto& G = global_;
    const int N = G.dimension();
    for (int s : address)
        if (!G.letter_of.count(s)) return Q(0);
    QVec x(N, Q(0));
    x[0] = 1;  // e_1: the root block comes first
    int last = 0;
    for (size_t k = 1; k < address.size(); ++k) {
        const int i = G.letter_of.at(address[k]);
        const auto& M = G.M[i];
        QVec y(N, Q(0));
        for (const auto& [kb, blk] : M.rows) {
            for (size_t r = 0; r < blk.size(); ++r) {
                const Q& xr = x[G.offset[kb] + r];
                if (xr == 0) continue;
                for (size_t c = 0; c < blk[r].size(); ++c)
                    if (blk[r][c] != 0) y[G.offset[i] + c] += xr * blk[r][c];
            }
        }
        x = std::move(y);
        last = i;
    }
    return dot(x, G.w[last]);
}

QMat Measure::product_entries(const std::vector<int>& path) const {
    if (path.empty()) throw std::invalid_argument("empty path");
    const size_t d = a_->state(path[0]).V.size();
    QMat p(d, QVec(d, Q(0)));
    for (size_t i = 0; i < d; ++i) p[i][i] = 1;
    for (size_t k = 1; k < path.size(); ++k) p = mat_mul(p, full_transition(path[k - 1], path[k]));
    return p;
}

std::vector<std::vector<Similitude>> Measure::actual_lambda(const std::vector<int>& address) const {
    std::vector<std::vector<Similitude>> out;
    Similitude f1 = Similitude::identity(a_->ifs().space());
    for (size_t k = 0; k < address.size(); ++k) {
        const int s = address[k];
        if (k > 0) f1 = f1.compose(a_->r_map(s));
        std::vector<Similitude> maps;
        for (size_t i = 0; i < a_->state(s).V.size(); ++i) maps.push_back(f1.compose(a_->phi(s, static_cast<int>(i))));
        out.push_back(std::move(maps));
    }
    return out;
}

std::string Measure::to_json() const {
    nlohmann::ordered_json j;
    auto qs = [](const QVec& v) {
        std::vector<std::string> out;
        for (const auto& x : v) out.push_back(rational_str(x));
        return out;
    };
    j["alphabet"] = global_.alphabet;
    j["states"] = nlohmann::ordered_json::array();
    for (size_t s = 0; s < v_.size(); ++s)
        j["states"].push_back({{"id", s}, {"v", qs(v_[s])}, {"star", star_[s]}, {"v_star", star_[s].size()}});
    j["transitions"] = nlohmann::ordered_json::array();
    for (const auto& e : a_->edges()) {
        nlohmann::ordered_json m = nlohmann::ordered_json::array();
        for (const auto& row : transition_matrix(e.from, e.to)) m.push_back(qs(row));
        j["transitions"].push_back({{"from", e.from}, {"to", e.to}, {"T", m}});
    }
    j["global"]["dimension"] = global_.dimension();
    j["global"]["M"] = nlohmann::ordered_json::array();
    for (const auto& M : global_.M) {
        nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
        for (const auto& [k, blk] : M.rows) {
            nlohmann::ordered_json b = nlohmann::ordered_json::array();
            for (const auto& row : blk) b.push_back(qs(row));
            blocks.push_back({{"row_block", k}, {"block", b}});
        }
        j["global"]["M"].push_back({{"letter", M.letter}, {"blocks", blocks}});
    }
    j["global"]["w"] = nlohmann::ordered_json::array();
    for (const auto& w : global_.w) j["global"]["w"].push_back(qs(w));
    return j.dump(1);
}

}  // namespace ftc
