#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "ftc/oracle.hpp"
#include "unit/common.hpp"

#ifndef FTC_CLI_PATH
#define FTC_CLI_PATH "ftc"
#endif

using namespace ftc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Spectrum spectrum_of(Pipeline& p) {
    auto o = p.spectrum_options();
    o.threads = threads();
    return p.spectrum(o);
}

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

Outcome c1_cantor() {
    auto p = testutil::load("cantor-1-3");
    auto sp = spectrum_of(p);
    double worst = 0;
    bool contained = true;
    for (double q : {0.5, 1.0, 2.0, 3.0}) {
        const double exact = (q - 1) * std::log(2.0) / std::log(3.0);
        double tau;
        if (q == std::floor(q)) {
            tau = sp.pressure_integer_q(static_cast<int>(q)).value / sp.log_rho();
        } else {
            auto f = sp.pressure_finite_n(q, p.config().budgets.pressure_n);
            // tau bounds from pressure bounds; log rho < 0 swaps them
            double lo = f.upper / sp.log_rho(), hi = f.lower / sp.log_rho();
            contained = contained && lo <= exact + 1e-12 && exact <= hi + 1e-12;
            tau = sp.tau(q).tau;
        }
        worst = std::max(worst, std::fabs(tau - exact));
    }
    return {worst <= 1e-9 && contained, "max |tau - closed form| = " + num(worst) + (contained ? "" : ", bounds miss")};
}

Outcome c2_lebesgue() {
    auto p = testutil::load("lebesgue-1-2");
    size_t atoms = 0, bad = 0;
    for (int n = 0; n <= 6; ++n) {
        auto cyl = oracle::cylinders(*p.ifs(), std::max(n, 1));
        for (const auto& ad : p.automaton()->addresses(n)) {
            ++atoms;
            auto lam = p.measure()->actual_lambda(ad).back();
            std::vector<std::pair<Q, Q>> in, out;
            for (const auto& m : lam) in.push_back(testutil::unit_image(m));
            if (n > 0)
                for (const auto& c : cyl)
                    if (std::find(lam.begin(), lam.end(), c.map) == lam.end()) out.push_back(testutil::unit_image(c.map));
            if (p.measure()->mass(ad) != testutil::atom_length(in, out)) ++bad;
        }
    }
    auto sp = spectrum_of(p);
    double worst = 0;
    for (double q : {0.5, 1.0, 2.0, 3.0}) worst = std::max(worst, std::fabs(sp.tau(q).tau - (q - 1)));
    return {bad == 0 && worst <= 1e-6,
            std::to_string(atoms) + " atoms, " + std::to_string(bad) + " length mismatches, max |tau-(q-1)| = " + num(worst)};
}

Outcome c3_partition() {
    std::string detail;
    bool ok = true;
    for (const auto& name : testutil::bundled()) {
        auto p = testutil::load(name);
        size_t count = 0;
        for (int n = 1; n <= 8; ++n) {
            Q total = 0;
            auto addrs = p.automaton()->addresses(n);
            count = addrs.size();
            for (const auto& ad : addrs) total += p.measure()->mass(ad);
            if (total != 1) {
                ok = false;
                detail += name + " depth " + std::to_string(n) + " sums to " + rational_str(total) + "; ";
            }
        }
        detail += name + ":" + std::to_string(count) + " ";
    }
    return {ok, "depth-8 atom counts " + detail};
}

Outcome c4_global() {
    size_t checked = 0, bad = 0;
    for (const auto& name : testutil::bundled()) {
        auto p = testutil::load(name);
        for (int n = 0; n <= 6; ++n)
            for (const auto& ad : p.automaton()->addresses(n)) {
                ++checked;
                if (p.measure()->mass_global(ad) != p.measure()->mass(ad)) ++bad;
            }
    }
    return {bad == 0, std::to_string(checked) + " addresses, " + std::to_string(bad) + " mismatches"};
}

Outcome c5_entries() {
    size_t checked = 0, bad = 0;
    for (const auto& name : {std::string("cantor-1-3"), std::string("golden-bernoulli")}) {
        auto p = testutil::load(name);
        const auto& a = *p.automaton();
        for (int n = 1; n <= 5; ++n)
            for (const auto& ad : a.addresses(n)) {
                auto lam = p.measure()->actual_lambda(ad);
                for (int k = 0; k < n; ++k) {
                    auto P = p.measure()->product_entries(std::vector<int>(ad.begin() + k, ad.end()));
                    for (size_t i = 0; i < P.size(); ++i)
                        for (size_t j = 0; j < P[i].size(); ++j) {
                            ++checked;
                            Q ref = oracle::word_sum_entry(*p.ifs(), lam[k][i], a.phi_tag(ad[k], static_cast<int>(i)),
                                                           lam[n][j], n - k);
                            if (ref != P[i][j]) ++bad;
                        }
                }
            }
    }
    return {bad == 0, std::to_string(checked) + " entries, " + std::to_string(bad) + " mismatches"};
}

Outcome c6_golden() {
    auto p = testutil::load("golden-bernoulli");
    const bool ftc = p.ftc_verified();
    auto sp = spectrum_of(p);
    const bool irr = sp.irreducibility().ok;
    const double tau2 = sp.pressure_integer_q(2).value / sp.log_rho();
    auto fit = oracle::tau_dyadic(*p.ifs(), 2.0, 12, 18);
    const double dtau = std::fabs(tau2 - fit.tau);

    const size_t N = 10000000;
    oracle::AtomSampler sampler(*p.ifs(), 6);
    sampler.run(N, 20240601);
    double worst = 0;
    size_t atoms = 0;
    for (int n = 1; n <= 6; ++n)
        for (const auto& ad : p.automaton()->addresses(n)) {
            ++atoms;
            const double exact = p.measure()->mass(ad).get_d();
            auto est = sampler.atom_mass(n, p.measure()->actual_lambda(ad).back());
            // standard error of the sample frequency at the exact mass
            const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(N));
            const double z = se > 0 ? std::fabs(est.value - exact) / se : (est.value == exact ? 0 : INFINITY);
            worst = std::max(worst, z);
        }
    const bool ok = ftc && irr && dtau <= 0.02 && worst <= 4;
    return {ok, std::string("FTC ") + (ftc ? "verified" : "inconclusive") + ", Gamma " +
                    std::to_string(p.graph()->gamma_size()) + ", irreducible " + (irr ? "yes" : "no") + ", tau(2) " +
                    num(tau2) + " vs dyadic " + num(fit.tau) + " (diff " + num(dtau) + "), " + std::to_string(atoms) +
                    " atoms worst |z| " + num(worst)};
}

Outcome c7_intersections() {
    std::string detail;
    bool ok = true;
    for (const auto& name : testutil::bundled()) {
        auto p = testutil::load(name);
        const auto& ifs = *p.ifs();
        int level = 1;
        while (oracle::cylinders(ifs, level).size() < 20) ++level;
        auto cyl = oracle::cylinders(ifs, level);
        std::vector<std::pair<size_t, size_t>> pairs;
        if (cyl.size() * (cyl.size() + 1) / 2 <= 600) {
            for (size_t i = 0; i < cyl.size(); ++i)
                for (size_t k = i; k < cyl.size(); ++k) pairs.push_back({i, k});
        } else {
            std::mt19937_64 rng(7);
            // half near-diagonal pairs so that intersecting pairs are represented
            for (int t = 0; t < 300; ++t) {
                size_t i = rng() % cyl.size();
                pairs.push_back({i, std::min(cyl.size() - 1, i + rng() % 4)});
                pairs.push_back({rng() % cyl.size(), rng() % cyl.size()});
            }
        }
        size_t decisive = 0, contra = 0, yes = 0;
        for (auto [i, k] : pairs) {
            auto t = oracle::subdivision_intersects(ifs, cyl[i].map, cyl[k].map, level, 14);
            if (t == oracle::Tri::Unknown) continue;
            ++decisive;
            const bool slow = t == oracle::Tri::Yes;
            yes += slow;
            if (slow != p.graph()->intersects(cyl[i].map, cyl[k].map)) ++contra;
        }
        ok = ok && decisive >= 100 && contra == 0;
        detail += name + ":" + std::to_string(decisive) + "/" + std::to_string(yes) + "/" + std::to_string(contra) + " ";
    }
    return {ok, "decisive/intersecting/contradictions " + detail};
}

Outcome c8_sanity() {
    std::string detail;
    bool ok = true;
    auto grid = parse_grid("0.2:4:0.1");
    for (const auto& name : testutil::bundled()) {
        auto p = testutil::load(name);
        auto sp = spectrum_of(p);
        const double t1 = std::fabs(sp.tau(1.0).tau);
        auto curve = sp.lq_curve(grid);
        ok = ok && t1 <= 1e-9 && curve.max_second_difference <= 1e-8;
        detail += name + ":" + num(t1) + "/" + num(curve.max_second_difference) + " ";
    }
    return {ok, "|tau(1)| / max second difference " + detail};
}

Outcome c9_commensurable() {
    auto p = testutil::load("commensurable-osc");
    auto sp = spectrum_of(p);
    double worst = 0;
    for (double q : {0.5, 2.0, 3.0})
        worst = std::max(worst, std::fabs(sp.tau(q).tau - testutil::moran_tau({1.0 / 3, 2.0 / 3}, {0.5, 0.25}, q)));
    return {worst <= 1e-6, "max |tau - Moran root| = " + num(worst)};
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c10_determinism() {
    const fs::path root = fs::temp_directory_path() / ("ftc-acceptance-" + std::to_string(::getpid()));
    size_t files = 0, differ = 0;
    bool ran = true;
    for (const auto& name : testutil::bundled()) {
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / std::to_string(run) / name;
            for (const char* cmd : {"build", "spectrum"}) {
                std::string line = std::string(FTC_CLI_PATH) + " " + cmd + " --config " + testutil::config_path(name) +
                                   " --rng-seed 5 --out " + dir.string() + " > /dev/null";
                if (std::system(line.c_str()) != 0) ran = false;
            }
        }
        for (const auto& e : fs::directory_iterator(root / "0" / name)) {
            ++files;
            if (slurp(e.path()) != slurp(root / "1" / name / e.path().filename())) ++differ;
        }
    }
    fs::remove_all(root);
    return {ran && differ == 0 && files > 0,
            std::to_string(files) + " files compared, " + std::to_string(differ) + " differ" + (ran ? "" : ", a run failed")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // stated runtime limit, 0 when none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "OSC closed form (cantor-1-3)", 5, c1_cantor},
        {2, "Lebesgue identity", 10, c2_lebesgue},
        {3, "partition of unity, depth <= 8", 30, c3_partition},
        {4, "global product equals recursive mass, depth <= 6", 0, c4_global},
        {5, "transition entries equal word sums, depth <= 5", 0, c5_entries},
        {6, "golden Bernoulli convolution", 120, c6_golden},
        {7, "intersection oracle agreement", 0, c7_intersections},
        {8, "spectrum sanity", 0, c8_sanity},
        {9, "commensurable Moran root", 10, c9_commensurable},
        {10, "determinism of build + spectrum", 0, c10_determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s == 0 || secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d %s: %s (%s; %.1fs%s)\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                    in_time ? "" : ", over time budget");
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
