#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftc/config.hpp"
#include "ftc/oracle.hpp"

using namespace ftc;
using ojson = nlohmann::ordered_json;

namespace {

struct Args {
    std::string config;
    long max_states = -1;
    int pressure_n = -1;
    std::string q_grid = "0.1:4:0.1";
    uint64_t seed = 1;
    int threads = 0;
    std::string out;
    bool integer_q_exact = false;
    bool non_exact_atoms = false;

    std::string address, children;
    int sweep = -1;

    std::string oracle_q = "2";
    int n_min = 12, n_max = 18;
    size_t samples = 1000000;
    int level = 4, depth = 12;
    size_t pairs = 200;
};

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c;
    }
    return o + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string s;
    for (size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + csv_field(fields[i]);
    return s + "\r\n";
}

void emit(const Args& a, const std::string& file, const std::string& content, bool to_stdout) {
    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        std::ofstream f(std::filesystem::path(a.out) / file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + file);
        f << content;
    }
    if (to_stdout) std::cout << content;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad integer in list: " + tok);
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

Pipeline load(const Args& a) {
    if (a.config.empty()) throw ConfigError("--config is required");
    PipelineOptions po;
    po.max_states = a.max_states;
    po.exact_atoms = !a.non_exact_atoms;
    return Pipeline::from_file(a.config, po);
}

ojson header(const Pipeline& p) {
    ojson j;
    j["config"] = p.config().name;
    j["config_sha256"] = p.config_hash();
    return j;
}

int cmd_normalize(const Args& a) {
    auto c = IfsConfig::load(a.config);
    c.build_ifs();
    emit(a, c.name + ".json", c.canonical(), true);
    return 0;
}

int cmd_check(const Args& a) {
    auto p = load(a);
    const auto& g = p.graph();
    ojson j = header(p);
    const bool ok = p.ftc_verified();
    j["ftc"] = ok ? "verified" : "inconclusive";
    j["neighbor_nodes"] = g->size();
    j["gamma_size"] = ok ? ojson(g->gamma_size()) : ojson(nullptr);
    j["frontier"] = g->frontier();
    j["max_neighbor_nodes"] = p.config().budgets.max_neighbor_nodes;
    const auto& ifs = *p.ifs();
    ojson pis;
    const auto& base = p.config().base;
    const bool base_is_generator =
        ifs.space()->field()->degree() == 1 || (base.size() == 2 && base[0] == 0 && base[1] == 1);
    if (base_is_generator) {
        auto rep = check_pisot(p.config().poly, p.config().box);
        pis["class"] = pisot_class_name(rep.cls);
        pis["algebraic_integer"] = rep.algebraic_integer;
        pis["detail"] = rep.detail;
    } else {
        pis["class"] = "not evaluated";
        pis["detail"] = "base ratio is not the field generator";
    }
    pis["advisory"] = true;
    j["pisot"] = pis;
    ojson w = ojson::array();
    for (const auto& s : ifs.space()->field()->warnings()) w.push_back(s);
    j["warnings"] = w;
    emit(a, "check-ftc.json", j.dump(2) + "\n", true);
    return ok ? 0 : 2;
}

int cmd_build(const Args& a) {
    auto p = load(a);
    const auto& am = p.automaton();
    const auto& m = p.measure();
    ojson summary = header(p);
    summary["states"] = am->num_states();
    summary["edges"] = am->edges().size();
    summary["positive_states"] = m->positive_states().size();
    summary["neighbor_nodes"] = p.graph()->size();
    summary["gamma_size"] = p.graph()->gamma_size();
    summary["anomalies"] = am->anomalies();
    if (!a.out.empty()) {
        ojson aj = header(p);
        aj["automaton"] = ojson::parse(am->to_json());
        emit(a, "automaton.json", aj.dump(2) + "\n", false);
        ojson mj = header(p);
        mj["measure"] = ojson::parse(m->to_json());
        emit(a, "measure.json", mj.dump(2) + "\n", false);
        emit(a, "automaton.dot", "// config_sha256 " + p.config_hash() + "\n" + am->to_dot(), false);
        emit(a, "neighbors.dot", "// config_sha256 " + p.config_hash() + "\n" + p.graph()->to_dot(), false);
    }
    emit(a, "build.json", summary.dump(2) + "\n", true);
    return 0;
}

std::vector<int> resolve_children(const Automaton& am, const std::vector<int>& path) {
    std::vector<int> addr{am.root()};
    for (int c : path) {
        auto ch = am.children(addr.back());
        if (c < 1 || c > static_cast<int>(ch.size()))
            throw std::invalid_argument("child index " + std::to_string(c) + " out of range 1.." + std::to_string(ch.size()));
        addr.push_back(ch[c - 1]);
    }
    return addr;
}

int cmd_mass(const Args& a) {
    auto p = load(a);
    const auto& am = p.automaton();
    const auto& m = p.measure();
    ojson j = header(p);
    if (a.sweep >= 0) {
        Q total = 0;
        auto addrs = am->addresses(a.sweep);
        for (const auto& ad : addrs) total += m->mass(ad);
        j["depth"] = a.sweep;
        j["atoms"] = addrs.size();
        j["total"] = rational_str(total);
        j["decimal"] = fmt(total.get_d());
    } else {
        std::vector<int> addr;
        if (!a.children.empty()) {
            addr = resolve_children(*am, parse_int_list(a.children));
        } else {
            addr = parse_int_list(a.address);
            if (addr.empty() || addr[0] != am->root()) throw std::invalid_argument("address must start at the root state 0");
            if (!am->resolve(addr)) throw std::invalid_argument("address is not admissible");
        }
        Q mass = m->mass(addr);
        ojson ad = ojson::array();
        for (int s : addr) ad.push_back(s);
        j["address"] = ad;
        j["mass"] = rational_str(mass);
        j["decimal"] = fmt(mass.get_d());
    }
    emit(a, "mass.json", j.dump(2) + "\n", true);
    return 0;
}

int cmd_spectrum(const Args& a) {
    auto p = load(a);
    auto opt = p.spectrum_options();
    if (a.pressure_n > 0) opt.pressure_n = a.pressure_n;
    opt.integer_q_exact = a.integer_q_exact;
    opt.threads = a.threads > 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    auto sp = p.spectrum(opt);
    auto curve = sp.lq_curve(parse_grid(a.q_grid));

    std::string csv = csv_row({"q", "tau", "tau_lower", "tau_upper", "method", "n"});
    for (const auto& t : curve.points)
        csv += csv_row({fmt(t.q), fmt(t.tau), fmt(t.lower), fmt(t.upper), method_name(t.method), std::to_string(t.n)});

    ojson d = header(p);
    const auto& cls = sp.essential();
    d["essential_states"] = cls.states.size();
    d["essential_dimension"] = cls.dimension();
    d["scalar_class"] = cls.scalar();
    d["irreducibility"] = {{"ok", sp.irreducibility().ok}, {"r", sp.irreducibility().r},
                           {"delta", sp.irreducibility().delta}};
    d["log_rho"] = sp.log_rho();
    d["q_grid"] = a.q_grid;
    d["pressure_n"] = opt.pressure_n;
    d["max_bound_width"] = curve.max_width;
    d["max_second_difference"] = curve.max_second_difference;
    d["smoothness_jump"] = curve.smoothness_jump;
    d["smoothness_note"] = "non-rigorous diagnostic: max jump of symmetric difference quotients on the grid";

    if (a.out.empty()) {
        std::cout << csv;
        std::cerr << d.dump(2) << "\n";
    } else {
        emit(a, "spectrum.csv", csv, false);
        emit(a, "spectrum.json", d.dump(2) + "\n", false);
        std::cout << d.dump(2) << "\n";
    }
    return 0;
}

int cmd_oracle_dyadic(const Args& a) {
    auto p = load(a);
    auto qs = parse_double_list(a.oracle_q);
    auto fits = oracle::tau_dyadic(*p.ifs(), qs, a.n_min, a.n_max);
    ojson j = header(p);
    ojson arr = ojson::array();
    for (const auto& f : fits) {
        ojson e;
        e["q"] = f.sums.empty() ? 0.0 : f.sums[0].q;
        e["tau"] = f.tau;
        e["residual"] = f.residual;
        ojson s = ojson::array();
        for (const auto& x : f.sums) s.push_back({{"n", x.n}, {"level", x.level}, {"log2_sum", x.log2_sum}, {"cells", x.cells}});
        e["sums"] = s;
        arr.push_back(e);
    }
    j["n_min"] = a.n_min;
    j["n_max"] = a.n_max;
    j["fits"] = arr;
    emit(a, "oracle-dyadic.json", j.dump(2) + "\n", true);
    return 0;
}

int cmd_oracle_atoms(const Args& a) {
    auto p = load(a);
    const auto& m = p.measure();
    const auto& am = p.automaton();
    oracle::AtomSampler sampler(*p.ifs(), a.level);
    sampler.run(a.samples, a.seed);
    ojson j = header(p);
    j["samples"] = a.samples;
    j["seed"] = a.seed;
    j["depth"] = sampler.depth();
    ojson arr = ojson::array();
    double worst = 0;
    for (int n = 1; n <= a.level; ++n) {
        for (const auto& ad : am->addresses(n)) {
            Q exact = m->mass(ad);
            auto lam = m->actual_lambda(ad);
            auto est = sampler.atom_mass(n, lam.back());
            double z = est.stderr_ > 0 ? (est.value - exact.get_d()) / est.stderr_ : 0.0;
            worst = std::max(worst, std::fabs(z));
            ojson ad_j = ojson::array();
            for (int s : ad) ad_j.push_back(s);
            arr.push_back({{"address", ad_j}, {"exact", rational_str(exact)}, {"estimate", est.value},
                           {"stderr", est.stderr_}, {"z", z}});
        }
    }
    j["worst_abs_z"] = worst;
    j["atoms"] = arr;
    emit(a, "oracle-atoms.json", j.dump(2) + "\n", true);
    return 0;
}

int cmd_oracle_intersect(const Args& a) {
    auto p = load(a);
    const auto& g = p.graph();
    if (!p.ftc_verified()) throw Inconclusive("finite type not verified; neighbour test unavailable");
    auto cyl = oracle::cylinders(*p.ifs(), a.level);
    std::mt19937_64 rng(a.seed);
    size_t agree = 0, unknown = 0, contra = 0, total = 0;
    ojson bad = ojson::array();
    const size_t n = cyl.size();
    const size_t all_pairs = n * (n + 1) / 2;
    auto check = [&](size_t i, size_t k) {
        bool fast = g->intersects(cyl[i].map, cyl[k].map);
        auto slow = oracle::subdivision_intersects(*p.ifs(), cyl[i].map, cyl[k].map, a.level, a.depth);
        ++total;
        if (slow == oracle::Tri::Unknown) {
            ++unknown;
        } else if ((slow == oracle::Tri::Yes) == fast) {
            ++agree;
        } else {
            ++contra;
            bad.push_back({word_str(cyl[i].word), word_str(cyl[k].word)});
        }
    };
    if (all_pairs <= a.pairs) {
        for (size_t i = 0; i < n; ++i)
            for (size_t k = i; k < n; ++k) check(i, k);
    } else {
        for (size_t t = 0; t < a.pairs; ++t) check(rng() % n, rng() % n);
    }
    ojson j = header(p);
    j["level"] = a.level;
    j["depth"] = a.depth;
    j["seed"] = a.seed;
    j["pairs"] = total;
    j["agree"] = agree;
    j["unknown"] = unknown;
    j["contradictions"] = contra;
    j["contradicting_pairs"] = bad;
    emit(a, "oracle-intersect.json", j.dump(2) + "\n", true);
    return contra ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-type self-similar measures: automaton, exact masses, L^q spectrum"};
    app.require_subcommand(1);
    app.fallthrough();
    Args a;
    app.add_option("--config", a.config, "IFS config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--max-states", a.max_states, "automaton state budget (overrides config)");
    app.add_option("--pressure-n", a.pressure_n, "word length for finite-n pressure bounds");
    app.add_option("--q-grid", a.q_grid, "q grid a:b:step");
    app.add_option("--rng-seed", a.seed, "seed for Monte-Carlo oracles");
    app.add_option("--threads", a.threads, "worker threads (default: cores)");
    app.add_option("--out", a.out, "output directory");
    app.add_flag("--integer-q-exact", a.integer_q_exact, "Kronecker spectral route at integer q");
    app.add_flag("--superset-atoms", a.non_exact_atoms, "keep every tuple-consistent signature");

    auto* normalize = app.add_subcommand("normalize", "print the canonical form of a config");
    auto* check = app.add_subcommand("check-ftc", "neighbour closure and Pisot advisory");
    auto* build = app.add_subcommand("build", "automaton and transition matrices");
    auto* mass = app.add_subcommand("mass", "exact mass of an atom");
    mass->add_option("--address", a.address, "comma-separated state ids, starting with the root 0");
    mass->add_option("--children", a.children, "comma-separated 1-based child positions from the root");
    mass->add_option("--sweep", a.sweep, "sum of all atom masses at this depth");
    auto* spectrum = app.add_subcommand("spectrum", "L^q spectrum on a grid");
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force references");
    oracle_cmd->require_subcommand(1);
    auto* dyadic = oracle_cmd->add_subcommand("dyadic", "tau(q) from dyadic box sums");
    dyadic->add_option("--q", a.oracle_q, "comma-separated q values");
    dyadic->add_option("--n-min", a.n_min);
    dyadic->add_option("--n-max", a.n_max);
    auto* atoms = oracle_cmd->add_subcommand("atoms", "Monte-Carlo atom masses vs exact");
    atoms->add_option("--samples", a.samples);
    atoms->add_option("--depth", a.level, "atom depth");
    auto* inter = oracle_cmd->add_subcommand("intersect", "neighbour test vs subdivision");
    inter->add_option("--level", a.level);
    inter->add_option("--depth", a.depth, "subdivision depth");
    inter->add_option("--pairs", a.pairs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*normalize) return cmd_normalize(a);
        if (*check) return cmd_check(a);
        if (*build) return cmd_build(a);
        if (*mass) return cmd_mass(a);
        if (*spectrum) return cmd_spectrum(a);
        if (*dyadic) return cmd_oracle_dyadic(a);
        if (*atoms) return cmd_oracle_atoms(a);
        if (*inter) return cmd_oracle_intersect(a);
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 1;
    } catch (const Inconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
