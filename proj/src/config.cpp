#include "ftc/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ftc {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const ojson& j, const std::string& where, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    if (!j.is_object()) fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key())) fail(where, "unknown key \"" + it.key() + "\"");
    for (const auto& k : required)
        if (!j.contains(k)) fail(where, "missing key \"" + k + "\"");
}

Q rational(const ojson& j, const std::string& where) {
    if (!j.is_string()) fail(where, "rationals must be \"num/den\" strings");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

std::vector<Q> rational_list(const ojson& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rationals");
    std::vector<Q> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(rational(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

// a bare string is a rational element; an array lists power-basis coefficients
ElementLiteral element(const ojson& j, const std::string& where) {
    if (j.is_string()) return {rational(j, where)};
    return rational_list(j, where);
}

ojson element_json(const ElementLiteral& e) {
    if (e.size() == 1) return rational_str(e[0]);
    ojson a = ojson::array();
    for (const auto& q : e) a.push_back(rational_str(q));
    return a;
}

ElementLiteral parse_rot(const std::string& s, const std::string& where) {
    if (s.size() < 5 || s.compare(0, 4, "rot(") != 0 || s.back() != ')')
        fail(where, "complex orthogonal part must be written rot(c0,c1,...)");
    std::string body = s.substr(4, s.size() - 5);
    ElementLiteral out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(parse_rational(tok));
        } catch (const std::exception& e) {
            fail(where, e.what());
        }
    }
    if (out.empty()) fail(where, "rot() needs at least one coefficient");
    return out;
}

std::string rot_str(const ElementLiteral& e) {
    std::string s = "rot(";
    for (size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + rational_str(e[i]);
    return s + ")";
}

long integer(const ojson& j, const std::string& where, long lo) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    long v = j.get<long>();
    if (v < lo) fail(where, "must be >= " + std::to_string(lo));
    return v;
}

}  // namespace

IfsConfig IfsConfig::parse(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    check_keys(j, "", {"name", "field", "base", "dimension", "backend", "maps", "probabilities"},
               {"description", "mode", "budgets"});
    IfsConfig c;
    if (!j["name"].is_string()) fail("name", "expected a string");
    c.name = j["name"].get<std::string>();
    if (j.contains("description")) {
        if (!j["description"].is_string()) fail("description", "expected a string");
        c.description = j["description"].get<std::string>();
    }

    const auto& f = j["field"];
    check_keys(f, "field", {"poly", "box"}, {});
    c.poly = rational_list(f["poly"], "field.poly");
    check_keys(f["box"], "field.box", {"re"}, {"im"});
    auto re = rational_list(f["box"]["re"], "field.box.re");
    if (re.size() != 2) fail("field.box.re", "expected [lo, hi]");
    c.box.re_lo = re[0];
    c.box.re_hi = re[1];
    c.box.im_lo = c.box.im_hi = 0;
    if (f["box"].contains("im")) {
        auto im = rational_list(f["box"]["im"], "field.box.im");
        if (im.size() != 2) fail("field.box.im", "expected [lo, hi]");
        c.box.im_lo = im[0];
        c.box.im_hi = im[1];
    }

    c.base = element(j["base"], "base");
    c.dimension = static_cast<int>(integer(j["dimension"], "dimension", 1));
    if (!j["backend"].is_string()) fail("backend", "expected \"real\" or \"complex\"");
    const auto backend = j["backend"].get<std::string>();
    if (backend == "real")
        c.complex = false;
    else if (backend == "complex")
        c.complex = true;
    else
        fail("backend", "expected \"real\" or \"complex\", got \"" + backend + "\"");
    if (c.complex && c.dimension != 1) fail("dimension", "complex backend requires dimension 1");

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail("mode", "expected a string");
        c.mode = j["mode"].get<std::string>();
        if (c.mode != "equicontractive" && c.mode != "commensurable")
            fail("mode", "expected \"equicontractive\" or \"commensurable\", got \"" + c.mode + "\"");
    }

    const auto& maps = j["maps"];
    if (!maps.is_array() || maps.empty()) fail("maps", "expected a non-empty array");
    const size_t d = c.dimension;
    for (size_t i = 0; i < maps.size(); ++i) {
        const std::string w = "maps[" + std::to_string(i) + "]";
        check_keys(maps[i], w, {"translation", "exponent"}, {"orth"});
        MapConfig m;
        m.exponent = integer(maps[i]["exponent"], w + ".exponent", 1);
        const auto& t = maps[i]["translation"];
        if (!t.is_array() || t.size() != d) fail(w + ".translation", "expected " + std::to_string(d) + " entries");
        for (size_t k = 0; k < d; ++k) m.translation.push_back(element(t[k], w + ".translation[" + std::to_string(k) + "]"));
        if (!maps[i].contains("orth")) {
            if (c.complex) {
                m.orth = {{Q(1)}};
            } else {
                for (size_t a = 0; a < d; ++a)
                    for (size_t b = 0; b < d; ++b) m.orth.push_back({Q(a == b ? 1 : 0)});
            }
        } else if (c.complex) {
            const auto& o = maps[i]["orth"];
            if (!o.is_string()) fail(w + ".orth", "complex orthogonal part must be a rot(...) string");
            m.orth = {parse_rot(o.get<std::string>(), w + ".orth")};
        } else {
            const auto& o = maps[i]["orth"];
            if (!o.is_array() || o.size() != d) fail(w + ".orth", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
            for (size_t a = 0; a < d; ++a) {
                const std::string wr = w + ".orth[" + std::to_string(a) + "]";
                if (!o[a].is_array() || o[a].size() != d) fail(wr, "expected " + std::to_string(d) + " entries");
                for (size_t b = 0; b < d; ++b) m.orth.push_back(element(o[a][b], wr + "[" + std::to_string(b) + "]"));
            }
        }
        c.maps.push_back(std::move(m));
    }

    c.probabilities = rational_list(j["probabilities"], "probabilities");
    if (c.probabilities.size() != c.maps.size())
        fail("probabilities", "expected " + std::to_string(c.maps.size()) + " entries, one per map");

    if (c.mode == "equicontractive") {
        for (size_t i = 1; i < c.maps.size(); ++i)
            if (c.maps[i].exponent != c.maps[0].exponent)
                fail("maps[" + std::to_string(i) + "].exponent", "equicontractive mode needs equal exponents");
    }

    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        check_keys(b, "budgets", {},
                   {"maxNeighborNodes", "maxStates", "pressureN", "maxDirections", "kroneckerBudget", "powerTol",
                    "powerMaxIter"});
        auto& B = c.budgets;
        if (b.contains("maxNeighborNodes")) B.max_neighbor_nodes = integer(b["maxNeighborNodes"], "budgets.maxNeighborNodes", 1);
        if (b.contains("maxStates")) B.max_states = integer(b["maxStates"], "budgets.maxStates", 1);
        if (b.contains("pressureN")) B.pressure_n = static_cast<int>(integer(b["pressureN"], "budgets.pressureN", 2));
        if (b.contains("maxDirections")) B.max_directions = integer(b["maxDirections"], "budgets.maxDirections", 1);
        if (b.contains("kroneckerBudget")) B.kronecker_budget = integer(b["kroneckerBudget"], "budgets.kroneckerBudget", 1);
        if (b.contains("powerMaxIter")) B.power_max_iter = static_cast<int>(integer(b["powerMaxIter"], "budgets.powerMaxIter", 1));
        if (b.contains("powerTol")) {
            if (!b["powerTol"].is_number()) fail("budgets.powerTol", "expected a number");
            B.power_tol = b["powerTol"].get<double>();
            if (!(B.power_tol > 0)) fail("budgets.powerTol", "must be positive");
        }
    }
    return c;
}

IfsConfig IfsConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string IfsConfig::canonical() const {
    ojson j;
    j["name"] = name;
    if (!description.empty()) j["description"] = description;
    ojson f;
    ojson poly = ojson::array();
    for (const auto& q : this->poly) poly.push_back(rational_str(q));
    f["poly"] = poly;
    f["box"]["re"] = {rational_str(box.re_lo), rational_str(box.re_hi)};
    if (!box.is_real()) f["box"]["im"] = {rational_str(box.im_lo), rational_str(box.im_hi)};
    j["field"] = f;
    j["base"] = element_json(base);
    j["dimension"] = dimension;
    j["backend"] = complex ? "complex" : "real";
    j["mode"] = mode;
    ojson ms = ojson::array();
    const size_t d = dimension;
    for (const auto& m : maps) {
        ojson o;
        if (complex) {
            o["orth"] = rot_str(m.orth.at(0));
        } else {
            ojson mat = ojson::array();
            for (size_t a = 0; a < d; ++a) {
                ojson row = ojson::array();
                for (size_t b = 0; b < d; ++b) row.push_back(element_json(m.orth.at(a * d + b)));
                mat.push_back(row);
            }
            o["orth"] = mat;
        }
        ojson t = ojson::array();
        for (const auto& e : m.translation) t.push_back(element_json(e));
        o["translation"] = t;
        o["exponent"] = m.exponent;
        ms.push_back(o);
    }
    j["maps"] = ms;
    ojson p = ojson::array();
    for (const auto& q : probabilities) p.push_back(rational_str(q));
    j["probabilities"] = p;
    ojson b;
    b["maxNeighborNodes"] = budgets.max_neighbor_nodes;
    b["maxStates"] = budgets.max_states;
    b["pressureN"] = budgets.pressure_n;
    b["maxDirections"] = budgets.max_directions;
    b["kroneckerBudget"] = budgets.kronecker_budget;
    b["powerTol"] = budgets.power_tol;
    b["powerMaxIter"] = budgets.power_max_iter;
    j["budgets"] = b;
    return j.dump(2) + "\n";
}

std::string IfsConfig::hash() const { return sha256_hex(canonical()); }

bool IfsConfig::operator==(const IfsConfig& o) const {
    return name == o.name && description == o.description && poly == o.poly && box.re_lo == o.box.re_lo &&
           box.re_hi == o.box.re_hi && box.im_lo == o.box.im_lo && box.im_hi == o.box.im_hi && base == o.base &&
           dimension == o.dimension && complex == o.complex && mode == o.mode && maps == o.maps &&
           probabilities == o.probabilities && budgets == o.budgets;
}

std::shared_ptr<const IFS> IfsConfig::build_ifs() const {
    FieldPtr field;
    try {
        field = Field::create(MinimalPolynomial(poly, box));
    } catch (const std::exception& e) {
        fail("field", e.what());
    }
    SpacePtr sp;
    try {
        sp = Space::create(field, dimension, complex, FieldElement(field, base));
    } catch (const std::exception& e) {
        fail("base", e.what());
    }
    std::vector<Similitude> sims;
    for (size_t i = 0; i < maps.size(); ++i) {
        const auto& m = maps[i];
        std::vector<FieldElement> o, t;
        for (const auto& e : m.orth) o.emplace_back(field, e);
        for (const auto& e : m.translation) t.emplace_back(field, e);
        try {
            sims.emplace_back(sp, m.exponent, o, t);
        } catch (const std::exception& e) {
            fail("maps[" + std::to_string(i) + "]", e.what());
        }
    }
    try {
        return std::make_shared<IFS>(sp, sims, probabilities);
    } catch (const std::exception& e) {
        fail("maps", e.what());
    }
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// ---------------------------------------------------------------- Pipeline

Pipeline::Pipeline(IfsConfig cfg, PipelineOptions opt) : cfg_(std::move(cfg)), opt_(opt) {
    hash_ = cfg_.hash();
    ifs_ = cfg_.build_ifs();
}

Pipeline Pipeline::from_file(const std::string& path, PipelineOptions opt) {
    return Pipeline(IfsConfig::load(path), opt);
}

const std::shared_ptr<const NeighborGraph>& Pipeline::graph() {
    if (!graph_) {
        long n = opt_.max_neighbor_nodes >= 0 ? opt_.max_neighbor_nodes : cfg_.budgets.max_neighbor_nodes;
        graph_ = std::make_shared<NeighborGraph>(ifs_, static_cast<size_t>(n));
    }
    return graph_;
}

bool Pipeline::ftc_verified() { return graph()->status() == ClosureStatus::Finite; }

const std::shared_ptr<const Automaton>& Pipeline::automaton() {
    if (!automaton_) {
        if (!ftc_verified())
            throw Inconclusive("neighbour closure exceeded " + std::to_string(graph()->size()) +
                               " nodes; finite type not verified");
        AutomatonOptions ao;
        ao.max_states = static_cast<size_t>(opt_.max_states >= 0 ? opt_.max_states : cfg_.budgets.max_states);
        ao.exact_atoms = opt_.exact_atoms;
        try {
            automaton_ = std::make_shared<Automaton>(graph_, ao);
        } catch (const AutomatonBudgetExceeded& e) {
            throw Inconclusive(e.what());
        } catch (const TupleBudgetExceeded& e) {
            throw Inconclusive(e.what());
        }
    }
    return automaton_;
}

const std::shared_ptr<const Measure>& Pipeline::measure() {
    if (!measure_) measure_ = std::make_shared<Measure>(automaton());
    return measure_;
}

SpectrumOptions Pipeline::spectrum_options() const {
    SpectrumOptions o;
    o.pressure_n = cfg_.budgets.pressure_n;
    o.max_directions = static_cast<size_t>(cfg_.budgets.max_directions);
    o.kronecker_budget = static_cast<size_t>(cfg_.budgets.kronecker_budget);
    o.power_tol = cfg_.budgets.power_tol;
    o.power_max_iter = cfg_.budgets.power_max_iter;
    return o;
}

Spectrum Pipeline::spectrum(const SpectrumOptions& opt) { return Spectrum(measure(), opt); }

}  // namespace ftc
