#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftc/measure.hpp"
#include "ftc/spectrum.hpp"

namespace ftc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// FTC could not be verified within the configured budgets
class Inconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ElementLiteral = std::vector<Q>;  // coefficients in the power basis of the generator

struct MapConfig {
    std::vector<ElementLiteral> orth;  // d*d row-major (real) or a single unit (complex)
    std::vector<ElementLiteral> translation;
    long exponent = 1;
    bool operator==(const MapConfig&) const = default;
};

struct Budgets {
    long max_neighbor_nodes = 200000;
    long max_states = 20000;
    int pressure_n = 24;
    long max_directions = 1500000;
    long kronecker_budget = 4000000;
    double power_tol = 1e-12;
    int power_max_iter = 200000;
    bool operator==(const Budgets&) const = default;
};

struct IfsConfig {
    std::string name;
    std::string description;
    std::vector<Q> poly;  // low to high, monic
    RootBox box;
    ElementLiteral base;
    int dimension = 1;
    bool complex = false;
    std::string mode = "equicontractive";
    std::vector<MapConfig> maps;
    std::vector<Q> probabilities;
    Budgets budgets;

    static IfsConfig parse(const std::string& text);  // throws ConfigError
    static IfsConfig load(const std::string& path);
    std::string canonical() const;  // parse(canonical()) == *this, and canonical() is a fixed point
    std::string hash() const;       // hex SHA-256 of canonical()

    // builds and validates the field, space and maps; throws ConfigError
    std::shared_ptr<const IFS> build_ifs() const;

    bool operator==(const IfsConfig& o) const;
};

struct PipelineOptions {
    long max_states = -1;   // overrides the config budget when >= 0
    long max_neighbor_nodes = -1;
    bool exact_atoms = true;
};

class Pipeline {
public:
    explicit Pipeline(IfsConfig cfg, PipelineOptions opt = {});
    static Pipeline from_file(const std::string& path, PipelineOptions opt = {});

    const IfsConfig& config() const { return cfg_; }
    const std::string& config_hash() const { return hash_; }
    const std::shared_ptr<const IFS>& ifs() const { return ifs_; }

    // lazily built stages; graph() does not throw on an unbounded closure
    const std::shared_ptr<const NeighborGraph>& graph();
    bool ftc_verified();
    const std::shared_ptr<const Automaton>& automaton();  // throws Inconclusive
    const std::shared_ptr<const Measure>& measure();
    SpectrumOptions spectrum_options() const;
    Spectrum spectrum(const SpectrumOptions& opt);

private:
    IfsConfig cfg_;
    PipelineOptions opt_;
    std::string hash_;
    std::shared_ptr<const IFS> ifs_;
    std::shared_ptr<const NeighborGraph> graph_;
    std::shared_ptr<const Automaton> automaton_;
    std::shared_ptr<const Measure> measure_;
};

std::string sha256_hex(const std::string& data);

}  // namespace ftc
