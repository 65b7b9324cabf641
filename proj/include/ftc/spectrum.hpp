#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ftc/measure.hpp"

namespace ftc {

struct EssentialClass {
    std::vector<int> states;  // automaton state ids, ascending
    std::vector<int> dims;    // v*(state)
    std::vector<int> offset;  // block offsets into H; size states.size() + 1
    std::vector<std::vector<int>> succ;  // class-local successor lists
    QMat H;                              // sum of the class matrices, L x L
    int terminal_components = 1;         // how many terminal components were found
    int dimension() const { return offset.back(); }
    bool scalar() const;  // every v* equals 1
};

struct IrreducibilityResult {
    bool ok = false;
    int r = 0;
    double delta = 0;  // lower bound on the least positive entry of sum_{i<=r} H^i
    std::vector<std::pair<int, int>> zero_pattern;  // filled on failure
};

enum class PressureMethod { FiniteN, IntegerSpectral, ScalarSpectral };
std::string method_name(PressureMethod m);

struct PressureEstimate {
    double q = 0;
    double value = 0;  // point estimate of P(q)
    double lower = 0, upper = 0;
    int n = 0;  // word length (finite-n) or power iterations (spectral)
    PressureMethod method = PressureMethod::FiniteN;
};

struct TauPoint {
    double q = 0;
    double tau = 0, lower = 0, upper = 0;
    int n = 0;
    PressureMethod method = PressureMethod::FiniteN;
};

struct SpectrumCurve {
    std::vector<TauPoint> points;
    double max_width = 0;        // largest tau bound width
    double smoothness_jump = 0;  // max jump between neighbouring symmetric difference quotients
    double max_second_difference = 0;
};

struct SpectrumOptions {
    int pressure_n = 24;
    size_t max_directions = 1500000;  // DP entries per step before n is capped
    size_t kronecker_budget = 4000000;
    double power_tol = 1e-12;
    int power_max_iter = 200000;
    bool integer_q_exact = false;  // use the Kronecker route for integer grid points
    int threads = 1;
};

class IrreducibilityFailure : public InvariantViolation {
public:
    using InvariantViolation::InvariantViolation;
};

EssentialClass essential_class(const Measure& m);
IrreducibilityResult irreducibility_check(const QMat& H);

class Spectrum {
public:
    explicit Spectrum(std::shared_ptr<const Measure> m, SpectrumOptions opt = {});

    const EssentialClass& essential() const { return cls_; }
    const IrreducibilityResult& irreducibility() const { return irr_; }
    double log_rho() const { return log_rho_; }
    double bridging_constant(double q) const;  // C = q |log delta| + log t

    PressureEstimate pressure_finite_n(double q, int n) const;
    // batched form: one DP pass shared by all q
    std::vector<PressureEstimate> pressure_finite_n(const std::vector<double>& qs, int n) const;
    PressureEstimate pressure_integer_q(int q) const;
    PressureEstimate pressure_scalar(double q) const;  // scalar classes only

    TauPoint tau(double q) const;
    SpectrumCurve lq_curve(const std::vector<double>& grid) const;

private:
    TauPoint to_tau(const PressureEstimate& p) const;
    std::vector<PressureEstimate> finite_n_batch(const std::vector<double>& qs, int n, int* used_n) const;

    std::shared_ptr<const Measure> m_;
    SpectrumOptions opt_;
    EssentialClass cls_;
    IrreducibilityResult irr_;
    double log_rho_ = 0;
    // class-local transition blocks in double: T[a][k] is the block to succ[a][k]
    std::vector<std::vector<std::vector<std::vector<double>>>> T_;
    std::vector<std::vector<double>> vstar_;  // v restricted to star, per class state
    std::vector<std::vector<double>> start_;  // row sums of sum_k T(k, i) within the class
};

std::vector<double> parse_grid(const std::string& spec);  // "a:b:step"

}  // namespace ftc
