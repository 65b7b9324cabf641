#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ftc/config.hpp"

#ifndef FTC_SOURCE_DIR
#define FTC_SOURCE_DIR "."
#endif

namespace testutil {

inline std::string config_path(const std::string& name) {
    return std::string(FTC_SOURCE_DIR) + "/configs/" + name + ".json";
}

inline ftc::Pipeline load(const std::string& name, ftc::PipelineOptions opt = {}) {
    return ftc::Pipeline::from_file(config_path(name), opt);
}

inline const std::vector<std::string>& bundled() {
    static const std::vector<std::string> names{"cantor-1-3",         "lebesgue-1-2",       "golden-bernoulli",
                                                "golden-gasket-conjugated", "complex-pisot-demo", "commensurable-osc"};
    return names;
}

// Lebesgue measure of the points lying in every `inside` interval and in no `outside` one
inline ftc::Q atom_length(const std::vector<std::pair<ftc::Q, ftc::Q>>& inside,
                          const std::vector<std::pair<ftc::Q, ftc::Q>>& outside) {
    using ftc::Q;
    std::vector<Q> cuts;
    for (const auto* set : {&inside, &outside})
        for (const auto& [a, b] : *set) {
            cuts.push_back(a);
            cuts.push_back(b);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Q total = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Q mid = (cuts[i] + cuts[i + 1]) / 2;
        bool in = true;
        for (const auto& [a, b] : inside) in = in && a <= mid && mid <= b;
        for (const auto& [a, b] : outside) in = in && !(a <= mid && mid <= b);
        if (in) total += cuts[i + 1] - cuts[i];
    }
    return total;
}

// image of [0,1] under a similitude over a rational field
inline std::pair<ftc::Q, ftc::Q> unit_image(const ftc::Similitude& m) {
    const auto& f = m.space()->field();
    ftc::Q a = m.apply({ftc::FieldElement::zero(f)})[0].coeffs()[0];
    ftc::Q b = m.apply({ftc::FieldElement::one(f)})[0].coeffs()[0];
    if (b < a) std::swap(a, b);
    return {a, b};
}

// tau solving sum p_i^q rho_i^(-tau) = 1 by bisection
inline double moran_tau(const std::vector<double>& p, const std::vector<double>& rho, double q) {
    auto F = [&](double t) {
        double s = 0;
        for (size_t i = 0; i < p.size(); ++i) s += std::pow(p[i], q) * std::pow(rho[i], -t);
        return s - 1;
    };
    double lo = -100, hi = 100;  // F increasing in tau
    for (int it = 0; it < 300; ++it) {
        double mid = 0.5 * (lo + hi);
        (F(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testutil
