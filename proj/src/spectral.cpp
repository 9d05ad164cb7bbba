#include "muonlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "muonlab/errors.hpp"

namespace muonlab {

namespace {

constexpr double kZeroSigma = 1e-300;

}  // namespace

double svd_entropy(const std::vector<double>& sigma, std::size_t n) {
    if (n == 0) throw ValueError("svd_entropy: n must be positive");
    if (sigma.size() != n) {
        throw ValueError("svd_entropy: expected exactly n singular values, got " +
                         std::to_string(sigma.size()) + " for n = " +
                         std::to_string(n));
    }

    double sum_sq = 0.0;
    for (double s : sigma) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw ValueError("svd_entropy: singular values must be finite and >= 0");
        }
        if (s > kZeroSigma) sum_sq += s * s;
    }
    if (sum_sq == 0.0) {
        throw NumericsError("svd_entropy: all singular values are zero");
    }
    if (n == 1) return 0.0;

    double acc = 0.0;
    for (double s : sigma) {
        if (s <= kZeroSigma) continue;  // p = 0 contributes nothing
        const double p = (s * s) / sum_sq;
        acc -= p * std::log(p);
    }
    const double h = acc / std::log(static_cast<double>(n));
    // The math guarantees [0, 1]; clamp away the last-ulp excursions.
    return std::clamp(h, 0.0, 1.0);
}

GroupedSpectra spectrum_report(
    const std::vector<std::pair<std::string, Matrix>>& weights,
    const std::map<std::string, std::string>& groups) {
    GroupedSpectra out;
    std::map<std::string, std::pair<double, std::size_t>> group_acc;

    for (const auto& [name, w] : weights) {
        const auto git = groups.find(name);
        if (git == groups.end()) {
            throw ValueError("spectrum_report: no group for param '" + name + "'");
        }

        if (w.empty()) {
            throw ValueError("spectrum_report: param '" + name + "' is empty");
        }

        SpectrumReport report;
        report.name = name;
        report.group = git->second;
        try {
            const SvdResult decomp = svd(w);
            const std::vector<double>& s = decomp.singular_values;
            report.entropy = svd_entropy(s, s.size());
            const double top = s.front();  // sorted descending
            report.normalized_singular_values.reserve(s.size());
            for (double v : s) report.normalized_singular_values.push_back(v / top);
        } catch (const NumericsError& e) {
            throw NumericsError("spectrum_report: param '" + name + "': " + e.what());
        }

        auto& [sum, count] = group_acc[report.group];
        sum += report.entropy;
        count += 1;
        out.per_param.push_back(std::move(report));
    }

    for (const auto& [group, acc] : group_acc) {
        out.group_entropy[group] = acc.first / static_cast<double>(acc.second);
    }
    return out;
}

}  // namespace muonlab
