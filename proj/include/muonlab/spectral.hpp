#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "muonlab/matrix.hpp"

namespace muonlab {

// Normalized Shannon entropy of the squared-singular-value distribution:
//   H = -(1/log n) * sum_i p_i log p_i,  p_i = sigma_i^2 / sum_j sigma_j^2.
// sigma must hold exactly n values (zeros included — n is min(rows, cols)
// for a matrix spectrum). Values below 1e-300 count as zero and contribute
// nothing. H is clamped to [0, 1]; n = 1 returns 0 (a single-value spectrum
// carries no spread). Throws ValueError for bad lengths or negative values,
// NumericsError when every value is zero.
double svd_entropy(const std::vector<double>& sigma, std::size_t n);

// Per-parameter spectrum diagnostics: singular values divided by the largest
// (descending, first entry exactly 1 for nonzero matrices) plus the entropy.
struct SpectrumReport {
    std::string name;
    std::string group;
    std::vector<double> normalized_singular_values;
    double entropy = 0.0;
};

struct GroupedSpectra {
    std::vector<SpectrumReport> per_param;          // input order
    std::map<std::string, double> group_entropy;    // macro-average per group
};

// Run the full pipeline over named weights. Every name must appear in
// `groups`; SVD failures are rethrown with the parameter name attached.
GroupedSpectra spectrum_report(
    const std::vector<std::pair<std::string, Matrix>>& weights,
    const std::map<std::string, std::string>& groups);

}  // namespace muonlab
