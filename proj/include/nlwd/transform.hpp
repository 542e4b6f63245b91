#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nlwd {

// Orthonormal scaling (lowpass) filter. The quadrature-mirror highpass is
// derived as g[k] = (-1)^k h[L-1-k].
struct WaveletFilter {
    std::string name;
    std::vector<double> lowpass;

    std::size_t length() const { return lowpass.size(); }
    std::vector<double> highpass() const;
};

// Supported names: haar, sym6, coif5.
WaveletFilter filter_taps(const std::string& name);
const std::vector<std::string>& supported_filters();

// Periodized pyramid decomposition of a length-2^J signal.
// details[0] is the coarsest detail level (l = 1), details[L-1] the finest
// (l = L); level l holds 2^(J-L+l-1) coefficients. Half-open energy ledger:
// |scaling| + sum |details[l]| = n.
struct CoefficientPyramid {
    std::vector<double> scaling;
    std::vector<std::vector<double>> details;
    std::size_t n = 0;

    int nlevels() const { return static_cast<int>(details.size()); }
    // 1-based level access, l = 1 coarsest
    const std::vector<double>& level(int l) const { return details.at(static_cast<std::size_t>(l - 1)); }
    std::vector<double>& level(int l) { return details.at(static_cast<std::size_t>(l - 1)); }
};

// Deepest decomposition the filter supports without leaving the scaling
// vector shorter than the filter (haar decomposes fully).
int max_levels(std::size_t n, const WaveletFilter& filter);

// Depth used by the denoising pipeline when none is requested: J-4 detail
// levels, clamped to [1, max_levels].
int default_levels(std::size_t n, const WaveletFilter& filter);

// levels == 0 selects max_levels(n, filter).
CoefficientPyramid dwt(const std::vector<double>& signal, const WaveletFilter& filter,
                       int levels = 0);

std::vector<double> idwt(const CoefficientPyramid& pyramid, const WaveletFilter& filter);

}  // namespace nlwd
