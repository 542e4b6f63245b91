#include "nlwd/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "nlwd/errors.hpp"

namespace nlwd {

namespace {

// 1/sqrt(2)
constexpr double kInvSqrt2 = 0.70710678118654752;

const std::vector<double> kHaar = {kInvSqrt2, kInvSqrt2};

// Daubechies least-asymmetric, 6 vanishing moments (12 taps) and coiflet,
// 5 vanishing moments (30 taps). Values from the standard constructions
// (spectral factorization / moment equations) evaluated in 60-digit
// arithmetic and rounded to double. The unit tests assert the lowpass
// conditions sum h = sqrt(2), sum h^2 = 1 and all even-shift
// orthogonality relations to 1e-12.
const std::vector<double> kSym6 = {
    0.015404109327044824,   0.0034907120842221625, -0.11799011114852003,
    -0.048311742585698055,  0.49105594192797373,   0.787641141028651,
    0.33792942172816583,   -0.072637522786376583,  -0.021060292512370848,
    0.044724901770781385,   0.0017677118642540077, -0.0078007083250323804,
};

const std::vector<double> kCoif5 = {
    -9.6040101127678921e-8, -1.6237995172048335e-7, 2.0612203985788782e-6,
    3.7007277113394795e-6,  -2.1270221672515614e-5, -4.1219861924265502e-5,
    0.00014035632812373243, 0.00030185794166824475, -0.00063755892612588111,
    -0.0016616273039298788, 0.0024315754425382885,  0.0067615202206204168,
    -0.009159507338676163,  -0.019758391600965465,  0.032674799467057351,
    0.041287530472117831,   -0.10556315130733723,   -0.062037751574981951,
    0.43798230665916332,    0.77429362286032745,    0.42157126673075435,
    -0.052046670253554757,  -0.091921588060086083,  0.028169744270532352,
    0.023408322118927783,   -0.010131584846900275,  -0.0041593126275786397,
    0.0021782943778456948,  0.00035857774116175769, -0.000212081862067494,
};

bool is_power_of_two(std::size_t n) { return n > 0 && std::has_single_bit(n); }

int log2_of(std::size_t n) { return std::countr_zero(n); }

// One analysis step: x (even length m) -> approx, detail of length m/2.
// Periodic (wrap-around) indexing; valid for any even m, including m
// shorter than the filter.
void analyze(const std::vector<double>& x, const std::vector<double>& h,
             const std::vector<double>& g, std::vector<double>& approx,
             std::vector<double>& detail) {
    const std::size_t m = x.size();
    const std::size_t half = m / 2;
    const std::size_t taps = h.size();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        std::size_t idx = 2 * k;
        for (std::size_t j = 0; j < taps; ++j) {
            const double v = x[idx];
            a += h[j] * v;
            d += g[j] * v;
            if (++idx == m) idx = 0;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

// Adjoint of analyze (= inverse, the transform is orthogonal).
std::vector<double> synthesize(const std::vector<double>& approx,
                               const std::vector<double>& detail,
                               const std::vector<double>& h,
                               const std::vector<double>& g) {
    const std::size_t half = approx.size();
    const std::size_t m = 2 * half;
    const std::size_t taps = h.size();
    std::vector<double> x(m, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        const double a = approx[k];
        const double d = detail[k];
        std::size_t idx = 2 * k;
        for (std::size_t j = 0; j < taps; ++j) {
            x[idx] += h[j] * a + g[j] * d;
            if (++idx == m) idx = 0;
        }
    }
    return x;
}

}  // namespace

std::vector<double> WaveletFilter::highpass() const {
    const std::size_t taps = lowpass.size();
    std::vector<double> g(taps);
    for (std::size_t k = 0; k < taps; ++k) {
        const double v = lowpass[taps - 1 - k];
        g[k] = (k % 2 == 0) ? v : -v;
    }
    return g;
}

const std::vector<std::string>& supported_filters() {
    static const std::vector<std::string> names = {"haar", "sym6", "coif5"};
    return names;
}

WaveletFilter filter_taps(const std::string& name) {
    if (name == "haar") return {name, kHaar};
    if (name == "sym6") return {name, kSym6};
    if (name == "coif5") return {name, kCoif5};
    std::ostringstream msg;
    msg << "unknown wavelet '" << name << "'; supported:";
    for (const auto& s : supported_filters()) msg << ' ' << s;
    throw data_error(msg.str());
}

int max_levels(std::size_t n, const WaveletFilter& filter) {
    const int J = log2_of(n);
    if (filter.length() <= 2) return J;
    int levels = 0;
    std::size_t len = n;
    while (len / 2 >= filter.length()) {
        len /= 2;
        ++levels;
    }
    return std::max(levels, 1);
}

int default_levels(std::size_t n, const WaveletFilter& filter) {
    const int J = log2_of(n);
    return std::clamp(J - 4, 1, max_levels(n, filter));
}

CoefficientPyramid dwt(const std::vector<double>& signal, const WaveletFilter& filter,
                       int levels) {
    const std::size_t n = signal.size();
    if (!is_power_of_two(n) || n < 8) {
        throw data_error("dwt requires a power-of-two signal length >= 8, got " +
                         std::to_string(n));
    }
    const int J = log2_of(n);
    if (levels == 0) levels = max_levels(n, filter);
    if (levels < 1 || levels > J) {
        throw data_error("dwt depth " + std::to_string(levels) +
                         " out of range [1, " + std::to_string(J) + "]");
    }

    const std::vector<double> g = filter.highpass();
    CoefficientPyramid p;
    p.n = n;
    p.details.resize(static_cast<std::size_t>(levels));

    std::vector<double> current = signal;
    std::vector<double> approx, detail;
    for (int step = 0; step < levels; ++step) {
        analyze(current, filter.lowpass, g, approx, detail);
        // first step produces the finest level, stored last
        p.details[static_cast<std::size_t>(levels - 1 - step)] = detail;
        current.swap(approx);
    }
    p.scaling = std::move(current);
    return p;
}

std::vector<double> idwt(const CoefficientPyramid& pyramid, const WaveletFilter& filter) {
    const int levels = pyramid.nlevels();
    if (levels < 1) throw data_error("idwt: pyramid has no detail levels");
    std::size_t expect = pyramid.scaling.size();
    if (expect == 0) throw data_error("idwt: empty scaling vector");
    for (int l = 1; l <= levels; ++l) {
        if (pyramid.level(l).size() != expect) {
            throw data_error("idwt: level " + std::to_string(l) + " has " +
                             std::to_string(pyramid.level(l).size()) +
                             " coefficients, expected " + std::to_string(expect));
        }
        expect *= 2;
    }
    if (expect != pyramid.n) {
        throw data_error("idwt: pyramid sizes sum to " + std::to_string(expect) +
                         " but n = " + std::to_string(pyramid.n));
    }

    const std::vector<double> g = filter.highpass();
    std::vector<double> current = pyramid.scaling;
    for (int l = 1; l <= levels; ++l) {
        current = synthesize(current, pyramid.level(l), filter.lowpass, g);
    }
    return current;
}

}  // namespace nlwd
