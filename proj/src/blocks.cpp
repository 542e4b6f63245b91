#include "nlwd/blocks.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlwd/errors.hpp"

namespace nlwd {

void BlockPlan::validate(std::size_t signal_length) const {
    if (block_size == 0 || (block_size & (block_size - 1)) != 0) {
        throw data_error("block size must be a power of two, got " + std::to_string(block_size));
    }
    if (overlap >= block_size) {
        throw data_error("overlap must be smaller than the block size");
    }
    if (overlap > 0 && window != Window::hann) {
        throw data_error("overlapping blocks require the hann window");
    }
    if (block_size > signal_length) {
        throw data_error("block size " + std::to_string(block_size) +
                         " exceeds signal length " + std::to_string(signal_length));
    }
}

std::vector<double> process_blocks(std::span<const double> signal, const BlockPlan& plan,
                                   const BlockProcessor& per_block) {
    plan.validate(signal.size());
    const std::size_t n = signal.size();
    const std::size_t B = plan.block_size;

    auto run_block = [&](std::size_t start, std::size_t index) {
        std::vector<double> chunk(B, 0.0);  // zero-pad past the end
        const std::size_t take = std::min(B, n - start);
        for (std::size_t k = 0; k < take; ++k) chunk[k] = signal[start + k];
        std::vector<double> processed = per_block(chunk, index);
        if (processed.size() != B) {
            throw data_error("block processor returned " + std::to_string(processed.size()) +
                             " samples, expected " + std::to_string(B));
        }
        return processed;
    };

    if (plan.overlap == 0) {
        std::vector<double> out(n);
        std::size_t index = 0;
        for (std::size_t start = 0; start < n; start += B, ++index) {
            const std::vector<double> processed = run_block(start, index);
            const std::size_t take = std::min(B, n - start);
            for (std::size_t k = 0; k < take; ++k) out[start + k] = processed[k];
        }
        return out;
    }

    // half-sample-offset Hann: strictly positive, so the weight sum never
    // vanishes at the edges
    std::vector<double> w(B);
    for (std::size_t k = 0; k < B; ++k) {
        w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (k + 0.5) /
                                     static_cast<double>(B)));
    }

    const std::size_t hop = B - plan.overlap;
    std::vector<double> acc(n, 0.0), wsum(n, 0.0);
    std::size_t index = 0;
    for (std::size_t start = 0; start < n; start += hop, ++index) {
        const std::vector<double> processed = run_block(start, index);
        const std::size_t take = std::min(B, n - start);
        for (std::size_t k = 0; k < take; ++k) {
            acc[start + k] += w[k] * processed[k];
            wsum[start + k] += w[k];
        }
        if (start + B >= n) break;  // this block already covered the tail
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = acc[i] / wsum[i];
    return out;
}

}  // namespace nlwd
