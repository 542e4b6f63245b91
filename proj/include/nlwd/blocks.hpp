#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlwd {

// Segmentation of a long signal into fixed-size blocks for independent
// per-block processing. overlap = 0 concatenates disjoint blocks; with
// overlap, blocks advance by block_size - overlap and are recombined by
// Hann-weighted averaging normalized by the summed window, so a
// pass-through processor reproduces the input.
struct BlockPlan {
    std::size_t block_size = 4096;
    std::size_t overlap = 0;
    enum class Window { none, hann } window = Window::none;

    void validate(std::size_t signal_length) const;
};

using BlockProcessor =
    std::function<std::vector<double>(const std::vector<double>&, std::size_t block_index)>;

std::vector<double> process_blocks(std::span<const double> signal, const BlockPlan& plan,
                                   const BlockProcessor& per_block);

}  // namespace nlwd
