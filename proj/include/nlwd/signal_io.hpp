#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace nlwd {

// One numeric value per line, or "index,value" rows under a header line.
// Values survive a write/read round trip exactly (17 significant digits).
std::vector<double> read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, std::span<const double> signal);

struct AudioBuffer {
    std::vector<std::vector<double>> channels;  // samples in [-1, 1]
    int sample_rate = 0;
    int bit_depth = 16;
};

// 16-bit PCM RIFF/WAVE, mono or stereo; samples scale by 1/32768 on read.
AudioBuffer read_wav(const std::filesystem::path& path);

// Quantizes with rounding and clamps to [-32768, 32767].
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace nlwd
