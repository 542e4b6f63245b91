#include "nlwd/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "nlwd/errors.hpp"

namespace nlwd {

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

}  // namespace

std::vector<double> read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool two_column = false;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        if (first_content) {
            first_content = false;
            if (line.find(',') != std::string::npos) {
                // header of an index,value file
                two_column = true;
                continue;
            }
        }
        std::string field = line;
        if (two_column) {
            const std::size_t comma = line.find(',');
            if (comma == std::string::npos) {
                throw data_error(path.string() + ":" + std::to_string(lineno) +
                                 ": expected index,value");
            }
            field = strip(line.substr(comma + 1));
        }
        double v = 0.0;
        if (!parse_double(field, v)) {
            throw data_error(path.string() + ":" + std::to_string(lineno) +
                             ": cannot parse '" + field + "' as a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw data_error(path.string() + ": no samples found");
    return values;
}

void write_signal_csv(const std::filesystem::path& path, std::span<const double> signal) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    char buf[40];
    for (double v : signal) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
    }
    if (!out) throw data_error("write failed for " + path.string());
}

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void push_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void push_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string format_name(std::uint16_t code) {
    switch (code) {
        case 1: return "PCM";
        case 3: return "IEEE float";
        case 6: return "A-law";
        case 7: return "mu-law";
        case 0xfffe: return "extensible";
        default: return "format code " + std::to_string(code);
    }
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw data_error(path.string() + ": not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = read_u32(bytes.data() + pos + 4);
        pos += 8;
        if (pos + size > bytes.size()) {
            throw data_error(path.string() + ": truncated chunk " + std::string(id, 4));
        }
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw data_error(path.string() + ": fmt chunk too small");
            format = read_u16(bytes.data() + pos);
            channels = read_u16(bytes.data() + pos + 2);
            sample_rate = read_u32(bytes.data() + pos + 4);
            bits = read_u16(bytes.data() + pos + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + pos;
            data_size = size;
        }
        pos += size + (size & 1);  // chunks are word aligned
    }

    if (!have_fmt || data == nullptr) {
        throw data_error(path.string() + ": missing fmt or data chunk");
    }
    if (format != 1) {
        throw data_error(path.string() + ": unsupported WAV encoding (" +
                         format_name(format) + "); only 16-bit PCM is handled");
    }
    if (bits != 16) {
        throw data_error(path.string() + ": unsupported bit depth " + std::to_string(bits) +
                         "; only 16-bit PCM is handled");
    }
    if (channels < 1 || channels > 2) {
        throw data_error(path.string() + ": " + std::to_string(channels) +
                         " channels; only mono and stereo are handled");
    }

    const std::size_t frames = data_size / (2u * channels);
    AudioBuffer audio;
    audio.sample_rate = static_cast<int>(sample_rate);
    audio.bit_depth = 16;
    audio.channels.assign(channels, std::vector<double>(frames));
    for (std::size_t i = 0; i < frames; ++i) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const unsigned char* p = data + 2 * (i * channels + ch);
            const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            audio.channels[ch][i] = static_cast<double>(v) / 32768.0;
        }
    }
    return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
    if (audio.channels.empty() || audio.channels.size() > 2) {
        throw data_error("write_wav handles mono and stereo only");
    }
    const std::size_t frames = audio.channels.front().size();
    for (const auto& ch : audio.channels) {
        if (ch.size() != frames) throw data_error("write_wav: channel length mismatch");
    }
    if (audio.sample_rate <= 0) throw data_error("write_wav: sample rate must be positive");

    const auto channels = static_cast<std::uint16_t>(audio.channels.size());
    const std::uint32_t data_size = static_cast<std::uint32_t>(2 * frames * channels);

    std::string out;
    out.reserve(44 + data_size);
    out += "RIFF";
    push_u32(out, 36 + data_size);
    out += "WAVEfmt ";
    push_u32(out, 16);
    push_u16(out, 1);  // PCM
    push_u16(out, channels);
    push_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    push_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * channels * 2u);
    push_u16(out, static_cast<std::uint16_t>(channels * 2u));
    push_u16(out, 16);
    out += "data";
    push_u32(out, data_size);
    for (std::size_t i = 0; i < frames; ++i) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const double scaled = std::lround(audio.channels[ch][i] * 32768.0);
            const auto v = static_cast<std::int16_t>(
                std::clamp(scaled, -32768.0, 32767.0));
            push_u16(out, static_cast<std::uint16_t>(v));
        }
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw data_error("write failed for " + path.string());
}

}  // namespace nlwd
