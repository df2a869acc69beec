#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amb::backends {

/// Mono PCM16 clip.
struct AudioClip {
    std::uint32_t sample_rate_hz = 16000;
    std::vector<std::int16_t> samples;

    bool operator==(const AudioClip&) const = default;
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

bool is_supported_sample_rate(std::uint32_t hz);
/// Throws Error("InvalidAudio") on unsupported rate or empty samples.
void check_clip(const AudioClip& clip);

/// Canonical 44-byte-header RIFF/WAVE, PCM16 mono, little-endian.
std::string encode_wav(const AudioClip& clip);
/// Accepts any chunk layout; requires PCM format 1, one channel, 16 bits.
AudioClip decode_wav(std::string_view bytes);

AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

std::string base64_encode(std::string_view bytes);
/// Throws Error("ParseError") on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace amb::backends
