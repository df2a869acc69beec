#include "amb/audio.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "amb/error.hpp"

namespace amb::backends {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_u16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[at + static_cast<std::size_t>(i)]);
    return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<std::uint8_t>(b[at]) | (static_cast<std::uint8_t>(b[at + 1]) << 8));
}

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

bool is_supported_sample_rate(std::uint32_t hz) {
    return hz == 16000 || hz == 22050 || hz == 24000 || hz == 44100;
}

void check_clip(const AudioClip& clip) {
    if (!is_supported_sample_rate(clip.sample_rate_hz))
        throw Error("InvalidAudio", "unsupported sample rate " + std::to_string(clip.sample_rate_hz));
    if (clip.samples.empty()) throw Error("InvalidAudio", "audio clip has no samples");
}

std::string encode_wav(const AudioClip& clip) {
    const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, clip.sample_rate_hz);
    put_u32(out, clip.sample_rate_hz * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (std::int16_t s : clip.samples) put_u16(out, static_cast<std::uint16_t>(s));
    return out;
}

AudioClip decode_wav(std::string_view b) {
    if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
        throw Error("InvalidAudio", "not a RIFF/WAVE file");

    AudioClip clip;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= b.size()) {
        const auto id = b.substr(pos, 4);
        const std::size_t size = get_u32(b, pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > b.size()) throw Error("InvalidAudio", "truncated WAV chunk");
        if (id == "fmt ") {
            if (size < 16) throw Error("InvalidAudio", "short fmt chunk");
            if (get_u16(b, body) != 1 || get_u16(b, body + 2) != 1 || get_u16(b, body + 14) != 16)
                throw Error("InvalidAudio", "only PCM16 mono WAV is supported");
            clip.sample_rate_hz = get_u32(b, body + 4);
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw Error("InvalidAudio", "data chunk before fmt chunk");
            clip.samples.resize(size / 2);
            for (std::size_t i = 0; i < clip.samples.size(); ++i)
                clip.samples[i] = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
            return clip;
        }
        pos = body + size + (size & 1);
    }
    throw Error("InvalidAudio", "WAV has no data chunk");
}

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read audio " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return decode_wav(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write audio " + path.string());
    out << encode_wav(clip);
}

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) | (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                                static_cast<std::uint8_t>(bytes[i + 2]);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest) {
        std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
        if (rest == 2) v |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::string base64_decode(std::string_view text) {
    static const auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (std::size_t i = 0; i < kAlphabet.size(); ++i) t[static_cast<std::uint8_t>(kAlphabet[i])] = static_cast<int>(i);
        return t;
    }();
    if (text.size() % 4 != 0) throw Error("ParseError", "base64 length is not a multiple of 4");

    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const bool last = i + 4 == text.size();
        int pad = 0;
        std::uint32_t v = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && last && k >= 2) {
                ++pad;
                v <<= 6;
                continue;
            }
            const int d = table[static_cast<std::uint8_t>(c)];
            if (d < 0 || pad) throw Error("ParseError", "invalid base64 character");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out += static_cast<char>((v >> 16) & 0xFF);
        if (pad < 2) out += static_cast<char>((v >> 8) & 0xFF);
        if (pad < 1) out += static_cast<char>(v & 0xFF);
    }
    return out;
}

}  // namespace amb::backends
