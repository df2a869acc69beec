#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "amb/backend.hpp"
#include "amb/error.hpp"
#include "amb/hash.hpp"
#include "amb/text.hpp"

namespace amb::backends {

namespace {

constexpr std::uint32_t kSynthRate = 16000;
constexpr double kSynthAmplitude = 8000.0;
constexpr std::size_t kMinSynthMs = 200;
constexpr std::size_t kMsPerChar = 60;
constexpr std::size_t kPromptHashSamples = 64;

std::optional<std::string> read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const char* suffix) {
    return std::filesystem::path(p.string() + suffix);
}

std::size_t code_points(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::optional<std::string> marker_value(const std::string& prompt, std::string_view marker) {
    std::istringstream in(prompt);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with(marker)) return trim(std::string_view(line).substr(marker.size()));
    }
    return std::nullopt;
}

}  // namespace

void BackendConfig::validate() const {
    if (mode == BackendMode::Remote && base_url.empty()) throw Error("ConfigError", "remote backend requires a base URL");
    if (timeout_ms <= 0) throw Error("ConfigError", "timeout_ms must be positive");
    if (max_parallel < 1) throw Error("ConfigError", "max_parallel must be at least 1");
}

MockBackend::MockBackend(BackendConfig config) : config_(std::move(config)) { config_.validate(); }

std::string MockBackend::transcribe(const AudioSource& audio) const {
    const auto* path = std::get_if<std::filesystem::path>(&audio);
    if (!path) throw Error("MissingSidecar", "mock transcription needs an asset path, not an in-memory clip");
    const auto sidecar = with_suffix(*path, ".txt");
    auto text = read_text_file(sidecar);
    if (!text) throw Error("MissingSidecar", "no transcript sidecar " + sidecar.string());
    while (!text->empty() && (text->back() == '\n' || text->back() == '\r')) text->pop_back();
    return *text;
}

std::string MockBackend::caption_emotion(const AudioSource& audio) const {
    if (const auto* path = std::get_if<std::filesystem::path>(&audio)) {
        if (auto text = read_text_file(with_suffix(*path, ".emotion.txt"))) {
            auto caption = trim(*text);
            if (!caption.empty()) return caption;
        }
    }
    return kDefaultCaption;
}

std::string MockBackend::reason(const std::string& prompt) const {
    if (prompt.empty()) throw Error("EmptyPrompt", "reasoning prompt is empty");
    const auto role = marker_value(prompt, "#ROLE:");
    const auto tone = marker_value(prompt, "#LAST_TONE:");
    if (!role || !tone) return kDefaultReasoning;
    return *role + " responds with " + *tone;
}

EmbeddingVector MockBackend::embed_one(const std::string& text) {
    EmbeddingVector v{std::vector<double>(kEmbeddingDim, 0.0)};
    const auto tokens = scenealign::normalize_text(text);
    if (tokens.empty()) {
        v.values[0] = 1.0;
        return v;
    }
    for (const auto& t : tokens) v.values[fnv1a64(t) % kEmbeddingDim] += 1.0;
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
    return v;
}

std::vector<EmbeddingVector> MockBackend::embed(const std::vector<std::string>& texts) const {
    if (texts.empty()) throw Error("EmptyInput", "embed requires at least one text");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

double MockBackend::tone_frequency_hz(const AudioClip& prompt_clip) {
    const std::size_t n = std::min(prompt_clip.samples.size(), kPromptHashSamples);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::uint16_t>(prompt_clip.samples[i]);
        bytes.push_back(static_cast<std::uint8_t>(s & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(s >> 8));
    }
    return 150.0 + static_cast<double>(fnv1a64(bytes) % 200);
}

AudioClip MockBackend::synthesize(const std::string& text, const AudioClip& prompt_clip) const {
    if (text.empty()) throw Error("EmptyText", "nothing to synthesize");
    check_clip(prompt_clip);

    const std::size_t ms = std::max(kMinSynthMs, kMsPerChar * code_points(text));
    const std::size_t count = kSynthRate / 1000 * ms;
    const double freq = tone_frequency_hz(prompt_clip);

    AudioClip out;
    out.sample_rate_hz = kSynthRate;
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double phase = 2.0 * std::numbers::pi * freq * static_cast<double>(i) / kSynthRate;
        out.samples[i] = static_cast<std::int16_t>(std::lround(kSynthAmplitude * std::sin(phase)));
    }
    return out;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    if (config.mode == BackendMode::Remote) return std::make_unique<RemoteBackend>(config);
    return std::make_unique<MockBackend>(config);
}

}  // namespace amb::backends
