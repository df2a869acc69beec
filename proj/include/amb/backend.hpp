#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "amb/audio.hpp"

namespace amb::backends {

enum class BackendMode { Mock, Remote };

struct BackendConfig {
    BackendMode mode = BackendMode::Mock;
    std::string base_url;  // remote only, e.g. "http://127.0.0.1:8080"
    int timeout_ms = 30000;
    std::size_t max_parallel = 1;
    std::uint64_t seed = 42;

    /// Throws Error("ConfigError") when an invariant is broken.
    void validate() const;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

/// Audio is either an asset on disk or an in-memory clip.
using AudioSource = std::variant<std::filesystem::path, AudioClip>;

/// Every model call the pipeline makes. Implementations must be callable from
/// up to max_parallel() threads at once.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string transcribe(const AudioSource& audio) const = 0;
    virtual std::string caption_emotion(const AudioSource& audio) const = 0;
    virtual std::string reason(const std::string& prompt) const = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const = 0;
    virtual AudioClip synthesize(const std::string& text, const AudioClip& prompt_clip) const = 0;

    virtual std::size_t max_parallel() const = 0;
};

/// Deterministic in-process stand-ins.
///
/// - transcribe: contents of "<audio>.txt" (trailing line break removed);
///   MissingSidecar when absent or when given an in-memory clip.
/// - caption_emotion: trimmed "<audio>.emotion.txt", else "neutral, steady tone".
/// - reason: "<ROLE> responds with <LAST_TONE>" from the "#ROLE:" and
///   "#LAST_TONE:" marker lines, else "neutral delivery".
/// - embed: 64-dim FNV-1a bag of normalized tokens, L2-normalized; a text with
///   no tokens maps to the unit vector at index 0.
/// - synthesize: 16 kHz sine, max(200 ms, 60 ms per code point), frequency
///   150 + (FNV-1a of the prompt's first 64 samples as LE bytes) mod 200 Hz.
class MockBackend final : public Backend {
public:
    static constexpr std::size_t kEmbeddingDim = 64;
    static constexpr const char* kDefaultCaption = "neutral, steady tone";
    static constexpr const char* kDefaultReasoning = "neutral delivery";

    explicit MockBackend(BackendConfig config = {});

    std::string transcribe(const AudioSource& audio) const override;
    std::string caption_emotion(const AudioSource& audio) const override;
    std::string reason(const std::string& prompt) const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;
    AudioClip synthesize(const std::string& text, const AudioClip& prompt_clip) const override;
    std::size_t max_parallel() const override { return config_.max_parallel; }

    static EmbeddingVector embed_one(const std::string& text);
    static double tone_frequency_hz(const AudioClip& prompt_clip);

private:
    BackendConfig config_;
};

/// Blocking counting semaphore sized at runtime.
class CountingLimiter {
public:
    explicit CountingLimiter(std::size_t permits) : permits_(permits) {}
    void acquire();
    void release();

    class Guard {
    public:
        explicit Guard(CountingLimiter& l) : l_(l) { l_.acquire(); }
        ~Guard() { l_.release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        CountingLimiter& l_;
    };

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::size_t permits_;
};

/// HTTP/JSON client for the /v1/* wire protocol. Connection failures and
/// timeouts raise BackendUnavailable; non-2xx replies raise an Error carrying
/// the server's error code.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(BackendConfig config);

    std::string transcribe(const AudioSource& audio) const override;
    std::string caption_emotion(const AudioSource& audio) const override;
    std::string reason(const std::string& prompt) const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;
    AudioClip synthesize(const std::string& text, const AudioClip& prompt_clip) const override;
    std::size_t max_parallel() const override { return config_.max_parallel; }

    /// GET /v1/health; true when the server answers {"status":"ok"}.
    bool healthy() const;

private:
    std::string post(const std::string& path, const std::string& body) const;

    BackendConfig config_;
    mutable CountingLimiter limiter_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace amb::backends
