#include <httplib.h>

#include <nlohmann/json.hpp>

#include "amb/backend.hpp"
#include "amb/error.hpp"

namespace amb::backends {

namespace {

using nlohmann::json;

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {url, {}};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

std::string audio_b64(const AudioSource& audio) {
    if (const auto* path = std::get_if<std::filesystem::path>(&audio)) return base64_encode(encode_wav(read_wav(*path)));
    return base64_encode(encode_wav(std::get<AudioClip>(audio)));
}

json parse_reply(const std::string& body, const std::string& path) {
    try {
        return json::parse(body);
    } catch (const json::parse_error&) {
        throw Error("ProtocolError", path + ": reply is not JSON");
    }
}

std::string string_field(const json& reply, const char* key, const std::string& path) {
    auto it = reply.find(key);
    if (it == reply.end() || !it->is_string()) throw Error("ProtocolError", path + ": reply lacks string field \"" + key + "\"");
    return it->get<std::string>();
}

}  // namespace

void CountingLimiter::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return permits_ > 0; });
    --permits_;
}

void CountingLimiter::release() {
    {
        std::lock_guard lock(mu_);
        ++permits_;
    }
    cv_.notify_one();
}

RemoteBackend::RemoteBackend(BackendConfig config) : config_(std::move(config)), limiter_(config_.max_parallel) {
    config_.mode = BackendMode::Remote;
    config_.validate();
}

std::string RemoteBackend::post(const std::string& path, const std::string& body) const {
    CountingLimiter::Guard permit(limiter_);
    const auto ep = split_url(config_.base_url);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto full = ep.prefix + path;
    auto res = client.Post(full, body, "application/json");
    if (!res) throw Error("BackendUnavailable", full + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        std::string code = "BackendError";
        std::string message = full + ": HTTP " + std::to_string(res->status);
        try {
            const auto err = json::parse(res->body).at("error");
            code = err.at("code").get<std::string>();
            message = full + ": " + err.at("message").get<std::string>();
        } catch (const json::exception&) {
        }
        throw Error(code, message);
    }
    return res->body;
}

std::string RemoteBackend::transcribe(const AudioSource& audio) const {
    const auto reply = parse_reply(post("/v1/transcribe", json{{"audio_b64", audio_b64(audio)}}.dump()), "/v1/transcribe");
    return string_field(reply, "text", "/v1/transcribe");
}

std::string RemoteBackend::caption_emotion(const AudioSource& audio) const {
    const auto reply = parse_reply(post("/v1/emotion_caption", json{{"audio_b64", audio_b64(audio)}}.dump()), "/v1/emotion_caption");
    return string_field(reply, "caption", "/v1/emotion_caption");
}

std::string RemoteBackend::reason(const std::string& prompt) const {
    if (prompt.empty()) throw Error("EmptyPrompt", "reasoning prompt is empty");
    const auto reply = parse_reply(post("/v1/reason", json{{"prompt", prompt}}.dump()), "/v1/reason");
    return string_field(reply, "text", "/v1/reason");
}

std::vector<EmbeddingVector> RemoteBackend::embed(const std::vector<std::string>& texts) const {
    if (texts.empty()) throw Error("EmptyInput", "embed requires at least one text");
    const auto reply = parse_reply(post("/v1/embed", json{{"texts", texts}}.dump()), "/v1/embed");
    try {
        const auto dim = reply.at("dim").get<std::size_t>();
        const auto& vectors = reply.at("vectors");
        if (vectors.size() != texts.size()) throw Error("ProtocolError", "/v1/embed: vector count does not match input count");
        std::vector<EmbeddingVector> out;
        out.reserve(vectors.size());
        for (const auto& v : vectors) {
            EmbeddingVector e{v.get<std::vector<double>>()};
            if (e.dim() != dim || dim == 0) throw Error("ProtocolError", "/v1/embed: vector dimension does not match \"dim\"");
            out.push_back(std::move(e));
        }
        return out;
    } catch (const json::exception& e) {
        throw Error("ProtocolError", std::string("/v1/embed: ") + e.what());
    }
}

AudioClip RemoteBackend::synthesize(const std::string& text, const AudioClip& prompt_clip) const {
    if (text.empty()) throw Error("EmptyText", "nothing to synthesize");
    check_clip(prompt_clip);
    const json request{{"text", text}, {"prompt_audio_b64", base64_encode(encode_wav(prompt_clip))}};
    const auto reply = parse_reply(post("/v1/synthesize", request.dump()), "/v1/synthesize");
    auto clip = decode_wav(base64_decode(string_field(reply, "audio_b64", "/v1/synthesize")));
    if (auto it = reply.find("sample_rate_hz"); it != reply.end() && it->is_number_unsigned() && it->get<std::uint32_t>() != clip.sample_rate_hz)
        throw Error("ProtocolError", "/v1/synthesize: sample_rate_hz disagrees with the WAV header");
    check_clip(clip);
    return clip;
}

bool RemoteBackend::healthy() const {
    CountingLimiter::Guard permit(limiter_);
    const auto ep = split_url(config_.base_url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
    auto res = client.Get(ep.prefix + "/v1/health");
    if (!res || res->status != 200) return false;
    try {
        return json::parse(res->body).at("status") == "ok";
    } catch (const json::exception&) {
        return false;
    }
}

}  // namespace amb::backends
