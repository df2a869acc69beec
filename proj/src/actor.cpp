#include "amb/actor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "amb/error.hpp"
#include "amb/hash.hpp"

namespace amb::actor {

namespace {

constexpr std::string_view kWhitespace = " \t\r\n";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(kWhitespace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kWhitespace);
    return s.substr(first, last - first + 1);
}

std::size_t code_points(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

/// Byte length of the first `n` code points.
std::size_t prefix_bytes(std::string_view s, std::size_t n) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (seen == n) return i;
            ++seen;
        }
    }
    return s.size();
}

std::string_view strip_quotes(std::string_view s) {
    static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
        {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};
    for (const auto& [open, close] : kPairs) {
        if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close))
            return s.substr(open.size(), s.size() - open.size() - close.size());
    }
    return s;
}

bool wrapped_in_quotes(std::string_view s) { return strip_quotes(s).size() != s.size(); }

std::string one_line(std::string_view s) {
    std::string out(s);
    std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
    return out;
}

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

}  // namespace

EmotionState::EmotionState(std::string text) : text_(std::move(text)) {
    if (text_.empty()) throw Error("InvalidEmotionState", "emotion state is empty");
    if (code_points(text_) > kMaxChars) throw Error("InvalidEmotionState", "emotion state exceeds 256 characters");
    if (trim(text_).size() != text_.size()) throw Error("InvalidEmotionState", "emotion state has surrounding whitespace");
    if (wrapped_in_quotes(text_)) throw Error("InvalidEmotionState", "emotion state is wrapped in quotes");
    if (text_.find_first_of("\r\n") != std::string::npos) throw Error("InvalidEmotionState", "emotion state spans several lines");
}

void AblationConfig::validate() const {
    if (!use_context && use_ear) throw Error("ConfigError", "the Ear stage needs dialogue context (use_context=false requires use_ear=false)");
}

const std::vector<std::string>& AblationConfig::ablation_names() {
    static const std::vector<std::string> names{"wo-role-profile", "wo-scene", "wo-context", "wo-ear", "wo-brain"};
    return names;
}

AblationConfig AblationConfig::preset(std::string_view name, std::uint64_t seed) {
    AblationConfig c;
    c.seed = seed;
    if (name == "full") return c;
    if (name == "wo-role-profile") c.use_role_profile = false;
    else if (name == "wo-scene") c.use_scene = false;
    else if (name == "wo-context") c.use_context = c.use_ear = false;
    else if (name == "wo-ear") c.use_ear = false;
    else if (name == "wo-brain") c.use_role_profile = c.use_scene = c.use_context = c.use_ear = c.use_brain = false;
    else throw Error("UnknownAblation", "unknown ablation \"" + std::string(name) + "\"");
    return c;
}

SceneContext eye_prepare(const corpus::Corpus& corpus, std::string_view role_name, std::string_view scene_id,
                         std::size_t target_position, std::optional<std::size_t> window) {
    if (window && *window == 0) throw Error("ConfigError", "context window must be positive");
    const auto dialogue = corpus::scene_dialogue(corpus, scene_id);
    if (target_position >= dialogue.size())
        throw Error("PositionOutOfRange", "position " + std::to_string(target_position) + " is outside scene \"" + std::string(scene_id) +
                                              "\" of " + std::to_string(dialogue.size()) + " utterances");
    const auto& target = dialogue[target_position];
    if (target.role != role_name)
        throw Error("RoleMismatch", "line \"" + target.id + "\" is spoken by \"" + target.role + "\", not \"" + std::string(role_name) + "\"");
    const auto* profile = corpus.find_role(role_name);
    if (!profile) throw Error("NoProfile", "no role profile for \"" + std::string(role_name) + "\"");

    SceneContext ctx;
    ctx.role_profile = *profile;
    ctx.scene_id = std::string(scene_id);
    ctx.scene_description = corpus::locate_scene(corpus, scene_id).scene->description;
    ctx.target = target;
    ctx.target_position = target_position;
    const std::size_t first = window ? target_position - std::min(*window, target_position) : 0;
    for (std::size_t i = first; i < target_position; ++i) ctx.turns.push_back({dialogue[i], std::nullopt});
    return ctx;
}

SceneContext ear_annotate(SceneContext ctx, const backends::Backend& backend, const std::filesystem::path& asset_base) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < ctx.turns.size(); ++i)
        if (!ctx.turns[i].caption) pending.push_back(i);
    if (pending.empty()) return ctx;

    auto caption_one = [&](std::size_t turn) {
        std::filesystem::path p(ctx.turns[turn].utterance.audio);
        if (!p.is_absolute() && !asset_base.empty()) p = asset_base / p;
        ctx.turns[turn].caption = backend.caption_emotion(p);
    };

    const std::size_t workers = std::min(std::max<std::size_t>(backend.max_parallel(), 1), pending.size());
    if (workers == 1) {
        for (auto i : pending) caption_one(i);
        return ctx;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < pending.size(); k = next++) {
                    try {
                        caption_one(pending[k]);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) failure = std::current_exception();
                        next = pending.size();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return ctx;
}

std::string dialogue_block(const SceneContext& ctx, const AblationConfig& cfg) {
    if (!cfg.use_context) return {};
    std::string out;
    for (const auto& turn : ctx.turns) {
        if (!out.empty()) out += '\n';
        out += turn.utterance.role + ": \"" + one_line(turn.utterance.text) + "\"";
        if (cfg.use_ear && turn.caption) out += " [tone: " + one_line(*turn.caption) + "]";
    }
    return out;
}

std::string render_prompt(const SceneContext& ctx, const PromptTemplate& tpl, const AblationConfig& cfg) {
    cfg.validate();
    std::string last_caption = "none";
    if (cfg.use_context && cfg.use_ear && !ctx.turns.empty() && ctx.turns.back().caption)
        last_caption = one_line(*ctx.turns.back().caption);

    return tpl.fill({
        {"role_profile", cfg.use_role_profile ? ctx.role_profile.profile : std::string()},
        {"scene_description", cfg.use_scene ? ctx.scene_description : std::string()},
        {"dialogue_block", dialogue_block(ctx, cfg)},
        {"target_line", one_line(ctx.target.text)},
        {"role_name", ctx.role_profile.name},
        {"last_caption", last_caption},
    });
}

EmotionState clean_completion(std::string_view completion) {
    auto unwrap = [](std::string_view v) {
        v = trim(v);
        while (wrapped_in_quotes(v)) v = trim(strip_quotes(v));
        return v;
    };
    const std::string_view s = unwrap(completion);

    std::string flat;
    flat.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '\n' || s[i] == '\r') {
            while (!flat.empty() && (flat.back() == ' ' || flat.back() == '\t')) flat.pop_back();
            while (i < s.size() && kWhitespace.find(s[i]) != std::string_view::npos) ++i;
            flat += "; ";
        } else {
            flat += s[i++];
        }
    }
    flat.resize(prefix_bytes(flat, EmotionState::kMaxChars));
    const auto cleaned = unwrap(flat);
    if (cleaned.empty()) throw Error("EmptyCompletion", "reasoner returned no usable emotion state");
    return EmotionState(std::string(cleaned));
}

EmotionState brain_infer(const std::string& prompt, const backends::Backend& backend) {
    if (prompt.empty()) throw Error("EmptyPrompt", "reasoning prompt is empty");
    return clean_completion(backend.reason(prompt));
}

std::size_t fallback_index(std::uint64_t seed, std::string_view target_utterance_id, std::size_t db_size) {
    MmixLcg lcg(seed ^ fnv1a64(target_utterance_id));
    return static_cast<std::size_t>(lcg.next_below(db_size));
}

MouthResult mouth_deliver(const std::optional<EmotionState>& state, const emodb::EmotionDatabase& db,
                          std::string_view target_utterance_id, const std::string& target_text, const AblationConfig& cfg,
                          const backends::Backend& backend, const std::filesystem::path& asset_base) {
    if (db.entries.empty()) throw Error("EmptyDatabase", "emotion database for \"" + db.role + "\" is empty");
    if (target_text.empty()) throw Error("EmptyText", "target line is empty");

    MouthResult out;
    const emodb::EmotionEntry* entry = nullptr;
    if (cfg.use_brain) {
        if (!state) throw Error("PreconditionViolation", "retrieval needs an emotion state");
        const auto match = emodb::query_top1(db, state->text(), backend);
        entry = match.entry;
        out.similarity = match.similarity;
    } else {
        entry = &db.entries[fallback_index(cfg.seed, target_utterance_id, db.entries.size())];
        out.retrieval_bypassed = true;
    }
    out.retrieved_id = entry->utterance_id;

    std::filesystem::path clip_path(entry->audio);
    if (!clip_path.is_absolute() && !asset_base.empty()) clip_path = asset_base / clip_path;
    out.audio = backend.synthesize(target_text, backends::read_wav(clip_path));
    return out;
}

PerformanceBundle perform_line(const corpus::Corpus& corpus, std::string_view role_name, std::string_view scene_id,
                               std::size_t target_position, const emodb::EmotionDatabase& db, const PromptTemplate& tpl,
                               const AblationConfig& cfg, const backends::Backend& backend, std::optional<std::size_t> window) {
    in_stage("config", [&] { cfg.validate(); });

    PerformanceBundle bundle;
    bundle.trace.config = cfg;

    auto ctx = in_stage("eye", [&] { return eye_prepare(corpus, role_name, scene_id, target_position, window); });
    bundle.target_utterance_id = ctx.target.id;
    bundle.role = ctx.role_profile.name;

    if (cfg.use_ear) ctx = in_stage("ear", [&] { return ear_annotate(std::move(ctx), backend, corpus.base_dir); });
    for (const auto& t : ctx.turns) bundle.trace.captions.emplace_back(t.utterance.id, t.caption);

    if (cfg.use_brain) {
        in_stage("brain", [&] {
            bundle.trace.prompt_text = render_prompt(ctx, tpl, cfg);
            if (bundle.trace.prompt_text.empty()) throw Error("EmptyPrompt", "rendered prompt is empty");
            bundle.trace.completion = backend.reason(bundle.trace.prompt_text);
            bundle.emotion_state = clean_completion(*bundle.trace.completion);
        });
    }

    auto mouth = in_stage("mouth", [&] {
        return mouth_deliver(bundle.emotion_state, db, ctx.target.id, ctx.target.text, cfg, backend, corpus.base_dir);
    });
    bundle.retrieved_id = std::move(mouth.retrieved_id);
    bundle.similarity = mouth.similarity;
    bundle.retrieval_bypassed = mouth.retrieval_bypassed;
    bundle.audio = std::move(mouth.audio);
    return bundle;
}

std::string serialize_bundle(const PerformanceBundle& b, const std::string& wav_name) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["target_utterance_id"] = b.target_utterance_id;
    j["role"] = b.role;
    j["emotion_state"] = b.emotion_state ? ordered_json(b.emotion_state->text()) : ordered_json(nullptr);
    j["retrieved_id"] = b.retrieved_id ? ordered_json(*b.retrieved_id) : ordered_json(nullptr);
    j["similarity"] = b.similarity ? ordered_json(*b.similarity) : ordered_json(nullptr);
    j["retrieval_bypassed"] = b.retrieval_bypassed;
    j["audio"] = wav_name;

    ordered_json captions = ordered_json::array();
    for (const auto& [id, caption] : b.trace.captions) {
        ordered_json c;
        c["utterance_id"] = id;
        c["caption"] = caption ? ordered_json(*caption) : ordered_json(nullptr);
        captions.push_back(std::move(c));
    }
    ordered_json config;
    config["use_role_profile"] = b.trace.config.use_role_profile;
    config["use_scene"] = b.trace.config.use_scene;
    config["use_context"] = b.trace.config.use_context;
    config["use_ear"] = b.trace.config.use_ear;
    config["use_brain"] = b.trace.config.use_brain;
    config["seed"] = b.trace.config.seed;

    ordered_json trace;
    trace["captions"] = std::move(captions);
    trace["prompt_text"] = b.trace.prompt_text;
    trace["completion"] = b.trace.completion ? ordered_json(*b.trace.completion) : ordered_json(nullptr);
    trace["config"] = std::move(config);
    j["trace"] = std::move(trace);
    return j.dump(2) + "\n";
}

void write_bundle(const PerformanceBundle& bundle, const std::filesystem::path& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    const std::string wav_name = stem + ".wav";
    backends::write_wav(dir / wav_name, bundle.audio);
    std::ofstream out(dir / (stem + ".json"), std::ios::binary);
    if (!out) throw Error("IoError", "cannot write bundle " + (dir / (stem + ".json")).string());
    out << serialize_bundle(bundle, wav_name);
}

}  // namespace amb::actor
