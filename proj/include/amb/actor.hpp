#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amb/backend.hpp"
#include "amb/corpus.hpp"
#include "amb/emodb.hpp"
#include "amb/prompt.hpp"

namespace amb::actor {

/// One prior line of the scene and, once the Ear stage has run, its tone.
struct Turn {
    corpus::Utterance utterance;
    std::optional<std::string> caption;
};

/// Everything the Eye stage read: persona, scene, the dialogue leading up to
/// the target line, and the target itself.
struct SceneContext {
    corpus::RoleProfile role_profile;
    std::string scene_id;
    std::string scene_description;
    std::vector<Turn> turns;
    corpus::Utterance target;
    std::size_t target_position = 0;  // within the scene
};

/// Delivery emotion inferred by the Brain stage: 1..256 code points, trimmed,
/// not wrapped in quotes.
class EmotionState {
public:
    static constexpr std::size_t kMaxChars = 256;

    /// Throws Error("InvalidEmotionState") if `text` breaks the invariants.
    explicit EmotionState(std::string text);
    const std::string& text() const { return text_; }
    bool operator==(const EmotionState&) const = default;

private:
    std::string text_;
};

/// Which parts of the pipeline are active. use_context=false requires
/// use_ear=false; use_brain=false replaces retrieval with a seeded draw.
struct AblationConfig {
    bool use_role_profile = true;
    bool use_scene = true;
    bool use_context = true;
    bool use_ear = true;
    bool use_brain = true;
    std::uint64_t seed = 42;

    /// Throws Error("ConfigError").
    void validate() const;

    /// "full", "wo-role-profile", "wo-scene", "wo-context", "wo-ear", "wo-brain".
    /// Throws Error("UnknownAblation").
    static AblationConfig preset(std::string_view name, std::uint64_t seed = 42);
    static const std::vector<std::string>& ablation_names();  // the five, without "full"
    bool operator==(const AblationConfig&) const = default;
};

struct Trace {
    /// (utterance id, caption) for each turn after the Ear stage.
    std::vector<std::pair<std::string, std::optional<std::string>>> captions;
    std::string prompt_text;
    std::optional<std::string> completion;
    AblationConfig config;
};

struct MouthResult {
    std::string retrieved_id;
    std::optional<double> similarity;
    bool retrieval_bypassed = false;
    backends::AudioClip audio;
};

struct PerformanceBundle {
    std::string target_utterance_id;
    std::string role;
    std::optional<EmotionState> emotion_state;
    std::optional<std::string> retrieved_id;
    std::optional<double> similarity;
    bool retrieval_bypassed = false;
    backends::AudioClip audio;
    Trace trace;
};

/// Eye: role profile, scene description, and up to `window` utterances
/// preceding the target (nullopt = the whole scene prefix). Captions absent.
/// Errors: UnknownScene, PositionOutOfRange, RoleMismatch, NoProfile, ConfigError.
SceneContext eye_prepare(const corpus::Corpus& corpus, std::string_view role_name, std::string_view scene_id,
                         std::size_t target_position, std::optional<std::size_t> window = std::nullopt);

/// Ear: caption every turn lacking one, fanning out up to
/// backend.max_parallel() threads. Order-preserving and idempotent.
SceneContext ear_annotate(SceneContext ctx, const backends::Backend& backend, const std::filesystem::path& asset_base = {});

/// `ROLE: "text" [tone: caption]` lines, one per turn, honouring the flags.
std::string dialogue_block(const SceneContext& ctx, const AblationConfig& cfg);
std::string render_prompt(const SceneContext& ctx, const PromptTemplate& tpl, const AblationConfig& cfg);

/// Trim whitespace and one pair of wrapping quotes, collapse line breaks to
/// "; ", then cap at 256 code points. Throws Error("EmptyCompletion").
EmotionState clean_completion(std::string_view completion);
/// Brain: reason(prompt), cleaned. Errors: EmptyPrompt, EmptyCompletion, backend errors.
EmotionState brain_infer(const std::string& prompt, const backends::Backend& backend);

/// Index of the fallback prompt entry used when the Brain stage is off:
/// MMIX LCG seeded with seed ^ FNV-1a(target id), high 32 bits mod db size.
std::size_t fallback_index(std::uint64_t seed, std::string_view target_utterance_id, std::size_t db_size);

/// Mouth: pick a prompt clip (top-1 retrieval, or the seeded fallback when
/// use_brain is false) and synthesize the target text with it.
MouthResult mouth_deliver(const std::optional<EmotionState>& state, const emodb::EmotionDatabase& db,
                          std::string_view target_utterance_id, const std::string& target_text, const AblationConfig& cfg,
                          const backends::Backend& backend, const std::filesystem::path& asset_base = {});

/// Eye -> Ear -> Brain -> Mouth for one target line. Failures are rethrown
/// with Error::stage() set to "eye", "ear", "brain" or "mouth".
PerformanceBundle perform_line(const corpus::Corpus& corpus, std::string_view role_name, std::string_view scene_id,
                               std::size_t target_position, const emodb::EmotionDatabase& db, const PromptTemplate& tpl,
                               const AblationConfig& cfg, const backends::Backend& backend,
                               std::optional<std::size_t> window = std::nullopt);

/// Bundle JSON; `audio` names the WAV file written beside it.
std::string serialize_bundle(const PerformanceBundle& bundle, const std::string& wav_name);
/// Writes <dir>/<stem>.json and <dir>/<stem>.wav.
void write_bundle(const PerformanceBundle& bundle, const std::filesystem::path& dir, const std::string& stem);

}  // namespace amb::actor
