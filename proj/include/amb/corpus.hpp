#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace amb::corpus {

/// Reserved speaker label for everyone outside the main cast. It may appear
/// on utterances but never has a RoleProfile.
inline constexpr std::string_view kOthers = "OTHERS";

struct Utterance {
    std::string id;
    std::string episode_id;
    std::string role;
    std::string text;
    std::string audio;  // asset reference, relative to the manifest directory
    double start_s = 0.0;
    double end_s = 0.0;

    double duration() const { return end_s - start_s; }
    bool operator==(const Utterance&) const = default;
};

/// Inclusive span [start_index, end_index] of utterance positions within one episode.
struct Scene {
    std::string id;
    std::string episode_id;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    std::string description;

    std::size_t size() const { return end_index - start_index + 1; }
    bool operator==(const Scene&) const = default;
};

struct RoleProfile {
    std::string name;
    std::string profile;
    bool operator==(const RoleProfile&) const = default;
};

struct Episode {
    std::string id;
    std::vector<Utterance> utterances;
    std::vector<Scene> scenes;
    bool operator==(const Episode&) const = default;
};

/// Utterance / scene / role hierarchy. Immutable once loaded; share by const&.
struct Corpus {
    std::vector<Episode> episodes;
    std::vector<RoleProfile> roles;
    /// Directory asset references resolve against. Not serialized.
    std::filesystem::path base_dir;

    bool operator==(const Corpus& o) const { return episodes == o.episodes && roles == o.roles; }

    std::size_t utterance_count() const;
    std::size_t scene_count() const;
    const Episode* find_episode(std::string_view id) const;
    const RoleProfile* find_role(std::string_view name) const;
    std::filesystem::path resolve_asset(std::string_view ref) const;
};

struct ScenePosition {
    const Episode* episode = nullptr;
    const Scene* scene = nullptr;
};

/// Throws Error("UnknownScene") when absent.
ScenePosition locate_scene(const Corpus& c, std::string_view scene_id);

// Manifest I/O ---------------------------------------------------------------

/// Parses a manifest without checking invariants (see validate_corpus).
/// Errors: ParseError, MissingField (message names the JSON path).
Corpus parse_manifest(std::string_view json_text, std::filesystem::path base_dir = {});
Corpus load_manifest(const std::filesystem::path& path);

/// Canonical form: fixed key order, 2-space indent, UTF-8, LF, trailing newline.
std::string serialize_manifest(const Corpus& c);
void save_manifest(const Corpus& c, const std::filesystem::path& path);

// Validation -----------------------------------------------------------------

struct Violation {
    std::string type;  // "utterance", "scene", "role", "episode"
    std::string id;
    std::string message;
    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_corpus(const Corpus& c);

// Queries --------------------------------------------------------------------

/// Partition by episode id, preserving order; roles are copied to both halves.
/// Throws Error("UnknownEpisode") if a test id is not in the corpus.
std::pair<Corpus, Corpus> split_episodes(const Corpus& c, const std::set<std::string>& test_ids);

/// Utterances [start_index, end_index] of the scene, in order.
std::vector<Utterance> scene_dialogue(const Corpus& c, std::string_view scene_id);

}  // namespace amb::corpus
