#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amb/corpus.hpp"
#include "amb/text.hpp"

namespace amb::scenealign {

inline constexpr double kDefaultGapPenalty = 0.4;

struct ScriptItem {
    enum class Kind { SceneHeader, Line };
    Kind kind = Kind::Line;
    std::string label;                   // SceneHeader only
    std::optional<std::string> speaker;  // Line only
    std::string text;                    // Line only

    static ScriptItem header(std::string label) { return {Kind::SceneHeader, std::move(label), std::nullopt, {}}; }
    static ScriptItem line(std::string text, std::optional<std::string> speaker = std::nullopt) {
        return {Kind::Line, {}, std::move(speaker), std::move(text)};
    }
    bool is_header() const { return kind == Kind::SceneHeader; }
};

/// Crawled script: scene headers interleaved with dialogue lines. The first
/// item is always a header.
class ScriptDocument {
public:
    /// Throws Error("ParseError") unless items start with a SceneHeader.
    explicit ScriptDocument(std::vector<ScriptItem> items);

    /// Plain-text form: "[SCENE] label" headers, "SPEAKER: text" or bare
    /// lines; blank lines are ignored.
    static ScriptDocument parse(std::string_view text);

    const std::vector<ScriptItem>& items() const { return items_; }
    /// Dialogue lines only, in order. Alignment indices refer to this ordering.
    std::size_t line_count() const { return lines_.size(); }
    const ScriptItem& line(std::size_t line_index) const { return items_[lines_[line_index]]; }
    std::size_t scene_count() const { return headers_.size(); }
    /// Scene ordinal that owns dialogue line `line_index`.
    std::size_t scene_of_line(std::size_t line_index) const { return line_scene_[line_index]; }
    const std::string& scene_label(std::size_t scene) const { return items_[headers_[scene]].label; }

private:
    std::vector<ScriptItem> items_;
    std::vector<std::size_t> lines_;
    std::vector<std::size_t> line_scene_;
    std::vector<std::size_t> headers_;
};

struct AlignmentMap {
    /// (script line index, utterance index), strictly increasing in both.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> skipped_lines;
    std::vector<std::size_t> skipped_utterances;
    double total_score = 0.0;
    std::size_t line_count = 0;
    std::size_t utterance_count = 0;
};

/// Global monotone alignment maximizing the sum of match similarities minus
/// `gap_penalty` per skipped line or utterance. Among optimal alignments
/// (scores within 1e-9) the one whose pair sequence is lexicographically
/// smallest wins, where a present pair sorts before an absent one.
AlignmentMap align_tokens(const std::vector<Tokens>& lines, const std::vector<Tokens>& utterances,
                          double gap_penalty = kDefaultGapPenalty);

/// Throws Error("EmptyInput") if the script has no lines or there are no utterances.
AlignmentMap align_script(const ScriptDocument& script, const std::vector<corpus::Utterance>& utterances,
                          double gap_penalty = kDefaultGapPenalty);

struct ProjectedScene {
    std::string label;
    std::size_t script_scene = 0;  // ordinal of the originating header
    std::size_t start_index = 0;
    std::size_t end_index = 0;     // inclusive
};

struct BoundaryProjection {
    std::vector<ProjectedScene> scenes;
    /// Headers with no matched line, merged into a neighbour (UnanchoredScene).
    std::vector<std::string> unanchored;
};

/// Scene starts at the utterance matched to its first matched line; spans are
/// contiguous and cover [0, utterance_count). Unanchored scenes merge into the
/// preceding scene (or the following one when there is no predecessor).
BoundaryProjection project_boundaries(const AlignmentMap& alignment, const ScriptDocument& script);

}  // namespace amb::scenealign
