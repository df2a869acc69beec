#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "amb/corpus.hpp"

namespace amb::scenealign {

struct RoleCell {
    std::size_t count = 0;
    double duration_s = 0.0;
};

/// One episode of the utterance-level table; `cells` follows StatsTables::role_columns.
struct UtteranceRow {
    std::string episode_id;
    std::vector<RoleCell> cells;
    RoleCell total;
};

/// One episode of the scene-level table.
struct SceneRow {
    std::string episode_id;
    std::size_t scene_count = 0;
    std::size_t covered_utterances = 0;  // sum of scene span lengths
    std::size_t role_slots = 0;          // sum over scenes of distinct speakers

    double avg_utterances() const;
    double avg_roles() const;
};

struct StatsTables {
    /// Corpus roles in manifest order, then OTHERS.
    std::vector<std::string> role_columns;
    std::vector<UtteranceRow> utterance_rows;
    UtteranceRow utterance_all;
    std::vector<SceneRow> scene_rows;
    SceneRow scene_all;
};

StatsTables compute_stats(const corpus::Corpus& c);

/// "H:MM:SS", seconds rounded half-up, hours unpadded.
std::string format_duration(double seconds);
/// Inverse of format_duration. Throws Error("ParseError").
double parse_duration(std::string_view hms);

std::string utterance_stats_csv(const StatsTables& t);
std::string scene_stats_csv(const StatsTables& t);
std::string utterance_stats_text(const StatsTables& t);
std::string scene_stats_text(const StatsTables& t);

}  // namespace amb::scenealign
