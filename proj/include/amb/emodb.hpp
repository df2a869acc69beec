#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "amb/backend.hpp"
#include "amb/corpus.hpp"

namespace amb::emodb {

using backends::EmbeddingVector;

struct EmotionEntry {
    std::string utterance_id;
    std::string caption;
    EmbeddingVector embedding;
    std::string audio;  // asset reference of the performed speech

    bool operator==(const EmotionEntry&) const = default;
};

/// One role's previously performed speech, indexed by emotion caption
/// embeddings. Immutable after build/load.
struct EmotionDatabase {
    std::string role;
    std::size_t dim = 0;
    std::vector<EmotionEntry> entries;

    bool operator==(const EmotionDatabase&) const = default;
};

/// Caption every utterance (paths resolved against `asset_base`), embed the
/// captions in one batch, one entry per utterance in input order.
/// Errors: EmptyInput, PreconditionViolation (foreign role or duplicate id),
/// and anything the backend raises. Nothing is returned on failure.
EmotionDatabase build_database(const std::string& role, const std::vector<corpus::Utterance>& utterances,
                               const backends::Backend& backend, const std::filesystem::path& asset_base = {});

/// dot(u, v) / (|u| |v|). Errors: DimMismatch, ZeroVector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

struct Match {
    const EmotionEntry* entry = nullptr;
    double similarity = 0.0;
};

/// Highest-cosine entry against an already-embedded query; ties go to the
/// lexicographically smallest utterance_id. Error: EmptyDatabase.
Match nearest(const EmotionDatabase& db, const EmbeddingVector& query);

/// Embeds `state` with the backend, then nearest().
Match query_top1(const EmotionDatabase& db, const std::string& state, const backends::Backend& backend);

/// JSON lines: header {"version":1,"role","dim","count"}, then one entry per
/// line. Embedding components are written with 17 significant digits.
std::string serialize_database(const EmotionDatabase& db);
EmotionDatabase parse_database(std::string_view text);
void persist_database(const EmotionDatabase& db, const std::filesystem::path& path);
/// Errors: ParseError (naming the offending line), VersionMismatch.
EmotionDatabase load_database(const std::filesystem::path& path);

}  // namespace amb::emodb
