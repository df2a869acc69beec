#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amb/align.hpp"
#include "amb/corpus.hpp"
#include "amb/emodb.hpp"
#include "amb/hash.hpp"

namespace amb::testkit {

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

/// Uniform helpers over the MMIX generator so fixtures are identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : lcg_{seed} {}
    std::uint64_t next() { return lcg_.next(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>((lcg_.next() >> 11) % n); }
    double uniform() { return static_cast<double>(lcg_.next() >> 11) / 9007199254740992.0; }
    bool chance(double p) { return uniform() < p; }

private:
    MmixLcg lcg_;
};

// Published utterance-level table: one row per episode, seven role columns
// (Rachel, Monica, Phoebe, Joey, Chandler, Ross, OTHERS) plus TOTAL.
struct UtteranceTableRow {
    const char* episode;
    std::array<int, 8> counts;
    std::array<const char*, 8> durations;
};
extern const std::array<const char*, 7> kUtteranceTableRoles;
extern const std::vector<UtteranceTableRow> kUtteranceTable;

// Published scene-level table.
struct SceneTableRow {
    const char* episode;
    int scenes;
    double avg_utterances;
    double avg_roles;
};
extern const std::vector<SceneTableRow> kSceneTable;

/// 24 episodes whose per-role counts and durations format to the published
/// utterance table. Each episode is cut into its published number of scenes.
corpus::Corpus utterance_table_corpus();

/// 24 episodes whose scene counts, covered utterances and distinct-speaker
/// slots reproduce the published scene table.
corpus::Corpus scene_table_corpus();

/// Script with known true scene starts, and utterances transcribed from it
/// with word noise and some lines missing.
struct NoisyAlignmentFixture {
    scenealign::ScriptDocument script;
    std::vector<corpus::Utterance> utterances;
    std::vector<std::size_t> true_starts;
    std::vector<std::size_t> dropped_lines;
};
NoisyAlignmentFixture noisy_alignment_fixture(std::uint64_t seed = 7, std::size_t lines = 30, std::size_t scenes = 5,
                                              double word_noise = 0.10, std::size_t dropped = 2);

/// Short caption drawn from a small emotion vocabulary, so repeats and
/// exact similarity ties are common.
std::string random_caption(Rng& rng);

/// Database of mock-embedded random captions; utterance ids are unique but
/// not in insertion order.
emodb::EmotionDatabase random_mock_database(Rng& rng, std::size_t entries);

/// Writes a small corpus with WAV assets and mock sidecars under `dir`:
/// six roles, two episodes, scene ids "ep1_s1", "ep1_s2", "ep2_s1".
/// Returns the manifest path.
std::filesystem::path write_demo_corpus(const std::filesystem::path& dir);

}  // namespace amb::testkit
