#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <numbers>
#include <sstream>

#include "amb/audio.hpp"
#include "amb/backend.hpp"
#include "amb/stats.hpp"

namespace amb::testkit {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("amb-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const std::array<const char*, 7> kUtteranceTableRoles{"Rachel", "Monica", "Phoebe", "Joey", "Chandler", "Ross", "OTHERS"};

const std::vector<UtteranceTableRow> kUtteranceTable{
    {"SE01_01", {86, 82, 22, 39, 33, 63, 25, 350}, {"0:03:15", "0:03:08", "0:00:54", "0:01:42", "0:01:23", "0:02:45", "0:01:07", "0:14:13"}},
    {"SE01_02", {56, 37, 21, 11, 29, 101, 97, 352}, {"0:02:36", "0:01:15", "0:00:44", "0:00:23", "0:01:10", "0:04:16", "0:03:44", "0:14:09"}},
    {"SE01_03", {32, 76, 65, 28, 72, 53, 39, 365}, {"0:01:12", "0:02:36", "0:02:20", "0:01:04", "0:02:37", "0:01:54", "0:01:31", "0:13:14"}},
    {"SE01_04", {81, 65, 47, 36, 49, 57, 36, 371}, {"0:03:16", "0:02:27", "0:01:52", "0:01:15", "0:01:55", "0:02:36", "0:01:23", "0:14:44"}},
    {"SE01_05", {48, 40, 29, 58, 50, 73, 48, 346}, {"0:02:01", "0:01:44", "0:00:57", "0:02:23", "0:01:51", "0:03:30", "0:02:05", "0:14:31"}},
    {"SE01_06", {22, 54, 22, 52, 114, 32, 52, 348}, {"0:00:57", "0:02:12", "0:00:48", "0:02:15", "0:04:22", "0:01:28", "0:02:02", "0:14:04"}},
    {"SE01_07", {49, 21, 44, 38, 61, 71, 27, 311}, {"0:02:00", "0:00:43", "0:01:52", "0:01:26", "0:02:47", "0:03:04", "0:00:52", "0:12:45"}},
    {"SE01_08", {23, 45, 27, 15, 60, 75, 94, 339}, {"0:01:00", "0:01:34", "0:00:59", "0:00:31", "0:02:09", "0:03:07", "0:03:41", "0:13:02"}},
    {"SE01_09", {64, 74, 31, 43, 54, 65, 34, 365}, {"0:02:28", "0:02:45", "0:01:13", "0:01:28", "0:02:07", "0:02:43", "0:01:20", "0:14:04"}},
    {"SE01_10", {32, 22, 58, 20, 54, 53, 77, 316}, {"0:01:28", "0:00:50", "0:02:21", "0:00:46", "0:01:54", "0:02:10", "0:03:20", "0:12:49"}},
    {"SE01_11", {28, 48, 49, 44, 53, 78, 66, 366}, {"0:01:03", "0:01:46", "0:01:54", "0:01:41", "0:01:46", "0:02:43", "0:02:23", "0:13:15"}},
    {"SE01_12", {49, 38, 49, 36, 39, 71, 30, 312}, {"0:02:04", "0:01:29", "0:01:51", "0:01:26", "0:01:22", "0:02:45", "0:01:18", "0:12:14"}},
    {"SE01_13", {26, 15, 27, 52, 41, 14, 106, 281}, {"0:01:15", "0:00:30", "0:01:16", "0:02:12", "0:01:35", "0:00:41", "0:05:01", "0:12:30"}},
    {"SE01_14", {19, 20, 17, 32, 51, 53, 83, 275}, {"0:00:52", "0:00:50", "0:00:50", "0:01:14", "0:01:55", "0:02:31", "0:03:49", "0:12:02"}},
    {"SE01_15", {25, 44, 39, 32, 70, 35, 24, 269}, {"0:00:57", "0:02:04", "0:01:34", "0:01:15", "0:02:55", "0:01:32", "0:01:01", "0:11:19"}},
    {"SE01_16", {27, 13, 41, 22, 59, 36, 75, 273}, {"0:01:08", "0:00:36", "0:02:03", "0:01:01", "0:02:34", "0:01:39", "0:03:17", "0:12:17"}},
    {"SE01_17", {54, 63, 33, 30, 25, 50, 102, 357}, {"0:02:05", "0:02:40", "0:01:29", "0:01:13", "0:01:04", "0:02:12", "0:03:56", "0:14:38"}},
    {"SE01_18", {84, 38, 34, 21, 33, 59, 9, 278}, {"0:03:42", "0:01:31", "0:01:25", "0:00:55", "0:01:16", "0:02:18", "0:00:20", "0:11:27"}},
    {"SE01_19", {91, 35, 18, 19, 27, 88, 40, 318}, {"0:04:04", "0:01:21", "0:00:45", "0:00:51", "0:01:06", "0:03:58", "0:01:38", "0:13:43"}},
    {"SE01_20", {85, 30, 21, 34, 62, 22, 69, 323}, {"0:03:51", "0:01:13", "0:00:48", "0:01:32", "0:02:32", "0:01:05", "0:02:57", "0:13:58"}},
    {"SE01_21", {34, 64, 11, 21, 25, 51, 67, 273}, {"0:01:26", "0:03:03", "0:00:34", "0:00:57", "0:01:10", "0:02:35", "0:03:09", "0:12:53"}},
    {"SE01_22", {27, 50, 53, 16, 50, 41, 40, 277}, {"0:01:05", "0:02:16", "0:02:07", "0:00:38", "0:02:03", "0:01:42", "0:01:53", "0:11:44"}},
    {"SE01_23", {24, 25, 35, 34, 22, 68, 102, 310}, {"0:01:02", "0:00:55", "0:01:40", "0:01:28", "0:00:57", "0:02:44", "0:04:23", "0:13:09"}},
    {"SE01_24", {64, 35, 19, 62, 28, 36, 34, 278}, {"0:02:59", "0:01:39", "0:00:54", "0:02:30", "0:01:15", "0:01:34", "0:01:38", "0:12:28"}},
};

const std::vector<SceneTableRow> kSceneTable{
    {"SE01_01", 14, 17.29, 3.93},
    {"SE01_02", 8, 29.75, 5.38},
    {"SE01_03", 13, 20.0, 4.85},
    {"SE01_04", 16, 15.75, 4.19},
    {"SE01_05", 16, 14.94, 3.31},
    {"SE01_06", 9, 24.33, 4.78},
    {"SE01_07", 21, 11.14, 2.95},
    {"SE01_08", 10, 16.9, 4.50},
    {"SE01_09", 12, 19.08, 3.92},
    {"SE01_10", 8, 29.0, 6.00},
    {"SE01_11", 12, 23.92, 4.50},
    {"SE01_12", 15, 17.33, 4.33},
    {"SE01_13", 13, 18.69, 4.31},
    {"SE01_14", 17, 11.12, 3.41},
    {"SE01_15", 14, 17.43, 3.43},
    {"SE01_16", 14, 19.5, 5.07},
    {"SE01_17", 14, 20.14, 4.14},
    {"SE01_18", 8, 33.38, 6.25},
    {"SE01_19", 8, 31.38, 5.12},
    {"SE01_20", 12, 20.33, 4.92},
    {"SE01_21", 15, 14.07, 4.00},
    {"SE01_22", 12, 21.42, 4.00},
    {"SE01_23", 21, 12.76, 4.1},
    {"SE01_24", 11, 23.91, 4.00},
};

namespace {

const std::array<const char*, 6> kMainRoles{"Rachel", "Monica", "Phoebe", "Joey", "Chandler", "Ross"};

std::vector<corpus::RoleProfile> main_role_profiles() {
    std::vector<corpus::RoleProfile> out;
    for (const char* name : kMainRoles) out.push_back({name, std::string(name) + " is one of six friends sharing a city life."});
    return out;
}

std::string pad(std::size_t i, int width) {
    auto s = std::to_string(i);
    return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

// Contiguous spans of near-equal size covering n items.
std::vector<std::pair<std::size_t, std::size_t>> even_spans(std::size_t n, std::size_t parts) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t j = 0; j < parts; ++j) {
        const std::size_t size = n / parts + (j < n % parts ? 1 : 0);
        out.emplace_back(start, start + size - 1);
        start += size;
    }
    return out;
}

}  // namespace

corpus::Corpus utterance_table_corpus() {
    corpus::Corpus c;
    c.roles = main_role_profiles();
    for (std::size_t e = 0; e < kUtteranceTable.size(); ++e) {
        const auto& row = kUtteranceTable[e];
        corpus::Episode ep;
        ep.id = row.episode;

        // Spread the rounding slack of the row total evenly over the role cells
        // so every cell still rounds to its printed value.
        double listed = 0.0;
        for (int r = 0; r < 7; ++r) listed += scenealign::parse_duration(row.durations[r]);
        const double slack = (scenealign::parse_duration(row.durations[7]) - listed) / 7.0;

        std::array<int, 7> left{};
        std::array<double, 7> each{};
        for (int r = 0; r < 7; ++r) {
            left[r] = row.counts[r];
            each[r] = (scenealign::parse_duration(row.durations[r]) + slack) / row.counts[r];
        }

        double t = 0.0;
        std::size_t k = 0;
        for (bool any = true; any;) {
            any = false;
            for (int r = 0; r < 7; ++r) {
                if (left[r] == 0) continue;
                --left[r];
                any = true;
                corpus::Utterance u;
                u.id = ep.id + "_u" + pad(++k, 4);
                u.episode_id = ep.id;
                u.role = kUtteranceTableRoles[r];
                u.text = "line " + std::to_string(k);
                u.audio = "audio/" + ep.id + "/" + pad(k, 4) + ".wav";
                u.start_s = t;
                u.end_s = t + each[r];
                t = u.end_s + 0.25;
                ep.utterances.push_back(std::move(u));
            }
        }

        const auto spans = even_spans(ep.utterances.size(), static_cast<std::size_t>(kSceneTable[e].scenes));
        for (std::size_t j = 0; j < spans.size(); ++j)
            ep.scenes.push_back({ep.id + "_s" + pad(j + 1, 2), ep.id, spans[j].first, spans[j].second, "scene " + std::to_string(j + 1)});
        c.episodes.push_back(std::move(ep));
    }
    return c;
}

corpus::Corpus scene_table_corpus() {
    corpus::Corpus c;
    c.roles = main_role_profiles();
    for (const auto& row : kSceneTable) {
        const auto scenes = static_cast<std::size_t>(row.scenes);
        const auto utterances = static_cast<std::size_t>(std::lround(row.scenes * row.avg_utterances));
        const auto slots = static_cast<std::size_t>(std::lround(row.scenes * row.avg_roles));

        corpus::Episode ep;
        ep.id = row.episode;
        const auto spans = even_spans(utterances, scenes);
        double t = 0.0;
        for (std::size_t j = 0; j < scenes; ++j) {
            const std::size_t speakers = slots / scenes + (j < slots % scenes ? 1 : 0);
            for (std::size_t i = spans[j].first; i <= spans[j].second; ++i) {
                const std::size_t r = (j + (i - spans[j].first) % speakers) % kUtteranceTableRoles.size();
                corpus::Utterance u;
                u.id = ep.id + "_u" + pad(i + 1, 4);
                u.episode_id = ep.id;
                u.role = kUtteranceTableRoles[r];
                u.text = "line " + std::to_string(i + 1);
                u.audio = "audio/" + ep.id + "/" + pad(i + 1, 4) + ".wav";
                u.start_s = t;
                u.end_s = t + 1.5;
                t += 2.0;
                ep.utterances.push_back(std::move(u));
            }
            ep.scenes.push_back({ep.id + "_s" + pad(j + 1, 2), ep.id, spans[j].first, spans[j].second, "scene " + std::to_string(j + 1)});
        }
        c.episodes.push_back(std::move(ep));
    }
    return c;
}

NoisyAlignmentFixture noisy_alignment_fixture(std::uint64_t seed, std::size_t lines, std::size_t scenes, double word_noise,
                                              std::size_t dropped) {
    Rng rng(seed);
    static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z"};
    static const char* vowels[] = {"a", "e", "i", "o", "u"};
    std::vector<std::string> vocab;
    for (const char* a : onsets)
        for (const char* v : vowels)
            for (const char* b : onsets) vocab.push_back(std::string(a) + v + b);

    std::vector<std::vector<std::string>> words(lines);
    for (auto& w : words) {
        const std::size_t n = 6 + rng.below(7);
        for (std::size_t i = 0; i < n; ++i) w.push_back(vocab[rng.below(vocab.size())]);
    }

    // Scene sizes: near-equal, at least two lines each.
    const auto spans = even_spans(lines, scenes);
    std::vector<bool> initial(lines, false);
    for (const auto& s : spans) initial[s.first] = true;

    std::vector<std::size_t> drop;
    while (drop.size() < dropped) {
        const auto i = rng.below(lines);
        if (initial[i] || std::find(drop.begin(), drop.end(), i) != drop.end()) continue;
        drop.push_back(i);
    }
    std::sort(drop.begin(), drop.end());

    static const char* speakers[] = {"RACHEL", "MONICA", "PHOEBE", "JOEY", "CHANDLER", "ROSS"};
    std::vector<scenealign::ScriptItem> items;
    NoisyAlignmentFixture fx{scenealign::ScriptDocument({scenealign::ScriptItem::header("placeholder")}), {}, {}, drop};
    for (std::size_t j = 0; j < spans.size(); ++j) {
        items.push_back(scenealign::ScriptItem::header("Scene " + std::to_string(j + 1)));
        for (std::size_t i = spans[j].first; i <= spans[j].second; ++i) {
            std::string text;
            for (const auto& w : words[i]) text += (text.empty() ? "" : " ") + w;
            const std::string speaker = speakers[rng.below(6)];
            items.push_back(scenealign::ScriptItem::line(text + ".", speaker));
            if (std::binary_search(drop.begin(), drop.end(), i)) continue;
            if (i == spans[j].first) fx.true_starts.push_back(fx.utterances.size());
            std::string heard;
            for (const auto& w : words[i]) {
                const auto& token = rng.chance(word_noise) ? vocab[rng.below(vocab.size())] : w;
                heard += (heard.empty() ? "" : " ") + token;
            }
            corpus::Utterance u;
            u.id = "u" + pad(fx.utterances.size(), 3);
            u.episode_id = "ep";
            u.role = speaker;
            u.text = heard;
            fx.utterances.push_back(std::move(u));
        }
    }
    fx.script = scenealign::ScriptDocument(std::move(items));
    return fx;
}

std::string random_caption(Rng& rng) {
    static const std::vector<std::string> words{"anxious", "concern", "warm", "excitement", "dry",      "sarcasm",
                                                "quiet",   "sadness", "playful", "teasing",  "calm",    "soothing",
                                                "bright",  "tense",   "flat",    "gentle",   "irritated", "joy"};
    const std::size_t n = 1 + rng.below(3);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + words[rng.below(words.size())];
    return out;
}

emodb::EmotionDatabase random_mock_database(Rng& rng, std::size_t entries) {
    std::vector<std::size_t> order(entries);
    for (std::size_t i = 0; i < entries; ++i) order[i] = i;
    for (std::size_t i = entries; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::vector<std::string> captions;
    for (std::size_t i = 0; i < entries; ++i) captions.push_back(random_caption(rng));
    const auto vectors = backends::MockBackend().embed(captions);

    emodb::EmotionDatabase db;
    db.role = "Ross";
    db.dim = backends::MockBackend::kEmbeddingDim;
    for (std::size_t i = 0; i < entries; ++i)
        db.entries.push_back({"utt" + pad(order[i], 4), captions[i], vectors[i], "audio/" + pad(order[i], 4) + ".wav"});
    return db;
}

fs::path write_demo_corpus(const fs::path& dir) {
    struct Line {
        const char* role;
        const char* text;
        const char* caption;
    };
    static const std::vector<std::vector<std::vector<Line>>> episodes{
        {{{"Monica", "There's nothing to tell, he's just some guy I work with.", "defensive, slightly embarrassed"},
          {"Joey", "Come on, you're going out with the guy, there's gotta be something wrong with him.", "playful teasing"},
          {"Chandler", "All right Joey, be nice. So does he have a hump?", "dry sarcasm"},
          {"Phoebe", "Wait, does he eat chalk?", "curious, slightly worried"},
          {"Monica", "Just 'cause I don't want her to go through what I went through with Carl.", "reassuring, warm"},
          {"Phoebe", "Okay, everybody relax. This is not even a date.", "calm, soothing"}},
         {{"Ross", "Hi.", "flat, deflated"},
          {"Joey", "This guy says hello, I wanna kill myself.", "mock exasperation"},
          {"Monica", "Are you okay, sweetie?", "gentle concern"},
          {"Ross", "I just feel like someone reached down my throat and grabbed my small intestine.", "quiet sadness"},
          {"Phoebe", "Ooh, that's so sad. Do you think he's doing any better?", "anxious concern"},
          {"Rachel", "I know it's been hard, but it's gonna get better.", "soft encouragement"}}},
        {{{"Rachel", "Guess what? I got a job!", "bright excitement"},
          {"Phoebe", "Wow, that's great news!", "cheerful delight"},
          {"Chandler", "Could this day be any more surprising?", "wry amusement"},
          {"Phoebe", "I always knew you'd find something.", "proud, affectionate"},
          {"Ross", "So what's the job?", "eager curiosity"}}}};

    corpus::Corpus c;
    for (const char* name : {"Phoebe", "Joey", "Chandler", "Rachel", "Ross", "Monica"})
        c.roles.push_back({name, std::string(name) + " is a New Yorker in their late twenties, quick with a joke and loyal to friends."});

    std::size_t k = 0;
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        corpus::Episode ep;
        ep.id = "ep" + std::to_string(e + 1);
        double t = 0.0;
        for (std::size_t s = 0; s < episodes[e].size(); ++s) {
            const std::size_t start = ep.utterances.size();
            for (const auto& line : episodes[e][s]) {
                ++k;
                corpus::Utterance u;
                u.id = ep.id + "_u" + pad(ep.utterances.size() + 1, 2);
                u.episode_id = ep.id;
                u.role = line.role;
                u.text = line.text;
                u.audio = "audio/" + u.id + ".wav";
                u.start_s = t;
                u.end_s = t + 0.5;
                t += 1.0;

                backends::AudioClip clip;
                clip.samples.resize(1600);
                const double freq = 180.0 + 17.0 * static_cast<double>(k);
                for (std::size_t i = 0; i < clip.samples.size(); ++i)
                    clip.samples[i] = static_cast<std::int16_t>(std::lround(4000.0 * std::sin(2.0 * std::numbers::pi * freq * i / 16000.0)));
                const auto wav = dir / u.audio;
                fs::create_directories(wav.parent_path());
                backends::write_wav(wav, clip);
                write_file(wav.string() + ".txt", std::string(line.text) + "\n");
                write_file(wav.string() + ".emotion.txt", std::string(line.caption) + "\n");
                ep.utterances.push_back(std::move(u));
            }
            ep.scenes.push_back({ep.id + "_s" + std::to_string(s + 1), ep.id, start, ep.utterances.size() - 1,
                                 "Central Perk, afternoon. Part " + std::to_string(s + 1) + " of the episode."});
        }
        c.episodes.push_back(std::move(ep));
    }
    const auto manifest = dir / "manifest.json";
    corpus::save_manifest(c, manifest);
    return manifest;
}

}  // namespace amb::testkit
