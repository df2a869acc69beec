#include "amb/align.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amb/error.hpp"

namespace amb::scenealign {

namespace {

constexpr double kTieEpsilon = 1e-9;
constexpr std::string_view kHeaderPrefix = "[SCENE]";
constexpr std::size_t kMaxSpeakerLength = 40;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

ScriptItem parse_line(std::string_view line) {
    const auto colon = line.find(':');
    if (colon != std::string_view::npos && colon > 0 && colon <= kMaxSpeakerLength) {
        const auto speaker = trim(line.substr(0, colon));
        if (!speaker.empty() && speaker.find('"') == std::string_view::npos)
            return ScriptItem::line(std::string(trim(line.substr(colon + 1))), std::string(speaker));
    }
    return ScriptItem::line(std::string(line));
}

}  // namespace

ScriptDocument::ScriptDocument(std::vector<ScriptItem> items) : items_(std::move(items)) {
    if (items_.empty() || !items_.front().is_header())
        throw Error("ParseError", "script must begin with a scene header");
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (items_[i].is_header()) {
            headers_.push_back(i);
        } else {
            lines_.push_back(i);
            line_scene_.push_back(headers_.size() - 1);
        }
    }
}

ScriptDocument ScriptDocument::parse(std::string_view text) {
    std::vector<ScriptItem> items;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (line.starts_with(kHeaderPrefix)) items.push_back(ScriptItem::header(std::string(trim(line.substr(kHeaderPrefix.size())))));
        else items.push_back(parse_line(line));
    }
    return ScriptDocument(std::move(items));
}

AlignmentMap align_tokens(const std::vector<Tokens>& lines, const std::vector<Tokens>& utterances, double gap_penalty) {
    const std::size_t n = lines.size();
    const std::size_t m = utterances.size();

    std::vector<double> sim(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) sim[i * m + j] = line_similarity(lines[i], utterances[j]);

    // best[i][j]: optimal score for aligning lines[i..) with utterances[j..).
    const std::size_t w = m + 1;
    std::vector<double> best((n + 1) * w);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return best[i * w + j]; };
    for (std::size_t i = 0; i <= n; ++i) at(i, m) = -gap_penalty * static_cast<double>(n - i);
    for (std::size_t j = 0; j <= m; ++j) at(n, j) = -gap_penalty * static_cast<double>(m - j);
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            at(i, j) = std::max({sim[i * m + j] + at(i + 1, j + 1), at(i + 1, j) - gap_penalty, at(i, j + 1) - gap_penalty});
        }
    }

    // Forward reconstruction: from (i, j) pick the lexicographically smallest
    // next pair that still reaches the optimum; stop only if no pair does.
    AlignmentMap out;
    out.line_count = n;
    out.utterance_count = m;
    out.total_score = at(0, 0);
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double target = at(i, j) - kTieEpsilon;
        bool found = false;
        for (std::size_t a = i; a < n && !found; ++a) {
            const double line_gaps = gap_penalty * static_cast<double>(a - i);
            for (std::size_t b = j; b < m; ++b) {
                const double value = sim[a * m + b] + at(a + 1, b + 1) - line_gaps - gap_penalty * static_cast<double>(b - j);
                if (value >= target) {
                    out.pairs.emplace_back(a, b);
                    i = a + 1;
                    j = b + 1;
                    found = true;
                    break;
                }
            }
        }
        if (!found) break;
    }

    std::vector<bool> line_used(n), utt_used(m);
    for (const auto& [a, b] : out.pairs) {
        line_used[a] = true;
        utt_used[b] = true;
    }
    for (std::size_t a = 0; a < n; ++a)
        if (!line_used[a]) out.skipped_lines.push_back(a);
    for (std::size_t b = 0; b < m; ++b)
        if (!utt_used[b]) out.skipped_utterances.push_back(b);
    return out;
}

AlignmentMap align_script(const ScriptDocument& script, const std::vector<corpus::Utterance>& utterances, double gap_penalty) {
    if (script.line_count() == 0) throw Error("EmptyInput", "script has no dialogue lines");
    if (utterances.empty()) throw Error("EmptyInput", "no utterances to align against");

    std::vector<Tokens> line_tokens, utt_tokens;
    line_tokens.reserve(script.line_count());
    for (std::size_t i = 0; i < script.line_count(); ++i) line_tokens.push_back(normalize_text(script.line(i).text));
    utt_tokens.reserve(utterances.size());
    for (const auto& u : utterances) utt_tokens.push_back(normalize_text(u.text));
    return align_tokens(line_tokens, utt_tokens, gap_penalty);
}

BoundaryProjection project_boundaries(const AlignmentMap& alignment, const ScriptDocument& script) {
    if (alignment.pairs.empty()) throw Error("EmptyInput", "alignment has no matched lines");
    if (alignment.line_count != script.line_count())
        throw Error("PreconditionViolation", "alignment was not produced from this script");

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> anchor(script.scene_count(), kNone);
    for (const auto& [line, utt] : alignment.pairs) {
        auto& a = anchor[script.scene_of_line(line)];
        if (a == kNone) a = utt;
    }

    BoundaryProjection out;
    for (std::size_t s = 0; s < script.scene_count(); ++s) {
        if (anchor[s] == kNone) {
            out.unanchored.push_back(script.scene_label(s));
            continue;
        }
        ProjectedScene scene;
        scene.label = script.scene_label(s);
        scene.script_scene = s;
        scene.start_index = out.scenes.empty() ? 0 : anchor[s];
        if (!out.scenes.empty()) out.scenes.back().end_index = anchor[s] - 1;
        out.scenes.push_back(std::move(scene));
    }
    out.scenes.back().end_index = alignment.utterance_count - 1;
    return out;
}

}  // namespace amb::scenealign
