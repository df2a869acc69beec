#include "amb/stats.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "amb/error.hpp"
#include "amb/format.hpp"

namespace amb::scenealign {

double SceneRow::avg_utterances() const {
    return scene_count ? static_cast<double>(covered_utterances) / static_cast<double>(scene_count) : 0.0;
}

double SceneRow::avg_roles() const {
    return scene_count ? static_cast<double>(role_slots) / static_cast<double>(scene_count) : 0.0;
}

StatsTables compute_stats(const corpus::Corpus& c) {
    StatsTables t;
    std::unordered_map<std::string, std::size_t> column_of;
    for (const auto& r : c.roles) {
        column_of.emplace(r.name, t.role_columns.size());
        t.role_columns.push_back(r.name);
    }
    const std::size_t others = t.role_columns.size();
    t.role_columns.emplace_back(corpus::kOthers);

    t.utterance_all.episode_id = "ALL";
    t.utterance_all.cells.resize(t.role_columns.size());
    t.scene_all.episode_id = "ALL";

    for (const auto& ep : c.episodes) {
        UtteranceRow row{ep.id, std::vector<RoleCell>(t.role_columns.size()), {}};
        for (const auto& u : ep.utterances) {
            auto it = column_of.find(u.role);
            auto& cell = row.cells[it == column_of.end() ? others : it->second];
            ++cell.count;
            cell.duration_s += u.duration();
        }
        for (std::size_t k = 0; k < row.cells.size(); ++k) {
            row.total.count += row.cells[k].count;
            row.total.duration_s += row.cells[k].duration_s;
            t.utterance_all.cells[k].count += row.cells[k].count;
            t.utterance_all.cells[k].duration_s += row.cells[k].duration_s;
        }
        t.utterance_all.total.count += row.total.count;
        t.utterance_all.total.duration_s += row.total.duration_s;
        t.utterance_rows.push_back(std::move(row));

        SceneRow srow;
        srow.episode_id = ep.id;
        for (const auto& s : ep.scenes) {
            if (s.start_index > s.end_index || s.end_index >= ep.utterances.size()) continue;
            ++srow.scene_count;
            srow.covered_utterances += s.size();
            std::set<std::string_view> speakers;
            for (std::size_t i = s.start_index; i <= s.end_index; ++i) speakers.insert(ep.utterances[i].role);
            srow.role_slots += speakers.size();
        }
        t.scene_all.scene_count += srow.scene_count;
        t.scene_all.covered_utterances += srow.covered_utterances;
        t.scene_all.role_slots += srow.role_slots;
        t.scene_rows.push_back(std::move(srow));
    }
    return t;
}

std::string format_duration(double seconds) {
    const auto total = static_cast<long long>(std::floor(seconds + 0.5));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", total / 3600, (total % 3600) / 60, total % 60);
    return buf;
}

double parse_duration(std::string_view hms) {
    long long h = 0, m = 0, s = 0;
    char tail = 0;
    const std::string str(hms);
    if (std::sscanf(str.c_str(), "%lld:%2lld:%2lld%c", &h, &m, &s, &tail) != 3 || h < 0 || m < 0 || m > 59 || s < 0 || s > 59)
        throw Error("ParseError", "malformed duration \"" + str + "\"");
    return static_cast<double>(h * 3600 + m * 60 + s);
}

namespace {

std::vector<std::string> utterance_header(const StatsTables& t) {
    std::vector<std::string> h{"Episode"};
    for (const auto& r : t.role_columns) {
        h.push_back(r + " num");
        h.push_back(r + " duration");
    }
    h.emplace_back("TOTAL num");
    h.emplace_back("TOTAL duration");
    return h;
}

std::vector<std::string> utterance_fields(const UtteranceRow& row) {
    std::vector<std::string> f{row.episode_id};
    for (const auto& cell : row.cells) {
        f.push_back(std::to_string(cell.count));
        f.push_back(format_duration(cell.duration_s));
    }
    f.push_back(std::to_string(row.total.count));
    f.push_back(format_duration(row.total.duration_s));
    return f;
}

const std::vector<std::string> kSceneHeader{"Episode", "Scene Num", "Avg Utterances per Scene", "Avg Roles per Scene"};

std::vector<std::string> scene_fields(const SceneRow& row) {
    return {row.episode_id, std::to_string(row.scene_count), format_fixed(row.avg_utterances(), 2), format_fixed(row.avg_roles(), 2)};
}

template <typename Row, typename Fields>
std::vector<std::vector<std::string>> grid(std::vector<std::string> header, const std::vector<Row>& rows, const Row& all, Fields fields) {
    std::vector<std::vector<std::string>> g{std::move(header)};
    for (const auto& r : rows) g.push_back(fields(r));
    g.push_back(fields(all));
    return g;
}

std::string to_csv(const std::vector<std::vector<std::string>>& g) {
    std::string out;
    for (const auto& row : g) out += csv_row(row);
    return out;
}

}  // namespace

std::string utterance_stats_csv(const StatsTables& t) {
    return to_csv(grid(utterance_header(t), t.utterance_rows, t.utterance_all, utterance_fields));
}

std::string scene_stats_csv(const StatsTables& t) {
    return to_csv(grid(kSceneHeader, t.scene_rows, t.scene_all, scene_fields));
}

std::string utterance_stats_text(const StatsTables& t) {
    return aligned_table(grid(utterance_header(t), t.utterance_rows, t.utterance_all, utterance_fields));
}

std::string scene_stats_text(const StatsTables& t) {
    return aligned_table(grid(kSceneHeader, t.scene_rows, t.scene_all, scene_fields));
}

}  // namespace amb::scenealign
