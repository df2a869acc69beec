#include "amb/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "amb/error.hpp"
#include "amb/format.hpp"

namespace amb::eval {

namespace {

std::size_t role_rank(const std::string& role) {
    const auto it = std::find(kRoleOrder.begin(), kRoleOrder.end(), role);
    return static_cast<std::size_t>(it - kRoleOrder.begin());
}

bool role_before(const std::string& a, const std::string& b) {
    const auto ra = role_rank(a), rb = role_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

RoleAggregate aggregate_groups(std::unordered_map<std::string, std::vector<double>> groups) {
    if (groups.empty()) throw Error("EmptyInput", "no records to aggregate");
    std::vector<std::string> names;
    names.reserve(groups.size());
    for (const auto& [name, _] : groups) names.push_back(name);
    std::sort(names.begin(), names.end(), role_before);

    RoleAggregate out;
    std::vector<double> means;
    for (const auto& name : names) {
        const auto cell = summarize(groups.at(name));
        out.roles.emplace_back(name, cell);
        means.push_back(cell.mean);
    }
    out.summary = summarize(means);
    return out;
}

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::string trim_copy(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, bool required = true) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        if (required) throw Error("ParseError", "missing column \"" + name + "\"");
        return header.size();
    }
};

Table read_table(std::string_view text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw Error("ParseError", "empty CSV");
    Table t;
    for (const auto& h : rows.front()) t.header.push_back(lower(trim_copy(h)));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto& r = rows[i];
        if (r.size() == 1 && trim_copy(r[0]).empty()) continue;
        if (r.size() != t.header.size())
            throw Error("ParseError", "row " + std::to_string(i + 1) + ": expected " + std::to_string(t.header.size()) +
                                          " fields, got " + std::to_string(r.size()));
        for (auto& f : r) f = trim_copy(f);
        t.rows.push_back(std::move(r));
    }
    return t;
}

bool parse_bool(const std::string& v, std::size_t row) {
    const auto s = lower(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no" || s.empty()) return false;
    throw Error("ParseError", "row " + std::to_string(row) + ": not a boolean: \"" + v + "\"");
}

double parse_number(const std::string& v, std::size_t row) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw Error("ParseError", "row " + std::to_string(row) + ": not a number: \"" + v + "\"");
}

}  // namespace

AggCell summarize(std::span<const double> values) {
    if (values.empty()) throw Error("EmptyInput", "cannot summarize an empty sample");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd, values.size()};
}

int gate_score(const MosRecord& r) { return (r.voice_mismatch || r.content_mismatch) ? 1 : r.raw_score; }

std::map<std::string, double> RoleAggregate::role_means() const {
    std::map<std::string, double> out;
    for (const auto& [name, cell] : roles) out[name] = cell.mean;
    return out;
}

RoleAggregate aggregate_mos(std::span<const MosRecord> records) {
    std::unordered_map<std::string, std::vector<double>> groups;
    for (const auto& r : records) {
        if (r.raw_score < 1 || r.raw_score > 5)
            throw Error("InvalidRecord", "raw_score " + std::to_string(r.raw_score) + " outside 1..5 for item " + r.item_id);
        groups[r.role].push_back(gate_score(r));
    }
    return aggregate_groups(std::move(groups));
}

RoleAggregate aggregate_improvement(std::span<const ImprovementRecord> records) {
    std::unordered_map<std::string, std::vector<double>> groups;
    for (const auto& r : records) {
        if (r.rating != 0.0 && r.rating != 0.5 && r.rating != 1.0)
            throw Error("InvalidRecord", "rating must be 0, 0.5 or 1 (role " + r.role + ")");
        groups[r.role].push_back(r.rating);
    }
    return aggregate_groups(std::move(groups));
}

AggCell ablation_delta(const std::map<std::string, double>& full, const std::map<std::string, double>& ablated) {
    std::set<std::string> a, b;
    for (const auto& [k, _] : full) a.insert(k);
    for (const auto& [k, _] : ablated) b.insert(k);
    if (a != b) throw Error("RoleSetMismatch", "full and ablated runs cover different roles");
    if (a.empty()) throw Error("EmptyInput", "no roles to compare");
    std::vector<double> d;
    for (const auto& [k, v] : full) d.push_back(ablated.at(k) - v);
    return summarize(d);
}

std::vector<std::string> report_columns(ReportLayout layout) {
    switch (layout) {
        case ReportLayout::Mos: {
            auto cols = kRoleOrder;
            cols.emplace_back("Average");
            return cols;
        }
        case ReportLayout::Improvement: {
            auto cols = kRoleOrder;
            cols.emplace_back("ALL");
            return cols;
        }
        case ReportLayout::Ablation:
            return {"RP-MOS"};
    }
    return {};
}

ReportRow to_row(std::string label, const RoleAggregate& agg, ReportLayout layout) {
    ReportRow row{std::move(label), {}};
    if (layout == ReportLayout::Ablation) {
        row.cells["RP-MOS"] = agg.summary;
        return row;
    }
    for (const auto& [name, cell] : agg.roles) row.cells[name] = cell;
    row.cells[layout == ReportLayout::Mos ? "Average" : "ALL"] = agg.summary;
    return row;
}

std::string format_cell(const AggCell& cell) { return format_fixed(cell.mean) + " ± " + format_fixed(cell.std); }

Report render_report(const std::vector<ReportRow>& rows, ReportLayout layout, bool mark_best) {
    const auto cols = report_columns(layout);
    for (const auto& row : rows)
        for (const auto& c : cols)
            if (!row.cells.contains(c))
                throw Error("IncompleteGrid", "row \"" + row.label + "\" has no value for column " + c);

    std::vector<double> best(cols.size(), -INFINITY);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < cols.size(); ++i) best[i] = std::max(best[i], row.cells.at(cols[i]).mean);

    const std::string first = layout == ReportLayout::Ablation ? "Setting" : "System";
    std::vector<std::vector<std::string>> text_rows;
    std::vector<std::string> header{first};
    header.insert(header.end(), cols.begin(), cols.end());
    text_rows.push_back(header);

    Report out;
    out.csv = csv_row(header);
    for (const auto& row : rows) {
        std::vector<std::string> t{row.label}, c{row.label};
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& cell = row.cells.at(cols[i]);
            auto s = format_cell(cell);
            c.push_back(s);
            if (mark_best && rows.size() > 1 && format_fixed(cell.mean) == format_fixed(best[i])) s = "**" + s + "**";
            t.push_back(std::move(s));
        }
        text_rows.push_back(std::move(t));
        out.csv += csv_row(c);
    }
    out.text = aligned_table(text_rows);
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    if (text.empty()) return rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, after_quote = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"' && field.empty() && !after_quote) {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            after_quote = false;
            rows.push_back(std::move(row));
            row.clear();
        } else {
            if (after_quote) throw Error("ParseError", "text after closing quote in CSV row " + std::to_string(rows.size() + 1));
            field += ch;
        }
    }
    if (quoted) throw Error("ParseError", "unterminated quoted field");
    if (!field.empty() || !row.empty() || after_quote) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MosRecord> parse_mos_csv(std::string_view text) {
    const auto t = read_table(text);
    const auto c_item = t.column("item_id"), c_role = t.column("role"), c_eval = t.column("evaluator_id"),
               c_raw = t.column("raw_score"), c_voice = t.column("voice_mismatch"),
               c_content = t.column("content_mismatch"), c_sys = t.column("system", false);
    std::vector<MosRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const auto line = i + 2;
        const double raw = parse_number(r[c_raw], line);
        if (raw != std::floor(raw) || raw < 1 || raw > 5)
            throw Error("ParseError", "row " + std::to_string(line) + ": raw_score must be an integer 1..5");
        MosRecord m;
        m.item_id = r[c_item];
        m.role = r[c_role];
        m.evaluator_id = r[c_eval];
        m.raw_score = static_cast<int>(raw);
        m.voice_mismatch = parse_bool(r[c_voice], line);
        m.content_mismatch = parse_bool(r[c_content], line);
        if (c_sys < t.header.size()) m.system = r[c_sys];
        if (m.role.empty()) throw Error("ParseError", "row " + std::to_string(line) + ": empty role");
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<ImprovementRecord> parse_improvement_csv(std::string_view text) {
    const auto t = read_table(text);
    const auto c_role = t.column("role"), c_sys = t.column("system"), c_eval = t.column("evaluator_id"),
               c_rating = t.column("rating");
    std::vector<ImprovementRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const auto line = i + 2;
        const double v = parse_number(r[c_rating], line);
        if (v != 0.0 && v != 0.5 && v != 1.0)
            throw Error("ParseError", "row " + std::to_string(line) + ": rating must be 0, 0.5 or 1");
        if (r[c_role].empty()) throw Error("ParseError", "row " + std::to_string(line) + ": empty role");
        out.push_back({r[c_role], r[c_sys], r[c_eval], v});
    }
    return out;
}

}  // namespace amb::eval
