#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amb::eval {

/// Column order of every report.
inline const std::vector<std::string> kRoleOrder{"Phoebe", "Joey", "Chandler", "Rachel", "Ross", "Monica"};

struct MosRecord {
    std::string item_id;
    std::string role;
    std::string evaluator_id;
    int raw_score = 1;  // 1..5
    bool voice_mismatch = false;
    bool content_mismatch = false;
    std::string system;  // optional grouping label
};

struct ImprovementRecord {
    std::string role;
    std::string system_label;
    std::string evaluator_id;
    double rating = 0.5;  // 0, 0.5 or 1
};

/// mean ± sample standard deviation over n values (std = 0 when n = 1).
struct AggCell {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

/// Throws Error("EmptyInput") for an empty span.
AggCell summarize(std::span<const double> values);

/// A voice or content mismatch forces the lowest score.
int gate_score(const MosRecord& r);

struct RoleAggregate {
    /// Per-role cells, known roles in kRoleOrder first, then others by name.
    std::vector<std::pair<std::string, AggCell>> roles;
    /// Mean and sample std of the per-role means ("Average" / "ALL").
    AggCell summary;

    std::map<std::string, double> role_means() const;
};

/// Errors: EmptyInput, InvalidRecord (score outside 1..5).
RoleAggregate aggregate_mos(std::span<const MosRecord> records);
/// Errors: EmptyInput, InvalidRecord (rating not in {0, 0.5, 1}).
RoleAggregate aggregate_improvement(std::span<const ImprovementRecord> records);

/// Cell over d_k = ablated_k - full_k. Error: RoleSetMismatch.
AggCell ablation_delta(const std::map<std::string, double>& full, const std::map<std::string, double>& ablated);

enum class ReportLayout { Mos, Improvement, Ablation };

struct ReportRow {
    std::string label;
    /// Keyed by role name plus "Average" (Mos), "ALL" (Improvement) or "RP-MOS" (Ablation).
    std::map<std::string, AggCell> cells;
};

struct Report {
    std::string text;
    std::string csv;
};

std::vector<std::string> report_columns(ReportLayout layout);
ReportRow to_row(std::string label, const RoleAggregate& agg, ReportLayout layout);

/// "m.mm ± s.ss" (round half to even).
std::string format_cell(const AggCell& cell);

/// Text table and CSV. With `mark_best`, the highest mean per column is
/// wrapped in "**" in the text table. Error: IncompleteGrid.
Report render_report(const std::vector<ReportRow>& rows, ReportLayout layout, bool mark_best = false);

/// CSV record loaders. MOS headers: item_id, role, evaluator_id, raw_score,
/// voice_mismatch, content_mismatch [, system]. Improvement headers: role,
/// system, evaluator_id, rating. Column order is free. Error: ParseError.
std::vector<MosRecord> parse_mos_csv(std::string_view text);
std::vector<ImprovementRecord> parse_improvement_csv(std::string_view text);

/// Splits CSV text into rows of fields (RFC 4180 quoting, LF or CRLF).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace amb::eval
