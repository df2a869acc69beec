#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "amb/error.hpp"
#include "amb/eval.hpp"
#include "fixtures.hpp"

using namespace amb;
using namespace amb::eval;

namespace {

template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "none";
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct PublishedRow {
    const char* system;
    std::vector<double> role_means;  // kRoleOrder
    double summary_mean;
};

// Role means and Average of the published MOS table.
const std::vector<PublishedRow> kMosTable{
    {"YourTTS", {2.90, 2.47, 2.30, 1.80, 2.60, 2.30}, 2.39},
    {"F5-TTS", {2.60, 2.33, 3.60, 3.00, 2.90, 2.80}, 2.87},
    {"Cosyvoice", {2.30, 2.67, 2.10, 1.40, 2.00, 1.80}, 2.04},
    {"SparkTTS", {3.40, 2.53, 2.90, 2.20, 3.20, 2.00}, 2.71},
    {"IndexTTS", {3.80, 2.20, 3.30, 3.20, 2.60, 3.20}, 3.05},
    {"Qwen_Omni", {1.00, 1.00, 1.00, 1.00, 1.00, 1.00}, 1.00},
    {"ActorMind", {4.00, 3.47, 3.20, 3.40, 3.70, 3.60}, 3.56},
};

// Role means and ALL of the published improvement table.
const std::vector<PublishedRow> kImprovementTable{
    {"ActorMind + F5-TTS", {1.00, 0.75, 0.75, 0.50, 0.88, 0.75}, 0.77},
    {"ActorMind + Cosyvoice", {0.88, 0.63, 0.75, 0.50, 0.38, 0.63}, 0.63},
    {"ActorMind + SparkTTS", {0.50, 0.88, 1.00, 1.00, 1.00, 1.00}, 0.90},
    {"ActorMind + IndexTTS", {0.88, 0.75, 0.25, 0.75, 0.88, 1.00}, 0.75},
    {"ActorMind + YourTTS", {0.63, 0.50, 0.88, 0.50, 1.00, 0.50}, 0.67},
};

std::vector<ImprovementRecord> ratings(const std::string& role, std::vector<double> values) {
    std::vector<ImprovementRecord> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({role, "sys", "e" + std::to_string(i), values[i]});
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

TEST(Gate, MismatchForcesLowestScore) {
    EXPECT_EQ(gate_score({"i", "Joey", "e", 4, true, false}), 1);
    EXPECT_EQ(gate_score({"i", "Joey", "e", 5, false, false}), 5);
    EXPECT_EQ(gate_score({"i", "Joey", "e", 1, false, true}), 1);
    EXPECT_EQ(gate_score({"i", "Joey", "e", 3, true, true}), 1);
}

TEST(Gate, FlippingAFlagNeverRaisesAMean) {
    testkit::Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MosRecord> recs;
        for (int i = 0; i < 12; ++i)
            recs.push_back({"i" + std::to_string(i), kRoleOrder[rng.below(6)], "e", 1 + static_cast<int>(rng.below(5)), rng.chance(0.2),
                            rng.chance(0.2)});
        const auto before = aggregate_mos(recs);
        auto flipped = recs;
        flipped[rng.below(flipped.size())].voice_mismatch = true;
        const auto after = aggregate_mos(flipped);
        EXPECT_LE(after.summary.mean, before.summary.mean + 1e-12);
        const auto bm = before.role_means(), am = after.role_means();
        for (const auto& [role, m] : am) EXPECT_LE(m, bm.at(role) + 1e-12);
    }
}

TEST(AggregateMos, AllGatedToOne) {
    std::vector<MosRecord> recs;
    for (const auto& role : kRoleOrder)
        for (int i = 0; i < 5; ++i) recs.push_back({"i" + std::to_string(i), role, "e", 4, i % 2 == 0, i % 2 == 1});
    const auto agg = aggregate_mos(recs);
    ASSERT_EQ(agg.roles.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_EQ(agg.roles[k].first, kRoleOrder[k]);
        EXPECT_EQ(format_cell(agg.roles[k].second), "1.00 ± 0.00");
    }
    EXPECT_EQ(format_cell(agg.summary), "1.00 ± 0.00");
}

TEST(AggregateMos, SampleStandardDeviation) {
    std::vector<MosRecord> recs{{"a", "Ross", "e1", 3}, {"a", "Ross", "e2", 4}, {"a", "Ross", "e3", 5}};
    const auto agg = aggregate_mos(recs);
    ASSERT_EQ(agg.roles.size(), 1u);
    EXPECT_EQ(agg.roles[0].second.n, 3u);
    EXPECT_EQ(format_cell(agg.roles[0].second), "4.00 ± 1.00");
    EXPECT_EQ(agg.summary.std, 0.0);
    EXPECT_EQ(error_code([] { aggregate_mos({}); }), "EmptyInput");
    std::vector<MosRecord> bad{{"a", "Ross", "e", 6}};
    EXPECT_EQ(error_code([&] { aggregate_mos(bad); }), "InvalidRecord");
}

TEST(AggregateMos, SummaryIsMeanOfRoleMeans) {
    testkit::Rng rng(8);
    std::vector<MosRecord> recs;
    for (int i = 0; i < 97; ++i) recs.push_back({"i", kRoleOrder[rng.below(6)], "e", 1 + static_cast<int>(rng.below(5))});
    recs.push_back({"i", "Gunther", "e", 2});
    const auto agg = aggregate_mos(recs);
    EXPECT_EQ(agg.roles.back().first, "Gunther");
    std::vector<double> means;
    for (const auto& [_, c] : agg.roles) means.push_back(c.mean);
    EXPECT_NEAR(agg.summary.mean, mean_of(means), 1e-12);
    EXPECT_NEAR(agg.summary.std, sample_std_of(means), 1e-12);
}

TEST(PublishedTables, MosAverageColumn) {
    for (const auto& row : kMosTable) {
        const auto cell = summarize(row.role_means);
        EXPECT_NEAR(cell.mean, row.summary_mean, 0.01) << row.system;
        EXPECT_NEAR(cell.mean, mean_of(row.role_means), 1e-12) << row.system;
    }
    const auto actor = summarize(kMosTable.back().role_means);
    EXPECT_EQ(format_cell(actor), "3.56 ± 0.27");
}

TEST(PublishedTables, ImprovementAllColumn) {
    for (const auto& row : kImprovementTable)
        EXPECT_NEAR(summarize(row.role_means).mean, row.summary_mean, 0.01) << row.system;
}

TEST(AggregateImprovement, CellReconstruction) {
    EXPECT_EQ(format_cell(aggregate_improvement(ratings("Phoebe", {1, 1, 1, 0.5})).roles[0].second), "0.88 ± 0.25");
    EXPECT_EQ(format_cell(aggregate_improvement(ratings("Joey", {1, 1, 0.5, 0.5})).roles[0].second), "0.75 ± 0.29");
    EXPECT_EQ(format_cell(aggregate_improvement(ratings("Chandler", {1, 1, 1, 0})).roles[0].second), "0.75 ± 0.50");
    EXPECT_EQ(error_code([] { aggregate_improvement(ratings("Joey", {0.7})); }), "InvalidRecord");
    EXPECT_EQ(error_code([] { aggregate_improvement({}); }), "EmptyInput");
}

TEST(AblationDelta, Examples) {
    std::map<std::string, double> full, same, minus_half, mixed;
    const std::vector<double> d{-0.2, -0.4, -0.3, -0.5, -0.1, -0.7};
    for (std::size_t k = 0; k < 6; ++k) {
        full[kRoleOrder[k]] = 3.0 + 0.1 * static_cast<double>(k);
        same[kRoleOrder[k]] = full[kRoleOrder[k]];
        minus_half[kRoleOrder[k]] = full[kRoleOrder[k]] - 0.5;
        mixed[kRoleOrder[k]] = full[kRoleOrder[k]] + d[k];
    }
    EXPECT_EQ(format_cell(ablation_delta(full, same)), "0.00 ± 0.00");
    EXPECT_EQ(format_cell(ablation_delta(full, minus_half)), "-0.50 ± 0.00");
    const auto cell = ablation_delta(full, mixed);
    EXPECT_EQ(format_cell(cell), "-0.37 ± 0.22");
    EXPECT_NEAR(cell.std, sample_std_of(d), 1e-12);
    auto missing = mixed;
    missing.erase("Ross");
    EXPECT_EQ(error_code([&] { ablation_delta(full, missing); }), "RoleSetMismatch");
}

TEST(Report, ColumnsAndFormat) {
    EXPECT_EQ(join(report_columns(ReportLayout::Mos)), "Phoebe, Joey, Chandler, Rachel, Ross, Monica, Average");
    EXPECT_EQ(join(report_columns(ReportLayout::Improvement)), "Phoebe, Joey, Chandler, Rachel, Ross, Monica, ALL");
    EXPECT_EQ(join(report_columns(ReportLayout::Ablation)), "RP-MOS");
    EXPECT_EQ(format_cell({3.5617, 0.27498, 6}), "3.56 ± 0.27");
    EXPECT_EQ(format_cell({1, 0, 1}), "1.00 ± 0.00");
}

TEST(Report, RendersGridWithBestMarker) {
    std::vector<MosRecord> a, b;
    for (const auto& role : kRoleOrder) {
        a.push_back({"i", role, "e", 4});
        b.push_back({"i", role, "e", role == "Ross" ? 5 : 2});
    }
    const std::vector<ReportRow> rows{to_row("A", aggregate_mos(a), ReportLayout::Mos), to_row("B", aggregate_mos(b), ReportLayout::Mos)};
    const auto r = render_report(rows, ReportLayout::Mos, true);
    EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "System,Phoebe,Joey,Chandler,Rachel,Ross,Monica,Average");
    EXPECT_NE(r.csv.find("A,4.00 ± 0.00,4.00 ± 0.00"), std::string::npos);
    EXPECT_EQ(r.csv.find("**"), std::string::npos);
    EXPECT_NE(r.text.find("**5.00 ± 0.00**"), std::string::npos);
    EXPECT_NE(r.text.find("**4.00 ± 0.00**"), std::string::npos);
    EXPECT_EQ(render_report(rows, ReportLayout::Mos, false).text.find("**"), std::string::npos);

    auto partial = rows;
    partial[1].cells.erase("Monica");
    EXPECT_EQ(error_code([&] { render_report(partial, ReportLayout::Mos); }), "IncompleteGrid");
}

TEST(Report, AblationLayout) {
    ReportRow row{"wo-scene", {{"RP-MOS", {-0.3, 0.17, 6}}}};
    const auto r = render_report({row}, ReportLayout::Ablation);
    EXPECT_EQ(r.csv, "Setting,RP-MOS\nwo-scene,-0.30 ± 0.17\n");
}

TEST(Csv, QuotingAndLineEndings) {
    const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,,3\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "3"}));
    EXPECT_EQ(error_code([] { parse_csv("\"open"); }), "ParseError");
}

TEST(Csv, MosRecords) {
    const auto recs = parse_mos_csv(
        " Role ,item_id,evaluator_id,raw_score,voice_mismatch,content_mismatch,system\n"
        "Joey,i1,e1,4,no,0,ActorMind\n"
        "Ross,i2,e1,5,yes,,F5-TTS\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].role, "Joey");
    EXPECT_EQ(recs[0].raw_score, 4);
    EXPECT_FALSE(recs[0].voice_mismatch);
    EXPECT_TRUE(recs[1].voice_mismatch);
    EXPECT_FALSE(recs[1].content_mismatch);
    EXPECT_EQ(recs[1].system, "F5-TTS");
    EXPECT_EQ(error_code([] { parse_mos_csv("role,item_id\nJoey,i1\n"); }), "ParseError");
    EXPECT_EQ(error_code([] {
                  parse_mos_csv("item_id,role,evaluator_id,raw_score,voice_mismatch,content_mismatch\ni,Joey,e,9,0,0\n");
              }),
              "ParseError");
    EXPECT_EQ(error_code([] {
                  parse_mos_csv("item_id,role,evaluator_id,raw_score,voice_mismatch,content_mismatch\ni,Joey,e,3,maybe,0\n");
              }),
              "ParseError");
}

TEST(Csv, ImprovementRecords) {
    const auto recs = parse_improvement_csv("role,system,evaluator_id,rating\nJoey,ActorMind + F5-TTS,e1,0.5\n");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].system_label, "ActorMind + F5-TTS");
    EXPECT_EQ(recs[0].rating, 0.5);
    EXPECT_EQ(error_code([] { parse_improvement_csv("role,system,evaluator_id,rating\nJoey,X,e1,0.7\n"); }), "ParseError");
}
