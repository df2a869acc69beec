#include "amb/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "amb/actor.hpp"
#include "amb/align.hpp"
#include "amb/backend.hpp"
#include "amb/corpus.hpp"
#include "amb/emodb.hpp"
#include "amb/error.hpp"
#include "amb/eval.hpp"
#include "amb/format.hpp"
#include "amb/stats.hpp"

namespace amb::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    std::uint64_t seed = 42;
    std::string backend = "mock";
    std::size_t jobs = 1;
    std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Seed for every seeded choice")->capture_default_str();
    cmd->add_option("--backend", c.backend, "mock | remote:URL")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "Parallel backend calls")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write " + p.string());
    out << text;
}

fs::path out_dir(const Common& c) {
    fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("IoError", "cannot create output directory " + dir.string());
    return dir;
}

backends::BackendConfig backend_config(const Common& c) {
    backends::BackendConfig cfg;
    cfg.seed = c.seed;
    cfg.max_parallel = c.jobs;
    if (c.backend == "mock") {
        cfg.mode = backends::BackendMode::Mock;
    } else if (c.backend == "remote" || c.backend.starts_with("remote:")) {
        cfg.mode = backends::BackendMode::Remote;
        if (c.backend.size() > 7) cfg.base_url = c.backend.substr(7);
        if (const char* env = std::getenv("AMB_BACKEND_URL"); env && *env) cfg.base_url = env;
    } else {
        throw Error("ConfigError", "unknown backend \"" + c.backend + "\" (expected mock or remote:URL)");
    }
    cfg.validate();
    return cfg;
}

corpus::Corpus load_valid(const std::string& path) {
    auto c = corpus::load_manifest(path);
    const auto report = corpus::validate_corpus(c);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw Error("InvalidCorpus", std::to_string(report.violations.size()) + " violation(s); first: " + v.type + " \"" +
                                         v.id + "\": " + v.message);
    }
    return c;
}

std::set<std::string> split_list(const std::string& s) {
    std::set<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

corpus::Corpus rebase_assets(corpus::Corpus c, const fs::path& to) {
    const auto from = fs::weakly_canonical(fs::absolute(c.base_dir.empty() ? fs::path(".") : c.base_dir));
    const auto dest = fs::weakly_canonical(fs::absolute(to));
    if (from == dest) return c;
    for (auto& e : c.episodes)
        for (auto& u : e.utterances) {
            fs::path p(u.audio);
            if (p.is_absolute()) continue;
            u.audio = fs::relative(fs::weakly_canonical(from / p), dest).generic_string();
        }
    c.base_dir = to;
    return c;
}

std::vector<corpus::Utterance> role_utterances(const corpus::Corpus& c, const std::string& role,
                                               const std::set<std::string>& exclude) {
    std::vector<corpus::Utterance> out;
    for (const auto& e : c.episodes) {
        if (exclude.contains(e.id)) continue;
        for (const auto& u : e.utterances)
            if (u.role == role) out.push_back(u);
    }
    return out;
}

ojson alignment_json(const scenealign::AlignmentMap& a, const scenealign::BoundaryProjection& p) {
    ojson j;
    ojson pairs = ojson::array();
    for (const auto& [l, u] : a.pairs) pairs.push_back({l, u});
    j["pairs"] = pairs;
    j["skipped_lines"] = a.skipped_lines;
    j["skipped_utterances"] = a.skipped_utterances;
    j["total_score"] = a.total_score;
    ojson scenes = ojson::array();
    for (const auto& s : p.scenes) {
        ojson o;
        o["label"] = s.label;
        o["start_index"] = s.start_index;
        o["end_index"] = s.end_index;
        scenes.push_back(o);
    }
    j["scenes"] = scenes;
    j["unanchored"] = p.unanchored;
    return j;
}

std::vector<corpus::Utterance> read_utterances(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("ParseError", path.string() + ": " + e.what());
    }
    const auto& arr = j.is_object() && j.contains("utterances") ? j["utterances"] : j;
    if (!arr.is_array()) throw Error("ParseError", path.string() + ": expected an array of utterances");
    std::vector<corpus::Utterance> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& o = arr[i];
        if (!o.is_object() || !o.contains("text") || !o["text"].is_string())
            throw Error("MissingField", "utterances[" + std::to_string(i) + "].text");
        corpus::Utterance u;
        u.id = o.value("id", std::to_string(i));
        u.role = o.value("role", "");
        u.text = o["text"].get<std::string>();
        out.push_back(std::move(u));
    }
    return out;
}

struct PerformArgs {
    std::string manifest, db, role, template_path;
    std::optional<std::size_t> window;
};

struct Session {
    corpus::Corpus corpus;
    emodb::EmotionDatabase db;
    actor::PromptTemplate tpl = actor::PromptTemplate::default_brain();
    std::unique_ptr<backends::Backend> backend;
};

Session open_session(const PerformArgs& a, const Common& c) {
    Session s{load_valid(a.manifest), {}, actor::PromptTemplate::default_brain(), backends::make_backend(backend_config(c))};
    if (!a.template_path.empty()) s.tpl = actor::PromptTemplate::load(a.template_path);
    if (!a.db.empty()) {
        s.db = emodb::load_database(a.db);
        if (s.db.role != a.role)
            throw Error("RoleMismatch", "database is for \"" + s.db.role + "\", not \"" + a.role + "\"");
    } else {
        s.db = emodb::build_database(a.role, role_utterances(s.corpus, a.role, {}), *s.backend, s.corpus.base_dir);
    }
    return s;
}

std::string emit_error(const Error& e) {
    ojson j;
    j["error"]["code"] = e.code();
    j["error"]["message"] = e.what();
    j["error"]["stage"] = e.stage().empty() ? ojson(nullptr) : ojson(e.stage());
    return j.dump();
}

std::vector<std::pair<std::string, std::size_t>> read_targets(const fs::path& path) {
    const auto rows = eval::parse_csv(read_text(path));
    std::vector<std::pair<std::string, std::size_t>> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.empty() || (r.size() == 1 && r[0].empty()) || r[0].starts_with("#")) continue;
        if (r.size() != 2) throw Error("ParseError", "targets line " + std::to_string(i + 1) + ": expected scene,position");
        if (i == 0 && r[1] == "position") continue;
        std::size_t pos = 0;
        try {
            std::size_t used = 0;
            const auto v = std::stoul(r[1], &used);
            if (used != r[1].size()) throw std::invalid_argument("trailing");
            pos = v;
        } catch (const std::exception&) {
            throw Error("ParseError", "targets line " + std::to_string(i + 1) + ": bad position \"" + r[1] + "\"");
        }
        out.emplace_back(r[0], pos);
    }
    return out;
}

template <class Records, class Key>
std::vector<std::pair<std::string, Records>> group_by(const Records& records, Key key) {
    std::vector<std::pair<std::string, Records>> groups;
    for (const auto& r : records) {
        const std::string k = key(r);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == k; });
        if (it == groups.end()) {
            groups.emplace_back(k, Records{});
            it = std::prev(groups.end());
        }
        it->second.push_back(r);
    }
    return groups;
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Speech role-playing pipeline and benchmark tools", "amb"};
    app.require_subcommand(1);

    Common common;
    std::string manifest, script_path, utterances_path, test_episodes, role, exclude, db_path, template_path, targets;
    std::string scene, ablation = "full", records, reference = "ActorMind";
    std::size_t position = 0, window = 0;
    bool bold = false;

    auto* align = app.add_subcommand("align", "Align a script to utterances and project scene boundaries");
    align->add_option("--script", script_path, "Script text file")->required();
    align->add_option("--utterances", utterances_path, "Utterance JSON (array or {\"utterances\": [...]})")->required();
    add_common(align, common);

    auto* stats = app.add_subcommand("stats", "Utterance and scene statistics tables");
    stats->add_option("--manifest", manifest)->required();
    add_common(stats, common);

    auto* split = app.add_subcommand("split", "Split a manifest into train and test episodes");
    split->add_option("--manifest", manifest)->required();
    split->add_option("--test-episodes", test_episodes, "Comma-separated episode ids")->required();
    add_common(split, common);

    auto* build_db = app.add_subcommand("build-db", "Build a role's emotion database");
    build_db->add_option("--manifest", manifest)->required();
    build_db->add_option("--role", role)->required();
    build_db->add_option("--exclude-episodes", exclude, "Comma-separated episode ids to leave out");
    add_common(build_db, common);

    auto add_perform_opts = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", manifest)->required();
        cmd->add_option("--role", role)->required();
        cmd->add_option("--db", db_path, "Emotion database (built from the manifest when omitted)");
        cmd->add_option("--template", template_path, "Brain prompt template");
        cmd->add_option("--window", window, "Preceding utterances to keep (0 = whole scene prefix)");
        add_common(cmd, common);
    };

    auto* perform = app.add_subcommand("perform", "Deliver one target line");
    perform->add_option("--scene", scene)->required();
    perform->add_option("--position", position, "Target index within the scene")->required();
    perform->add_option("--ablation", ablation, "full or one of the ablation presets")->capture_default_str();
    add_perform_opts(perform);

    auto* ablate = app.add_subcommand("ablate", "Run the full pipeline and every ablation over a target list");
    ablate->add_option("--targets", targets, "CSV of scene,position")->required();
    add_perform_opts(ablate);

    auto* eval_cmd = app.add_subcommand("eval", "Aggregate ratings into report tables");
    eval_cmd->require_subcommand(1);
    auto* eval_mos = eval_cmd->add_subcommand("mos", "RP-MOS table per system");
    auto* eval_imp = eval_cmd->add_subcommand("improvement", "Improvement-over-baseline table per system");
    auto* eval_delta = eval_cmd->add_subcommand("delta", "Ablation deltas against a reference system");
    for (auto* cmd : {eval_mos, eval_imp, eval_delta}) {
        cmd->add_option("--records", records, "Ratings CSV")->required();
        cmd->add_flag("--bold", bold, "Mark the best value per column");
        add_common(cmd, common);
    }
    eval_delta->add_option("--reference", reference, "System the others are compared with")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("amb");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "amb: " << e.what() << "\n" << app.help();
        return 2;
    }

    const PerformArgs pargs{manifest, db_path, role, template_path,
                            window == 0 ? std::nullopt : std::optional<std::size_t>(window)};

    try {
        if (align->parsed()) {
            const auto script = scenealign::ScriptDocument::parse(read_text(script_path));
            const auto utts = read_utterances(utterances_path);
            const auto a = scenealign::align_script(script, utts);
            const auto p = scenealign::project_boundaries(a, script);
            write_text(out_dir(common) / "alignment.json", alignment_json(a, p).dump(2) + "\n");
            for (const auto& label : p.unanchored) err << "warning: UnanchoredScene \"" << label << "\"\n";
        } else if (stats->parsed()) {
            const auto c = load_valid(manifest);
            const auto t = scenealign::compute_stats(c);
            const auto dir = out_dir(common);
            write_text(dir / "utterance_stats.csv", scenealign::utterance_stats_csv(t));
            write_text(dir / "scene_stats.csv", scenealign::scene_stats_csv(t));
            write_text(dir / "stats.txt", scenealign::utterance_stats_text(t) + "\n" + scenealign::scene_stats_text(t));
        } else if (split->parsed()) {
            const auto c = corpus::load_manifest(manifest);
            auto [train, test] = corpus::split_episodes(c, split_list(test_episodes));
            const auto n_train = train.episodes.size(), n_test = test.episodes.size();
            const auto dir = out_dir(common);
            corpus::save_manifest(rebase_assets(std::move(train), dir), dir / "train.json");
            corpus::save_manifest(rebase_assets(std::move(test), dir), dir / "test.json");
            out << "train " << n_train << " episodes, test " << n_test << " episodes\n";
        } else if (build_db->parsed()) {
            const auto c = load_valid(manifest);
            const auto backend = backends::make_backend(backend_config(common));
            const auto db = emodb::build_database(role, role_utterances(c, role, split_list(exclude)), *backend, c.base_dir);
            emodb::persist_database(db, out_dir(common) / (role + ".emodb.jsonl"));
        } else if (perform->parsed()) {
            auto cfg = actor::AblationConfig::preset(ablation, common.seed);
            const auto s = open_session(pargs, common);
            const auto bundle = actor::perform_line(s.corpus, role, scene, position, s.db, s.tpl, cfg, *s.backend, pargs.window);
            actor::write_bundle(bundle, out_dir(common), bundle.target_utterance_id);
        } else if (ablate->parsed()) {
            const auto list = read_targets(targets);
            const auto s = open_session(pargs, common);
            const auto dir = out_dir(common);
            std::vector<std::string> presets{"full"};
            for (const auto& n : actor::AblationConfig::ablation_names()) presets.push_back(n);
            std::string summary = "setting,target_utterance_id,emotion_state,retrieved_id,retrieval_bypassed\n";
            for (const auto& name : presets) {
                const auto cfg = actor::AblationConfig::preset(name, common.seed);
                for (const auto& [sc, pos] : list) {
                    const auto b = actor::perform_line(s.corpus, role, sc, pos, s.db, s.tpl, cfg, *s.backend, pargs.window);
                    actor::write_bundle(b, dir / name, b.target_utterance_id);
                    summary += csv_row({name, b.target_utterance_id, b.emotion_state ? b.emotion_state->text() : "",
                                        b.retrieved_id.value_or(""), b.retrieval_bypassed ? "true" : "false"});
                }
            }
            write_text(dir / "ablate.csv", summary);
        } else if (eval_mos->parsed() || eval_imp->parsed() || eval_delta->parsed()) {
            const auto text = read_text(records);
            std::vector<eval::ReportRow> rows;
            eval::ReportLayout layout;
            std::string stem;
            if (eval_imp->parsed()) {
                layout = eval::ReportLayout::Improvement;
                stem = "improvement_report";
                const auto recs = eval::parse_improvement_csv(text);
                for (const auto& [label, g] : group_by(recs, [](const auto& r) { return r.system_label; }))
                    rows.push_back(eval::to_row(label, eval::aggregate_improvement(g), layout));
            } else {
                const auto recs = eval::parse_mos_csv(text);
                const auto groups = group_by(recs, [](const auto& r) { return r.system; });
                if (eval_mos->parsed()) {
                    layout = eval::ReportLayout::Mos;
                    stem = "mos_report";
                    for (const auto& [label, g] : groups)
                        rows.push_back(eval::to_row(label.empty() ? "all" : label, eval::aggregate_mos(g), layout));
                } else {
                    layout = eval::ReportLayout::Ablation;
                    stem = "delta_report";
                    const auto ref = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == reference; });
                    if (ref == groups.end()) throw Error("UnknownSystem", "no records for reference system \"" + reference + "\"");
                    const auto full = eval::aggregate_mos(ref->second).role_means();
                    for (const auto& [label, g] : groups) {
                        if (label == reference) continue;
                        rows.push_back({label, {{"RP-MOS", eval::ablation_delta(full, eval::aggregate_mos(g).role_means())}}});
                    }
                }
            }
            const auto report = eval::render_report(rows, layout, bold);
            const auto dir = out_dir(common);
            write_text(dir / (stem + ".txt"), report.text);
            write_text(dir / (stem + ".csv"), report.csv);
            out << report.text;
        }
    } catch (const Error& e) {
        err << emit_error(e) << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << emit_error(Error("IoError", e.what())) << "\n";
        return 1;
    }
    return 0;
}

int execute(const std::vector<std::string>& args) { return execute(args, std::cout, std::cerr); }

}  // namespace amb::cli
