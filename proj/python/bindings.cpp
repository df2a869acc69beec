#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "amb/actor.hpp"
#include "amb/align.hpp"
#include "amb/backend.hpp"
#include "amb/cli.hpp"
#include "amb/corpus.hpp"
#include "amb/emodb.hpp"
#include "amb/error.hpp"
#include "amb/eval.hpp"
#include "amb/format.hpp"
#include "amb/stats.hpp"

namespace py = pybind11;
using namespace amb;

namespace {

PyObject* g_error_type = nullptr;

py::dict cell_dict(const eval::AggCell& c) {
    py::dict d;
    d["mean"] = c.mean;
    d["std"] = c.std;
    d["n"] = c.n;
    d["text"] = eval::format_cell(c);
    return d;
}

py::dict aggregate_dict(const eval::RoleAggregate& agg) {
    py::dict roles;
    for (const auto& [name, cell] : agg.roles) roles[py::str(name)] = cell_dict(cell);
    py::dict out;
    out["roles"] = roles;
    out["summary"] = cell_dict(agg.summary);
    return out;
}

py::dict alignment_dict(const scenealign::AlignmentMap& a, const scenealign::BoundaryProjection& p) {
    py::list scenes;
    for (const auto& s : p.scenes) {
        py::dict d;
        d["label"] = s.label;
        d["start_index"] = s.start_index;
        d["end_index"] = s.end_index;
        scenes.append(d);
    }
    py::dict out;
    out["pairs"] = a.pairs;
    out["skipped_lines"] = a.skipped_lines;
    out["skipped_utterances"] = a.skipped_utterances;
    out["total_score"] = a.total_score;
    out["scenes"] = scenes;
    out["unanchored"] = p.unanchored;
    return out;
}

}  // namespace

PYBIND11_MODULE(_amb, m) {
    m.doc() = "Speech role-playing pipeline and benchmark tools";

    g_error_type = PyErr_NewException("actormind._amb.AmbError", PyExc_RuntimeError, nullptr);
    m.add_object("AmbError", py::handle(g_error_type));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(py::str(e.what()));
            inst.attr("code") = e.code();
            inst.attr("stage") = e.stage().empty() ? py::object(py::none()) : py::object(py::str(e.stage()));
            PyErr_SetObject(g_error_type, inst.ptr());
        }
    });

    m.def("normalize_text", &scenealign::normalize_text, py::arg("text"), "NFKD-normalized lowercase word tokens.");
    m.def("line_similarity", [](const std::string& a, const std::string& b) {
        return scenealign::line_similarity(scenealign::normalize_text(a), scenealign::normalize_text(b));
    }, py::arg("a"), py::arg("b"));

    m.def("align", [](const std::string& script_text, const std::vector<std::string>& utterances, double gap_penalty) {
        const auto script = scenealign::ScriptDocument::parse(script_text);
        std::vector<corpus::Utterance> utts(utterances.size());
        for (std::size_t i = 0; i < utterances.size(); ++i) {
            utts[i].id = std::to_string(i);
            utts[i].text = utterances[i];
        }
        const auto a = scenealign::align_script(script, utts, gap_penalty);
        return alignment_dict(a, scenealign::project_boundaries(a, script));
    }, py::arg("script_text"), py::arg("utterances"), py::arg("gap_penalty") = scenealign::kDefaultGapPenalty,
       "Align a script to utterance transcripts and project its scene boundaries.");

    m.def("format_duration", &scenealign::format_duration, py::arg("seconds"));
    m.def("parse_duration", &scenealign::parse_duration, py::arg("hms"));
    m.def("format_fixed", &format_fixed, py::arg("value"), py::arg("places") = 2);

    m.def("corpus_stats", [](const std::filesystem::path& manifest) {
        const auto t = scenealign::compute_stats(corpus::load_manifest(manifest));
        py::dict out;
        out["utterance_csv"] = scenealign::utterance_stats_csv(t);
        out["scene_csv"] = scenealign::scene_stats_csv(t);
        out["text"] = scenealign::utterance_stats_text(t) + "\n" + scenealign::scene_stats_text(t);
        return out;
    }, py::arg("manifest"));

    m.def("summarize", [](const std::vector<double>& values) { return cell_dict(eval::summarize(values)); }, py::arg("values"));
    m.def("aggregate_mos", [](const std::string& csv_text) {
        return aggregate_dict(eval::aggregate_mos(eval::parse_mos_csv(csv_text)));
    }, py::arg("csv_text"), "RP-MOS per role and overall from a ratings CSV.");
    m.def("aggregate_improvement", [](const std::string& csv_text) {
        return aggregate_dict(eval::aggregate_improvement(eval::parse_improvement_csv(csv_text)));
    }, py::arg("csv_text"));
    m.def("ablation_delta", [](const std::map<std::string, double>& full, const std::map<std::string, double>& ablated) {
        return cell_dict(eval::ablation_delta(full, ablated));
    }, py::arg("full"), py::arg("ablated"));

    m.def("build_database", [](const std::filesystem::path& manifest, const std::string& role, const std::filesystem::path& out) {
        const auto c = corpus::load_manifest(manifest);
        std::vector<corpus::Utterance> utts;
        for (const auto& e : c.episodes)
            for (const auto& u : e.utterances)
                if (u.role == role) utts.push_back(u);
        backends::MockBackend mock;
        const auto db = emodb::build_database(role, utts, mock, c.base_dir);
        emodb::persist_database(db, out);
        return db.entries.size();
    }, py::arg("manifest"), py::arg("role"), py::arg("out"), "Build and persist a role's emotion database with the mock backend.");

    m.def("fallback_index", &actor::fallback_index, py::arg("seed"), py::arg("target_utterance_id"), py::arg("db_size"));
    m.def("ablation_names", &actor::AblationConfig::ablation_names);

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "amb");
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = cli::execute(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run an amb subcommand in-process; returns (exit_code, stdout, stderr).");
}
