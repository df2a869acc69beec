#include "amb/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "amb/error.hpp"

namespace amb::corpus {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw Error("ParseError", path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
        std::string full = path.empty() ? key : path + "." + key;
        throw Error("MissingField", "missing required field \"" + full + "\"");
    }
    return *it;
}

std::string child(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw Error("ParseError", child(path, key) + ": expected a string");
    return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw Error("ParseError", child(path, key) + ": expected a number");
    return v.get<double>();
}

std::size_t get_index(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_unsigned()) throw Error("ParseError", child(path, key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

const json& get_array(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array()) throw Error("ParseError", child(path, key) + ": expected an array");
    return v;
}

std::string indexed(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

}  // namespace

std::size_t Corpus::utterance_count() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.utterances.size();
    return n;
}

std::size_t Corpus::scene_count() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.scenes.size();
    return n;
}

const Episode* Corpus::find_episode(std::string_view id) const {
    for (const auto& e : episodes)
        if (e.id == id) return &e;
    return nullptr;
}

const RoleProfile* Corpus::find_role(std::string_view name) const {
    for (const auto& r : roles)
        if (r.name == name) return &r;
    return nullptr;
}

std::filesystem::path Corpus::resolve_asset(std::string_view ref) const {
    std::filesystem::path p{std::string(ref)};
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

ScenePosition locate_scene(const Corpus& c, std::string_view scene_id) {
    for (const auto& e : c.episodes)
        for (const auto& s : e.scenes)
            if (s.id == scene_id) return {&e, &s};
    throw Error("UnknownScene", "no scene with id \"" + std::string(scene_id) + "\"");
}

Corpus parse_manifest(std::string_view json_text, std::filesystem::path base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error("ParseError", std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error("ParseError", "manifest root must be an object");

    const json& version = require(doc, "version", "");
    if (!version.is_number_integer() || version.get<long long>() != 1)
        throw Error("ParseError", "unsupported manifest version " + version.dump());

    Corpus c;
    c.base_dir = std::move(base_dir);

    const json& roles = get_array(doc, "roles", "");
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const auto path = indexed("roles", i);
        c.roles.push_back({get_string(roles[i], "name", path), get_string(roles[i], "profile", path)});
    }

    const json& episodes = get_array(doc, "episodes", "");
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const auto path = indexed("episodes", i);
        Episode ep;
        ep.id = get_string(episodes[i], "id", path);

        const auto upath = child(path, "utterances");
        const json& utts = get_array(episodes[i], "utterances", path);
        ep.utterances.reserve(utts.size());
        for (std::size_t k = 0; k < utts.size(); ++k) {
            const auto p = indexed(upath, k);
            Utterance u;
            u.id = get_string(utts[k], "id", p);
            u.episode_id = ep.id;
            u.role = get_string(utts[k], "role", p);
            u.text = get_string(utts[k], "text", p);
            u.audio = get_string(utts[k], "audio", p);
            u.start_s = get_number(utts[k], "start_s", p);
            u.end_s = get_number(utts[k], "end_s", p);
            ep.utterances.push_back(std::move(u));
        }

        const auto spath = child(path, "scenes");
        const json& scenes = get_array(episodes[i], "scenes", path);
        for (std::size_t k = 0; k < scenes.size(); ++k) {
            const auto p = indexed(spath, k);
            Scene s;
            s.id = get_string(scenes[k], "id", p);
            s.episode_id = ep.id;
            s.start_index = get_index(scenes[k], "start_index", p);
            s.end_index = get_index(scenes[k], "end_index", p);
            s.description = get_string(scenes[k], "description", p);
            ep.scenes.push_back(std::move(s));
        }
        c.episodes.push_back(std::move(ep));
    }
    return c;
}

Corpus load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::string serialize_manifest(const Corpus& c) {
    ordered_json doc;
    doc["version"] = 1;
    doc["roles"] = ordered_json::array();
    for (const auto& r : c.roles) {
        ordered_json jr;
        jr["name"] = r.name;
        jr["profile"] = r.profile;
        doc["roles"].push_back(std::move(jr));
    }
    doc["episodes"] = ordered_json::array();
    for (const auto& e : c.episodes) {
        ordered_json je;
        je["id"] = e.id;
        je["utterances"] = ordered_json::array();
        for (const auto& u : e.utterances) {
            ordered_json ju;
            ju["id"] = u.id;
            ju["role"] = u.role;
            ju["text"] = u.text;
            ju["audio"] = u.audio;
            ju["start_s"] = u.start_s;
            ju["end_s"] = u.end_s;
            je["utterances"].push_back(std::move(ju));
        }
        je["scenes"] = ordered_json::array();
        for (const auto& s : e.scenes) {
            ordered_json js;
            js["id"] = s.id;
            js["start_index"] = s.start_index;
            js["end_index"] = s.end_index;
            js["description"] = s.description;
            je["scenes"].push_back(std::move(js));
        }
        doc["episodes"].push_back(std::move(je));
    }
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::strict) + "\n";
}

void save_manifest(const Corpus& c, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write manifest " + path.string());
    out << serialize_manifest(c);
}

ValidationReport validate_corpus(const Corpus& c) {
    ValidationReport report;
    auto add = [&](std::string type, std::string id, std::string msg) {
        report.violations.push_back({std::move(type), std::move(id), std::move(msg)});
    };

    std::unordered_set<std::string> role_names;
    for (const auto& r : c.roles) {
        if (r.name.empty()) add("role", r.name, "empty role name");
        else if (r.name == kOthers) add("role", r.name, "reserved role name");
        else if (!role_names.insert(r.name).second) add("role", r.name, "duplicate role name");
    }

    std::unordered_set<std::string> episode_ids, utterance_ids, scene_ids;
    for (const auto& ep : c.episodes) {
        if (!episode_ids.insert(ep.id).second) add("episode", ep.id, "duplicate episode id");

        for (const auto& u : ep.utterances) {
            if (!utterance_ids.insert(u.id).second) add("utterance", u.id, "duplicate utterance id");
            if (u.episode_id != ep.id) add("utterance", u.id, "episode id mismatch");
            if (u.start_s < 0.0) add("utterance", u.id, "negative start time");
            if (!(u.end_s > u.start_s)) add("utterance", u.id, "end time not after start time");
            if (u.role != kOthers && !role_names.contains(u.role)) add("utterance", u.id, "unknown role \"" + u.role + "\"");
        }

        const std::size_t n = ep.utterances.size();
        if (n > 0 && ep.scenes.empty()) add("episode", ep.id, "episode has no scenes");

        // Walk scenes in order; `covered` is one past the last position claimed so far.
        std::size_t covered = 0;
        for (const auto& s : ep.scenes) {
            if (!scene_ids.insert(s.id).second) add("scene", s.id, "duplicate scene id");
            if (s.episode_id != ep.id) add("scene", s.id, "episode id mismatch");
            if (s.start_index > s.end_index) {
                add("scene", s.id, "inverted scene span");
                continue;
            }
            if (s.end_index >= n) add("scene", s.id, "scene span out of range");
            if (s.start_index < covered) add("scene", s.id, "overlapping scenes");
            else if (s.start_index > covered) add("scene", s.id, "gap before scene");
            covered = std::max(covered, s.end_index + 1);
        }
        if (!ep.scenes.empty() && covered < n) add("episode", ep.id, "scenes do not cover the final utterances");
    }
    return report;
}

std::pair<Corpus, Corpus> split_episodes(const Corpus& c, const std::set<std::string>& test_ids) {
    for (const auto& id : test_ids)
        if (!c.find_episode(id)) throw Error("UnknownEpisode", "no episode with id \"" + id + "\"");

    Corpus train, test;
    train.roles = test.roles = c.roles;
    train.base_dir = test.base_dir = c.base_dir;
    for (const auto& ep : c.episodes) (test_ids.contains(ep.id) ? test : train).episodes.push_back(ep);
    return {std::move(train), std::move(test)};
}

std::vector<Utterance> scene_dialogue(const Corpus& c, std::string_view scene_id) {
    const auto [ep, scene] = locate_scene(c, scene_id);
    if (scene->start_index > scene->end_index || scene->end_index >= ep->utterances.size())
        throw Error("InvalidScene", "scene \"" + scene->id + "\" span is outside its episode");
    return {ep->utterances.begin() + static_cast<std::ptrdiff_t>(scene->start_index),
            ep->utterances.begin() + static_cast<std::ptrdiff_t>(scene->end_index) + 1};
}

}  // namespace amb::corpus
