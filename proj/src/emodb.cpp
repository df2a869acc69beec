#include "amb/emodb.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "amb/error.hpp"

namespace amb::emodb {

namespace {

using nlohmann::json;

std::string number17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error("ParseError", "line " + std::to_string(line) + ": " + what);
}

}  // namespace

EmotionDatabase build_database(const std::string& role, const std::vector<corpus::Utterance>& utterances,
                               const backends::Backend& backend, const std::filesystem::path& asset_base) {
    if (utterances.empty()) throw Error("EmptyInput", "role \"" + role + "\" has no utterances to index");

    std::unordered_set<std::string> seen;
    for (const auto& u : utterances) {
        if (u.role != role)
            throw Error("PreconditionViolation", "utterance \"" + u.id + "\" belongs to \"" + u.role + "\", not \"" + role + "\"");
        if (!seen.insert(u.id).second) throw Error("PreconditionViolation", "duplicate utterance id \"" + u.id + "\"");
    }

    std::vector<std::string> captions;
    captions.reserve(utterances.size());
    for (const auto& u : utterances) {
        std::filesystem::path p(u.audio);
        if (!p.is_absolute() && !asset_base.empty()) p = asset_base / p;
        auto caption = backend.caption_emotion(p);
        if (caption.empty()) throw Error("EmptyCaption", "empty caption for utterance \"" + u.id + "\"");
        captions.push_back(std::move(caption));
    }
    auto embeddings = backend.embed(captions);
    if (embeddings.size() != utterances.size()) throw Error("ProtocolError", "embedder returned the wrong number of vectors");

    EmotionDatabase db;
    db.role = role;
    db.dim = embeddings.front().dim();
    db.entries.reserve(utterances.size());
    for (std::size_t i = 0; i < utterances.size(); ++i) {
        if (embeddings[i].dim() != db.dim) throw Error("DimMismatch", "embedder returned vectors of differing dimension");
        db.entries.push_back({utterances[i].id, std::move(captions[i]), std::move(embeddings[i]), utterances[i].audio});
    }
    return db;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim())
        throw Error("DimMismatch", "cosine of vectors with dims " + std::to_string(u.dim()) + " and " + std::to_string(v.dim()));
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        dot += u.values[i] * v.values[i];
        uu += u.values[i] * u.values[i];
        vv += v.values[i] * v.values[i];
    }
    if (uu == 0.0 || vv == 0.0) throw Error("ZeroVector", "cosine of a zero vector");
    return dot / (std::sqrt(uu) * std::sqrt(vv));
}

Match nearest(const EmotionDatabase& db, const EmbeddingVector& query) {
    if (db.entries.empty()) throw Error("EmptyDatabase", "emotion database for \"" + db.role + "\" is empty");
    Match best;
    for (const auto& e : db.entries) {
        const double s = cosine(query, e.embedding);
        if (!best.entry || s > best.similarity || (s == best.similarity && e.utterance_id < best.entry->utterance_id)) {
            best.entry = &e;
            best.similarity = s;
        }
    }
    return best;
}

Match query_top1(const EmotionDatabase& db, const std::string& state, const backends::Backend& backend) {
    if (db.entries.empty()) throw Error("EmptyDatabase", "emotion database for \"" + db.role + "\" is empty");
    const auto query = backend.embed({state});
    return nearest(db, query.at(0));
}

std::string serialize_database(const EmotionDatabase& db) {
    std::string out = "{\"version\":1,\"role\":" + quoted(db.role) + ",\"dim\":" + std::to_string(db.dim) +
                      ",\"count\":" + std::to_string(db.entries.size()) + "}\n";
    for (const auto& e : db.entries) {
        out += "{\"utterance_id\":" + quoted(e.utterance_id) + ",\"caption\":" + quoted(e.caption) + ",\"embedding\":[";
        for (std::size_t i = 0; i < e.embedding.values.size(); ++i) {
            if (i) out += ',';
            out += number17(e.embedding.values[i]);
        }
        out += "],\"audio\":" + quoted(e.audio) + "}\n";
    }
    return out;
}

EmotionDatabase parse_database(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;

    auto next_json = [&](json& out) {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                out = json::parse(line);
            } catch (const json::parse_error&) {
                parse_fail(lineno, "not valid JSON");
            }
            return true;
        }
        return false;
    };

    json header;
    if (!next_json(header)) throw Error("ParseError", "empty database file");
    EmotionDatabase db;
    std::size_t count = 0;
    try {
        if (header.at("version") != 1) throw Error("VersionMismatch", "unsupported database version " + header.at("version").dump());
        db.role = header.at("role").get<std::string>();
        db.dim = header.at("dim").get<std::size_t>();
        count = header.at("count").get<std::size_t>();
    } catch (const json::exception& e) {
        parse_fail(lineno, std::string("bad header: ") + e.what());
    }
    if (db.dim == 0) parse_fail(lineno, "dim must be positive");

    std::unordered_set<std::string> ids;
    json row;
    while (next_json(row)) {
        EmotionEntry e;
        try {
            e.utterance_id = row.at("utterance_id").get<std::string>();
            e.caption = row.at("caption").get<std::string>();
            e.embedding.values = row.at("embedding").get<std::vector<double>>();
            e.audio = row.at("audio").get<std::string>();
        } catch (const json::exception& ex) {
            parse_fail(lineno, std::string("bad entry: ") + ex.what());
        }
        if (e.embedding.dim() != db.dim)
            parse_fail(lineno, "embedding has dim " + std::to_string(e.embedding.dim()) + ", header says " + std::to_string(db.dim));
        if (e.caption.empty()) parse_fail(lineno, "empty caption");
        if (!ids.insert(e.utterance_id).second) parse_fail(lineno, "duplicate utterance id \"" + e.utterance_id + "\"");
        db.entries.push_back(std::move(e));
    }
    if (db.entries.size() != count)
        throw Error("ParseError", "header declares " + std::to_string(count) + " entries, file has " + std::to_string(db.entries.size()));
    return db;
}

void persist_database(const EmotionDatabase& db, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write database " + path.string());
    out << serialize_database(db);
}

EmotionDatabase load_database(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read database " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_database(ss.str());
}

}  // namespace amb::emodb
