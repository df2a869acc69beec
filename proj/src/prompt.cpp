#include "amb/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "amb/error.hpp"

namespace amb::actor {

namespace {

constexpr std::string_view kDefaultBrainPrompt =
    "You are a stage actor about to deliver your next line. Stay in character.\n"
    "\n"
    "Your character:\n"
    "{role_profile}\n"
    "\n"
    "The scene:\n"
    "{scene_description}\n"
    "\n"
    "What has been said so far, with the tone you heard in each voice:\n"
    "{dialogue_block}\n"
    "\n"
    "Your next line:\n"
    "{target_line}\n"
    "\n"
    "In one short phrase, describe the emotional state and tone of voice you will use to deliver this line. "
    "Answer with the phrase only.\n"
    "\n"
    "#ROLE: {role_name}\n"
    "#LAST_TONE: {last_caption}\n";

std::size_t count_of(std::string_view hay, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

bool has_line(std::string_view text, std::string_view line) {
    for (auto pos = text.find(line); pos != std::string_view::npos; pos = text.find(line, pos + 1)) {
        const bool starts = pos == 0 || text[pos - 1] == '\n';
        const auto end = pos + line.size();
        const bool ends = end == text.size() || text[end] == '\n' || text[end] == '\r';
        if (starts && ends) return true;
    }
    return false;
}

}  // namespace

PromptTemplate PromptTemplate::from_text(std::string text) {
    for (auto name : kPlaceholders) {
        const std::string token = "{" + std::string(name) + "}";
        const auto n = count_of(text, token);
        if (n != 1)
            throw Error("TemplateError", "placeholder " + token + " must occur exactly once (found " + std::to_string(n) + ")");
    }
    if (!has_line(text, "#ROLE: {role_name}")) throw Error("TemplateError", "missing marker line \"#ROLE: {role_name}\"");
    if (!has_line(text, "#LAST_TONE: {last_caption}")) throw Error("TemplateError", "missing marker line \"#LAST_TONE: {last_caption}\"");
    return PromptTemplate(std::move(text));
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read template " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

const PromptTemplate& PromptTemplate::default_brain() {
    static const PromptTemplate tpl = from_text(std::string(kDefaultBrainPrompt));
    return tpl;
}

std::string PromptTemplate::fill(const std::map<std::string, std::string, std::less<>>& values) const {
    std::string out;
    out.reserve(text_.size() * 2);
    std::size_t pos = 0;
    while (pos < text_.size()) {
        const auto open = text_.find('{', pos);
        if (open == std::string::npos) break;
        const auto close = text_.find('}', open + 1);
        if (close == std::string::npos) break;
        out.append(text_, pos, open - pos);
        const std::string_view name(text_.data() + open + 1, close - open - 1);
        if (name.find('{') != std::string_view::npos) {
            out += '{';
            pos = open + 1;
            continue;
        }
        if (auto it = values.find(name); it != values.end()) {
            out += it->second;
        } else {
            out.append(text_, open, close - open + 1);
        }
        pos = close + 1;
    }
    out.append(text_, pos);
    return out;
}

}  // namespace amb::actor
