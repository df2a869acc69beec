#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace amb::actor {

/// Brain-stage prompt with `{name}` placeholders. Every name in kPlaceholders
/// must occur exactly once, and the marker lines "#ROLE: {role_name}" and
/// "#LAST_TONE: {last_caption}" must appear on lines of their own.
class PromptTemplate {
public:
    static constexpr std::array<std::string_view, 6> kPlaceholders{
        "role_profile", "scene_description", "dialogue_block", "target_line", "role_name", "last_caption"};

    /// Throws Error("TemplateError").
    static PromptTemplate from_text(std::string text);
    static PromptTemplate load(const std::filesystem::path& path);
    /// Built-in copy of assets/brain_prompt.txt.
    static const PromptTemplate& default_brain();

    const std::string& text() const { return text_; }

    /// Single pass: substituted values are never re-scanned, and unknown
    /// `{...}` sequences are copied verbatim.
    std::string fill(const std::map<std::string, std::string, std::less<>>& values) const;

private:
    explicit PromptTemplate(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

}  // namespace amb::actor
