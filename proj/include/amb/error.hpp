#pragma once

#include <stdexcept>
#include <string>

namespace amb {

// Domain failure carrying a stable machine-readable code ("UnknownScene",
// "BackendUnavailable", ...) and, once it crosses the actor pipeline, the
// stage that raised it.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string stage = {})
        : std::runtime_error(message), code_(std::move(code)), stage_(std::move(stage)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }

    Error with_stage(std::string stage) const { return Error(code_, what(), std::move(stage)); }

private:
    std::string code_;
    std::string stage_;
};

}  // namespace amb
