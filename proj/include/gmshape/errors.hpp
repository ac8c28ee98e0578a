#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gmshape {

/// Failure with a short machine-readable tag ("dimension", "rank-deficient",
/// "nonreal-roots", ...) plus optional numeric diagnostics such as a
/// singular-value profile. Pipeline stages annotate the failing stage before
/// rethrowing.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& message,
          std::vector<double> diagnostics = {})
        : std::runtime_error(message),
          tag_(std::move(tag)),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& tag() const noexcept { return tag_; }
    const std::vector<double>& diagnostics() const noexcept { return diagnostics_; }

    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    std::string tag_;
    std::string stage_;
    std::vector<double> diagnostics_;
};

}  // namespace gmshape
