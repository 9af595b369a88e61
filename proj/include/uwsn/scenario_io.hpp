#pragma once

#include "uwsn/scenario.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace uwsn {

/// Scenario file error carrying the 1-based line it refers to (0 if unknown).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string source, int line, const std::string& message);

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Parse a YAML scenario. The schema is described in docs/scenario-format.md.
/// Unknown keys, wrong types and broken invariants raise ScenarioError.
Scenario parse_scenario(const std::string& text, const std::string& source_name = "<scenario>");

Scenario load_scenario(const std::filesystem::path& path);

} // namespace uwsn
