#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace klmedian::cli {

inline const char* const kSuites[] = {"frechet", "simplify", "sensitivity", "coreset", "median1"};

/// Runs one oracle suite against the fixtures in `fixture_dir`. The report has
/// the form {"suite", "pass", "checks": [{"name", "pass", ...}]}; a fixture that
/// cannot be read becomes a failed check named after the file.
nlohmann::json run_suite(const std::string& suite, const std::string& fixture_dir, std::uint64_t seed);

}  // namespace klmedian::cli
