#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cogan::util {

using Json = nlohmann::json;

Json read_json(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames, so readers never see
/// a half-written document.
void write_json(const std::filesystem::path& path, const Json& doc);

/// Applies `dotted.key=value` to an existing document. The key must already
/// exist; values are parsed as JSON literals and fall back to plain strings.
void apply_override(Json& doc, std::string_view assignment);
void apply_overrides(Json& doc, const std::vector<std::string>& assignments);

}  // namespace cogan::util
