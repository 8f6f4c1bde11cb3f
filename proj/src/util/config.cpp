#include "cogan/util/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "cogan/error.hpp"

namespace cogan::util {

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open JSON file: " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    reject("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto tmp = path;
  tmp += ".tmp";
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) fail("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail("cannot move " + tmp.string() + " into place: " + ec.message());
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    reject("override must look like key=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  Json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) reject("unknown config key: " + key);
    node = &(*node)[part];
  }

  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  if (node->is_number() && !value.is_number()) reject("config key " + key + " expects a number");
  if (node->is_boolean() && !value.is_boolean()) reject("config key " + key + " expects true/false");
  if (node->is_string() && !value.is_string()) value = raw;
  *node = std::move(value);
}

void apply_overrides(Json& doc, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) apply_override(doc, a);
}

}  // namespace cogan::util
