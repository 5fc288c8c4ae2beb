#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sgsacc::detail {

std::string read_file(const std::filesystem::path& path);

// A JSON array, a JSON object holding an array under `array_key`, or JSON
// Lines. Blank lines in JSON Lines input are skipped.
std::vector<nlohmann::json> parse_records(std::string_view text, std::string_view source,
                                          std::string_view array_key);

// Field accessors that raise ParseError naming the record.
std::string require_string(const nlohmann::json& record, const char* key,
                           const std::string& where);
std::optional<std::string> optional_string(const nlohmann::json& record, const char* key,
                                           const std::string& where);
bool optional_bool(const nlohmann::json& record, const char* key, bool fallback,
                   const std::string& where);
std::vector<std::string> string_list(const nlohmann::json& record, const char* key,
                                     const std::string& where);

}  // namespace sgsacc::detail
