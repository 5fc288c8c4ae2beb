#include "records.hpp"

#include <fstream>
#include <sstream>

#include "sgsacc/errors.hpp"

namespace sgsacc::detail {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw InputError("failed reading '" + path.string() + "'");
  }
  return buffer.str();
}

namespace {

std::string_view trim_left(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' ||
                           text.front() == '\n' || text.front() == '\r')) {
    text.remove_prefix(1);
  }
  return text;
}

}  // namespace

std::vector<json> parse_records(std::string_view text, std::string_view source,
                                std::string_view array_key) {
  std::vector<json> records;
  const std::string_view body = trim_left(text);
  if (body.empty()) {
    return records;
  }

  if (body.front() == '[') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(source) + ": " + e.what());
    }
    for (auto& item : doc) {
      records.push_back(std::move(item));
    }
    return records;
  }

  // An object is either a wrapper around the array or the first JSON Lines record.
  if (body.front() == '{') {
    try {
      json doc = json::parse(body);
      if (!array_key.empty() && doc.is_object() && doc.contains(array_key) &&
          doc[std::string(array_key)].is_array()) {
        for (auto& item : doc[std::string(array_key)]) {
          records.push_back(std::move(item));
        }
      } else {
        records.push_back(std::move(doc));
      }
      return records;
    } catch (const json::parse_error&) {
      // Not a single document; fall through to JSON Lines.
    }
  }

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (trim_left(line).empty()) {
      continue;
    }
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::string require_string(const json& record, const char* key, const std::string& where) {
  if (!record.is_object()) {
    throw ParseError(where + ": record is not an object");
  }
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  if (!it->is_string()) {
    throw ParseError(where + ": field '" + key + "' is not a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& record, const char* key,
                                           const std::string& where) {
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw ParseError(where + ": field '" + key + "' is not a string");
  }
  return it->get<std::string>();
}

bool optional_bool(const json& record, const char* key, bool fallback, const std::string& where) {
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    return fallback;
  }
  if (!it->is_boolean()) {
    throw ParseError(where + ": field '" + key + "' is not a boolean");
  }
  return it->get<bool>();
}

std::vector<std::string> string_list(const json& record, const char* key,
                                     const std::string& where) {
  std::vector<std::string> out;
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    return out;
  }
  if (!it->is_array()) {
    throw ParseError(where + ": field '" + key + "' is not a list");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ParseError(where + ": field '" + key + "' holds a non-string entry");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace sgsacc::detail
