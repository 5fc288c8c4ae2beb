#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sgsacc/errors.hpp"
#include "sgsacc/nli.hpp"

namespace sgsacc {

using nlohmann::json;

std::string encode_pairs(std::span<const NliPair> pairs) {
  json body = {{"pairs", json::array()}};
  for (const auto& p : pairs) {
    body["pairs"].push_back({{"premise", p.premise}, {"hypothesis", p.hypothesis}});
  }
  return body.dump();
}

std::vector<NliVerdict> parse_verdicts(std::string_view body, std::size_t expected) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("unparseable classify reply: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("verdicts") || !doc["verdicts"].is_array()) {
    throw ProtocolError("classify reply has no 'verdicts' list");
  }
  const auto& verdicts = doc["verdicts"];
  if (verdicts.size() != expected) {
    throw ProtocolError("classify reply has " + std::to_string(verdicts.size()) +
                        " verdicts for " + std::to_string(expected) + " pairs");
  }
  std::vector<NliVerdict> out;
  out.reserve(expected);
  for (const auto& v : verdicts) {
    const auto prob = [&](const char* key) {
      if (!v.is_object() || !v.contains(key) || !v[key].is_number()) {
        throw ProtocolError(std::string("verdict lacks numeric '") + key + "'");
      }
      return v[key].get<double>();
    };
    out.push_back(NliVerdict::make(prob("entailment"), prob("neutral"), prob("contradiction")));
  }
  return out;
}

RemoteNli::RemoteNli(std::string base_url, RetryPolicy retry, std::size_t max_batch,
                     std::chrono::seconds timeout)
    : base_url_(std::move(base_url)),
      retry_(retry),
      max_batch_(max_batch == 0 ? 1 : max_batch),
      timeout_(timeout),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) {
    throw std::invalid_argument("empty NLI service URL (set " + std::string(kUrlEnv) + ")");
  }
  const auto scheme = base_url_.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto path_start = base_url_.find('/', host_start);
  if (path_start == std::string::npos) {
    host_ = base_url_;
  } else {
    host_ = base_url_.substr(0, path_start);
    path_prefix_ = base_url_.substr(path_start);
  }
  if (retry_.attempts < 1) retry_.attempts = 1;
}

std::string RemoteNli::url_from_env() {
  const char* value = std::getenv(kUrlEnv);
  return value == nullptr ? std::string() : std::string(value);
}

std::vector<NliVerdict> RemoteNli::classify_batch(std::span<const NliPair> pairs) {
  check_pairs(pairs);
  std::vector<NliVerdict> out;
  out.reserve(pairs.size());
  for (std::size_t start = 0; start < pairs.size(); start += max_batch_) {
    const auto chunk = pairs.subspan(start, std::min(max_batch_, pairs.size() - start));
    auto verdicts = send_chunk(chunk);
    out.insert(out.end(), verdicts.begin(), verdicts.end());
  }
  return out;
}

std::vector<NliVerdict> RemoteNli::send_chunk(std::span<const NliPair> pairs) {
  const std::string body = encode_pairs(pairs);
  const std::string path = path_prefix_ + "/v1/classify";

  auto backoff = retry_.initial_backoff;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    httplib::Client client(host_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    const auto res = client.Post(path, body, "application/json");
    if (res && res->status == 200) {
      return parse_verdicts(res->body, pairs.size());
    }
    if (res) {
      last_status = res->status;
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500) {
        throw ProtocolError("NLI service rejected request: " + last_error + " " + res->body);
      }
    } else {
      last_status = 0;
      last_error = httplib::to_string(res.error());
    }
    if (attempt < retry_.attempts) {
      sleeper_(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("NLI service at " + base_url_ + " unavailable after " +
                           std::to_string(retry_.attempts) + " attempts: " + last_error,
                       retry_.attempts, last_status);
}

}  // namespace sgsacc
