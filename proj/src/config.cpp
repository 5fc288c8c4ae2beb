#include "sgsacc/config.hpp"

#include <cstdio>

#include "records.hpp"
#include "sgsacc/errors.hpp"

namespace sgsacc {

using nlohmann::json;

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions opts;
  opts.eval.validation = validation;
  opts.eval.augmentation = augmentation;
  opts.eval.ser_case_sensitive = ser_case_sensitive;
  opts.negatives.per_slot = negatives_per_slot;
  opts.negatives.seed = seed;
  opts.workers = workers == 0 ? 1 : workers;
  return opts;
}

namespace {

template <class T>
T get_as(const json& value, const std::string& key, const std::string& source) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ParseError(source + ": config key '" + key + "' has the wrong type");
  }
}

std::vector<std::filesystem::path> path_list(const json& value, const std::string& key,
                                             const std::string& source) {
  std::vector<std::filesystem::path> out;
  if (value.is_string()) {
    out.emplace_back(value.get<std::string>());
    return out;
  }
  for (const auto& p : get_as<std::vector<std::string>>(value, key, source)) out.emplace_back(p);
  return out;
}

}  // namespace

void merge_config(RunConfig& config, const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source + ": config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "schemas") {
      config.schemas = get_as<std::string>(value, key, source);
    } else if (key == "instances") {
      config.instances = get_as<std::string>(value, key, source);
    } else if (key == "generations") {
      config.generations = path_list(value, key, source);
    } else if (key == "variants") {
      config.variants = path_list(value, key, source);
    } else if (key == "nli") {
      config.nli = get_as<std::string>(value, key, source);
    } else if (key == "nli_url") {
      config.nli_url = get_as<std::string>(value, key, source);
    } else if (key == "unseen_domains") {
      config.unseen_domains = get_as<std::vector<std::string>>(value, key, source);
    } else if (key == "validation") {
      config.validation = get_as<bool>(value, key, source);
    } else if (key == "augmentation") {
      config.augmentation = get_as<bool>(value, key, source);
    } else if (key == "ser_case_sensitive") {
      config.ser_case_sensitive = get_as<bool>(value, key, source);
    } else if (key == "negatives_per_slot") {
      config.negatives_per_slot = get_as<std::size_t>(value, key, source);
    } else if (key == "seed") {
      config.seed = get_as<std::uint64_t>(value, key, source);
    } else if (key == "output_dir") {
      config.output_dir = get_as<std::string>(value, key, source);
    } else if (key == "workers") {
      config.workers = get_as<std::size_t>(value, key, source);
    } else {
      throw ParseError(source + ": unknown config key '" + key + "'");
    }
  }
  if (config.nli != "mock" && config.nli != "remote") {
    throw ParseError(source + ": nli must be 'mock' or 'remote'");
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig config;
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  merge_config(config, doc, path.string());
  // Data paths in the file are relative to the file itself.
  const auto base = path.parent_path();
  const auto anchor = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = (base / p).lexically_normal();
  };
  anchor(config.schemas);
  anchor(config.instances);
  for (auto& g : config.generations) anchor(g);
  for (auto& v : config.variants) anchor(v);
  return config;
}

json result_settings(const RunConfig& config) {
  const auto paths = [](const std::vector<std::filesystem::path>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.generic_string());
    return out;
  };
  return {{"schemas", config.schemas.generic_string()},
          {"instances", config.instances.generic_string()},
          {"generations", paths(config.generations)},
          {"variants", paths(config.variants)},
          {"nli", config.nli},
          {"nli_url", config.nli == "remote" ? config.nli_url : std::string()},
          {"unseen_domains", config.unseen_domains},
          {"validation", config.validation},
          {"augmentation", config.augmentation},
          {"ser_case_sensitive", config.ser_case_sensitive},
          {"negatives_per_slot", config.negatives_per_slot},
          {"seed", config.seed}};
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : result_settings(config).dump()) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::shared_ptr<CachingNli> make_backend(const RunConfig& config) {
  std::shared_ptr<NliBackend> inner;
  if (config.nli == "remote") {
    std::string url = config.nli_url.empty() ? RemoteNli::url_from_env() : config.nli_url;
    if (url.empty()) {
      throw InputError(std::string("no NLI service URL: pass --nli-url or set ") +
                       RemoteNli::kUrlEnv);
    }
    inner = std::make_shared<RemoteNli>(std::move(url));
  } else {
    inner = std::make_shared<MockNli>();
  }
  return std::make_shared<CachingNli>(std::move(inner));
}

}  // namespace sgsacc
