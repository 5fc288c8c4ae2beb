#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgsacc/nli.hpp"
#include "sgsacc/pipeline.hpp"

namespace sgsacc {

struct RunConfig {
  std::filesystem::path schemas;
  std::filesystem::path instances;
  std::vector<std::filesystem::path> generations;
  std::vector<std::filesystem::path> variants;
  std::string nli = "mock";  // "mock" | "remote"
  std::string nli_url;       // falls back to SGSACC_NLI_URL
  std::vector<std::string> unseen_domains;
  bool validation = true;
  bool augmentation = true;
  bool ser_case_sensitive = false;
  std::size_t negatives_per_slot = 3;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "sgsacc_out";
  std::size_t workers = 1;

  PipelineOptions pipeline_options() const;
};

// Overlays the keys present in `doc` onto `config`. Unknown keys and
// mistyped values raise ParseError.
void merge_config(RunConfig& config, const nlohmann::json& doc, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);

// Settings that can change results, as canonical JSON. Output location and
// worker count are left out: they never affect report contents.
nlohmann::json result_settings(const RunConfig& config);
// 16 hex digits of FNV-1a over result_settings().
std::string config_hash(const RunConfig& config);

// The configured backend wrapped in a result cache.
std::shared_ptr<CachingNli> make_backend(const RunConfig& config);

}  // namespace sgsacc
