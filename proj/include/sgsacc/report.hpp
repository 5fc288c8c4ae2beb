#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgsacc/metrics.hpp"
#include "sgsacc/pipeline.hpp"
#include "sgsacc/robustness.hpp"

namespace sgsacc {

// Provenance stamped into every report.
struct ReportHeader {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string backend;
};

nlohmann::json header_json(const ReportHeader& header);

nlohmann::json percentages_json(const Percentages& p);
nlohmann::json metric_report_json(const MetricReport& report, std::size_t missing);
nlohmann::json details_json(const ReportHeader& header, const SystemEvaluation& eval);
nlohmann::json validation_json(const ReportHeader& header,
                               std::span<const ValidationOutcome> outcomes);
nlohmann::json robustness_json(const RobustnessReport& report);
nlohmann::json references_json(std::span<const EvalInstance> instances,
                               std::span<const InstanceReferences> refs);

// Summary table laid out as system | SER | SGSAcc(validated) | SGSAcc(all),
// each with all/seen/unseen columns. Absent values print as "-".
void print_metric_table(std::ostream& out, std::span<const MetricReport> reports);
// variant | TP FP TN FN | precision recall (one decimal, percent) | F1 (three decimals)
void print_robustness_table(std::ostream& out, std::span<const RobustnessReport> reports);

std::string format_percent(const std::optional<double>& value, int decimals);

// Writes through a sibling temporary file and a rename, so readers never see
// a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// A system id made safe for use in a file name.
std::string file_stem_for(std::string_view system_id);

}  // namespace sgsacc
