#include "sgsacc/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "sgsacc/errors.hpp"

namespace sgsacc {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json counts_json(const BucketCounts& c) {
  return {{"all", c.overall}, {"seen", c.seen}, {"unseen", c.unseen}};
}

}  // namespace

json header_json(const ReportHeader& header) {
  return {{"command", header.command},
          {"config_hash", header.config_hash},
          {"seed", header.seed},
          {"backend", header.backend}};
}

json percentages_json(const Percentages& p) {
  return {{"all", optional_number(p.overall)},
          {"seen", optional_number(p.seen)},
          {"unseen", optional_number(p.unseen)}};
}

json metric_report_json(const MetricReport& r, std::size_t missing) {
  json per_slot = json::object();
  for (const auto& [slot, tally] : r.ser.per_slot) {
    per_slot[slot] = {{"errors", tally.errors},
                      {"occurrences", tally.occurrences},
                      {"ser", 100.0 * static_cast<double>(tally.errors) /
                                  static_cast<double>(tally.occurrences)}};
  }
  json out = {{"system_id", r.system_id},
              {"total", r.total},
              {"missing_generations", missing},
              {"ser", percentages_json(r.ser.ser)},
              {"sgsacc_all", percentages_json(r.sgsacc.all)},
              {"counts",
               {{"instances", counts_json(r.sgsacc.all_total)},
                {"faithful", counts_json(r.sgsacc.all_faithful)},
                {"ser_applicable", counts_json(r.ser.applicable)},
                {"ser_erroneous", counts_json(r.ser.erroneous)}}},
              {"ser_per_slot", std::move(per_slot)}};
  if (r.validation_ran) {
    out["sgsacc_validated"] = percentages_json(r.sgsacc.validated);
    out["validated_count"] = r.validated_count;
    out["excluded_count"] = r.excluded_count;
    out["counts"]["validated"] = counts_json(r.sgsacc.validated_total);
    out["counts"]["validated_faithful"] = counts_json(r.sgsacc.validated_faithful);
  } else {
    out["sgsacc_validated"] = nullptr;
  }
  return out;
}

json details_json(const ReportHeader& header, const SystemEvaluation& eval) {
  json instances = json::array();
  for (std::size_t i = 0; i < eval.results.size(); ++i) {
    const auto& r = eval.results[i];
    json actions = json::array();
    for (const auto& a : r.assessments) {
      actions.push_back({{"index", a.action_index},
                         {"reference", a.entailment_reference.text},
                         {"rule_id", a.entailment_reference.rule_id},
                         {"faithful", a.faithful},
                         {"augmented", a.used_augmented_premise},
                         {"p_entailment", a.verdict.entailment()}});
    }
    const auto& check = eval.slot_checks[i];
    json record = {{"instance_id", r.instance_id},
                   {"system_id", r.system_id},
                   {"validated", r.validated},
                   {"unseen", r.unseen},
                   {"faithful", r.instance_faithful},
                   {"slot_error", check.applicable ? json(check.slot_error) : json(nullptr)},
                   {"actions", std::move(actions)}};
    instances.push_back(std::move(record));
  }
  json out = header_json(header);
  out["system_id"] = eval.system_id;
  out["missing_generations"] = eval.missing_ids;
  out["instances"] = std::move(instances);
  return out;
}

json validation_json(const ReportHeader& header, std::span<const ValidationOutcome> outcomes) {
  json list = json::array();
  std::size_t passed = 0;
  for (const auto& o : outcomes) {
    if (o.passed) ++passed;
    list.push_back({{"instance_id", o.instance_id},
                    {"passed", o.passed},
                    {"failed_positive", o.failed_positive},
                    {"failed_negative", o.failed_negative}});
  }
  json out = header_json(header);
  out["total"] = outcomes.size();
  out["passed"] = passed;
  out["excluded"] = outcomes.size() - passed;
  out["exclusion_rate"] =
      outcomes.empty() ? json(nullptr)
                       : json(100.0 * static_cast<double>(outcomes.size() - passed) /
                              static_cast<double>(outcomes.size()));
  out["outcomes"] = std::move(list);
  return out;
}

json robustness_json(const RobustnessReport& r) {
  return {{"variant_id", r.variant_id},
          {"true_pos", r.counts.true_pos},
          {"false_pos", r.counts.false_pos},
          {"true_neg", r.counts.true_neg},
          {"false_neg", r.counts.false_neg},
          {"precision", optional_number(r.precision)},
          {"recall", optional_number(r.recall)},
          {"f1", optional_number(r.f1)}};
}

json references_json(std::span<const EvalInstance> instances,
                     std::span<const InstanceReferences> refs) {
  json out = json::array();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    json actions = json::array();
    for (std::size_t a = 0; a < refs[i].actions.size(); ++a) {
      const auto& action = instances[i].actions[a];
      json cands = json::array();
      for (const auto& c : refs[i].actions[a].candidates) {
        cands.push_back({{"text", c.text}, {"rule_id", c.rule_id}});
      }
      json negs = json::array();
      for (const auto& n : refs[i].actions[a].negatives) {
        negs.push_back(
            {{"text", n.text}, {"tampered_value", n.tampered_value}, {"rule_id", n.rule_id}});
      }
      actions.push_back({{"index", a},
                         {"intent", action.intent},
                         {"slot", action.slot ? json(*action.slot) : json(nullptr)},
                         {"values", action.values},
                         {"candidates", std::move(cands)},
                         {"negatives", std::move(negs)}});
    }
    out.push_back({{"instance_id", refs[i].instance_id}, {"actions", std::move(actions)}});
  }
  return out;
}

std::string format_percent(const std::optional<double>& value, int decimals) {
  if (!value) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << *value;
  return os.str();
}

void print_metric_table(std::ostream& out, std::span<const MetricReport> reports) {
  std::size_t name_width = 6;
  for (const auto& r : reports) name_width = std::max(name_width, r.system_id.size());
  const auto cell = [&](const std::string& s) { out << std::setw(8) << s; };
  const auto group = [&](const Percentages& p) {
    cell(format_percent(p.overall, 2));
    cell(format_percent(p.seen, 2));
    cell(format_percent(p.unseen, 2));
    out << "  ";
  };

  out << std::left << std::setw(static_cast<int>(name_width)) << "system" << std::right << "  "
      << std::setw(24) << "SER" << "  " << std::setw(24) << "SGSAcc(validated)" << "  "
      << std::setw(24) << "SGSAcc(all)" << "\n";
  out << std::setw(static_cast<int>(name_width)) << "" << "  ";
  for (int g = 0; g < 3; ++g) {
    cell("all");
    cell("seen");
    cell("unseen");
    out << "  ";
  }
  out << "\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.system_id << std::right
        << "  ";
    group(r.ser.ser);
    group(r.sgsacc.validated);
    group(r.sgsacc.all);
    out << "\n";
  }
}

void print_robustness_table(std::ostream& out, std::span<const RobustnessReport> reports) {
  std::size_t name_width = 7;
  for (const auto& r : reports) name_width = std::max(name_width, r.variant_id.size());
  out << std::left << std::setw(static_cast<int>(name_width)) << "variant" << std::right
      << std::setw(8) << "TP" << std::setw(8) << "FP" << std::setw(8) << "TN" << std::setw(8)
      << "FN" << std::setw(11) << "Precision" << std::setw(8) << "Recall" << std::setw(10)
      << "F1-Score" << "\n";
  for (const auto& r : reports) {
    const auto pct = [](const std::optional<double>& v) -> std::optional<double> {
      if (!v) return std::nullopt;
      return *v * 100.0;
    };
    out << std::left << std::setw(static_cast<int>(name_width)) << r.variant_id << std::right
        << std::setw(8) << r.counts.true_pos << std::setw(8) << r.counts.false_pos
        << std::setw(8) << r.counts.true_neg << std::setw(8) << r.counts.false_neg
        << std::setw(11) << format_percent(pct(r.precision), 1) << std::setw(8)
        << format_percent(pct(r.recall), 1) << std::setw(10) << format_percent(r.f1, 3) << "\n";
  }
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move report into place at '" + path.string() + "': " + ec.message());
  }
}

std::string file_stem_for(std::string_view system_id) {
  std::string out;
  for (const char c : system_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("system") : out;
}

}  // namespace sgsacc
