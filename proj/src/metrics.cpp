#include "sgsacc/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sgsacc {

DomainSplit DomainSplit::from_instances(std::span<const EvalInstance> instances) {
  DomainSplit split;
  for (const auto& inst : instances) split.unseen_[inst.instance_id] = inst.is_unseen_domain;
  return split;
}

bool DomainSplit::is_unseen(std::string_view instance_id) const {
  const auto it = unseen_.find(std::string(instance_id));
  if (it == unseen_.end()) {
    throw std::out_of_range("instance '" + std::string(instance_id) + "' not in domain split");
  }
  return it->second;
}

Percentages percentages(const BucketCounts& hits, const BucketCounts& totals) {
  const auto pct = [](std::size_t h, std::size_t t) -> std::optional<double> {
    if (t == 0) return std::nullopt;
    return 100.0 * static_cast<double>(h) / static_cast<double>(t);
  };
  return {pct(hits.overall, totals.overall), pct(hits.seen, totals.seen),
          pct(hits.unseen, totals.unseen)};
}

SgsaccScores compute_sgsacc(std::span<const InstanceResult> results, const DomainSplit& split) {
  SgsaccScores s;
  for (const auto& r : results) {
    const bool unseen = split.is_unseen(r.instance_id);
    s.all_total.add(unseen);
    if (r.instance_faithful) s.all_faithful.add(unseen);
    if (r.validated) {
      s.validated_total.add(unseen);
      if (r.instance_faithful) s.validated_faithful.add(unseen);
    }
  }
  s.all = percentages(s.all_faithful, s.all_total);
  s.validated = percentages(s.validated_faithful, s.validated_total);
  return s;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

SlotErrorCheck check_slot_errors(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const SchemaCatalog& catalog,
                                 bool case_sensitive) {
  SlotErrorCheck check;
  check.instance_id = instance.instance_id;
  const std::string text = case_sensitive ? generation.text : lower(generation.text);
  for (const auto& action : instance.actions) {
    if (!action.slot || action.values.empty()) continue;
    const SlotSchema* slot = catalog.find_slot(instance.service, *action.slot);
    if (slot == nullptr || slot->is_categorical) continue;
    check.applicable = true;
    for (const auto& value : action.values) {
      const std::string needle = case_sensitive ? value : lower(value);
      const bool found = text.find(needle) != std::string::npos;
      check.values.push_back({*action.slot, value, found});
      if (!found) check.slot_error = true;
    }
  }
  return check;
}

SerScores compute_ser(std::span<const SlotErrorCheck> checks, const DomainSplit& split,
                      std::span<const EvalInstance> instances) {
  std::unordered_map<std::string_view, std::string_view> service_of;
  for (const auto& inst : instances) service_of[inst.instance_id] = inst.service;

  SerScores s;
  for (const auto& c : checks) {
    if (!c.applicable) continue;
    const bool unseen = split.is_unseen(c.instance_id);
    s.applicable.add(unseen);
    if (c.slot_error) s.erroneous.add(unseen);
    const auto service = service_of.find(c.instance_id);
    const std::string prefix =
        service == service_of.end() ? std::string() : std::string(service->second) + "/";
    for (const auto& v : c.values) {
      auto& tally = s.per_slot[prefix + v.slot];
      ++tally.occurrences;
      if (!v.found) ++tally.errors;
    }
  }
  s.ser = percentages(s.erroneous, s.applicable);
  return s;
}

MetricReport summarize(std::string system_id, std::span<const InstanceResult> results,
                       std::span<const SlotErrorCheck> checks,
                       std::span<const EvalInstance> instances, bool validation_ran) {
  const auto split = DomainSplit::from_instances(instances);
  MetricReport report;
  report.system_id = std::move(system_id);
  report.validation_ran = validation_ran;
  report.sgsacc = compute_sgsacc(results, split);
  report.ser = compute_ser(checks, split, instances);
  report.total = results.size();
  report.validated_count = report.sgsacc.validated_total.overall;
  report.excluded_count = validation_ran ? report.total - report.validated_count : 0;
  if (!validation_ran) report.sgsacc.validated = {};
  return report;
}

}  // namespace sgsacc
