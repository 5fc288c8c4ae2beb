#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgsacc/data.hpp"
#include "sgsacc/evaluator.hpp"

namespace sgsacc {

// Seen/unseen membership by instance id.
class DomainSplit {
 public:
  static DomainSplit from_instances(std::span<const EvalInstance> instances);

  // Throws std::out_of_range for an unknown id.
  bool is_unseen(std::string_view instance_id) const;

 private:
  std::unordered_map<std::string, bool> unseen_;
};

// A percentage per bucket. Empty buckets are absent, never 0 or 100.
struct Percentages {
  std::optional<double> overall;
  std::optional<double> seen;
  std::optional<double> unseen;

  bool operator==(const Percentages&) const = default;
};

struct BucketCounts {
  std::size_t overall = 0;
  std::size_t seen = 0;
  std::size_t unseen = 0;

  void add(bool is_unseen) {
    ++overall;
    ++(is_unseen ? this->unseen : this->seen);
  }
  bool operator==(const BucketCounts&) const = default;
};

Percentages percentages(const BucketCounts& hits, const BucketCounts& totals);

struct SgsaccScores {
  Percentages all;
  Percentages validated;
  BucketCounts all_faithful;
  BucketCounts all_total;
  BucketCounts validated_faithful;
  BucketCounts validated_total;

  bool operator==(const SgsaccScores&) const = default;
};

// SGSAcc(all) over every result and SGSAcc(validated) over validated ones,
// each split into seen and unseen domains.
SgsaccScores compute_sgsacc(std::span<const InstanceResult> results, const DomainSplit& split);

struct SlotValueCheck {
  std::string slot;
  std::string value;
  bool found = false;
};

// Per-instance slot error check. Only non-categorical slots that carry values
// take part; an instance with none of them is not applicable.
struct SlotErrorCheck {
  std::string instance_id;
  bool applicable = false;
  bool slot_error = false;
  std::vector<SlotValueCheck> values;
};

SlotErrorCheck check_slot_errors(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const SchemaCatalog& catalog,
                                 bool case_sensitive = false);

struct SlotErrorTally {
  std::size_t errors = 0;
  std::size_t occurrences = 0;

  bool operator==(const SlotErrorTally&) const = default;
};

struct SerScores {
  Percentages ser;
  BucketCounts erroneous;
  BucketCounts applicable;
  // Keyed "service/slot": values missed out of values checked.
  std::map<std::string, SlotErrorTally> per_slot;

  bool operator==(const SerScores&) const = default;
};

SerScores compute_ser(std::span<const SlotErrorCheck> checks, const DomainSplit& split,
                      std::span<const EvalInstance> instances);

struct MetricReport {
  std::string system_id;
  SgsaccScores sgsacc;
  SerScores ser;
  std::size_t total = 0;
  std::size_t validated_count = 0;
  std::size_t excluded_count = 0;
  bool validation_ran = false;

  bool operator==(const MetricReport&) const = default;
};

MetricReport summarize(std::string system_id, std::span<const InstanceResult> results,
                       std::span<const SlotErrorCheck> checks,
                       std::span<const EvalInstance> instances, bool validation_ran);

}  // namespace sgsacc
