#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "sgsacc/data.hpp"
#include "sgsacc/evaluator.hpp"
#include "sgsacc/nli.hpp"
#include "sgsacc/references.hpp"

namespace sgsacc {

struct ConfusionCounts {
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t true_neg = 0;
  std::size_t false_neg = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

// Precision, recall and F1 are fractions in [0, 1]; absent when a
// denominator is zero. Tables print precision/recall as percentages.
struct RobustnessReport {
  std::string variant_id;
  ConfusionCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

RobustnessReport make_robustness_report(std::string variant_id, const ConfusionCounts& counts);

// For every action of every instance: a positive example (ground truth vs the
// candidates realized under the variant schema) and, when the action has
// negatives, one negative example (ground truth vs all of them). A positive
// is predicted when anything is entailed, as in the validation step.
// Throws ResolutionError when the variant lacks a referenced service or slot.
RobustnessReport run_robustness(std::string variant_id, std::span<const EvalInstance> instances,
                                const SchemaCatalog& variant, const ValuePool& pool,
                                NliBackend& nli, const EvalOptions& options = {},
                                const NegativeOptions& negatives = {});

}  // namespace sgsacc
