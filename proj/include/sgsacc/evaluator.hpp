#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgsacc/data.hpp"
#include "sgsacc/nli.hpp"
#include "sgsacc/references.hpp"

namespace sgsacc {

struct EvalOptions {
  bool validation = true;
  // Retry a failed entailment with the previous turn and slot description
  // prepended to the premise.
  bool augmentation = true;
  bool ser_case_sensitive = false;
};

// "{previous_turn} {slot_description}. {utterance}", leaving out absent parts.
std::string augment_premise(std::string_view utterance,
                            std::optional<std::string_view> previous_turn,
                            std::optional<std::string_view> slot_description);

// Dialogue context available for augmenting a premise.
struct PremiseContext {
  std::optional<std::string> previous_turn;
  std::optional<std::string> slot_description;

  bool empty() const { return !previous_turn && !slot_description; }
  std::string augment(std::string_view utterance) const;
};

// Context for one action of an instance; empty when augmentation is off.
PremiseContext context_for(const EvalInstance& instance, const ActionReferences& refs,
                           const EvalOptions& options);

struct ReferenceSelection {
  std::size_t index = 0;
  CandidateReference reference;
  NliVerdict verdict = NliVerdict::neutral_only();
  bool used_augmented_premise = false;

  double score() const { return verdict.entailment(); }
  bool entailed() const { return verdict.entails(); }
};

// Picks the candidate with the highest entailment probability given the
// ground truth. If no candidate is entailed by the bare ground truth and the
// context is non-empty, the augmented premise is scored instead. Ties go to
// the earlier candidate. Throws std::invalid_argument on an empty list.
ReferenceSelection select_entailment_reference(std::span<const CandidateReference> candidates,
                                               std::string_view ground_truth,
                                               const PremiseContext& context,
                                               NliBackend& nli);

// True if `premise` entails any hypothesis, first on the bare premise, then
// on the augmented one when context exists.
bool entails_any(std::string_view premise, std::span<const std::string> hypotheses,
                 const PremiseContext& context, NliBackend& nli);

struct ValidationOutcome {
  std::string instance_id;
  bool passed = true;
  // Some action has no candidate entailed by the ground truth.
  bool failed_positive = false;
  // The ground truth entails some negative reference.
  bool failed_negative = false;

  bool operator==(const ValidationOutcome&) const = default;
};

// Everything derived from the ground truth alone: the entailment reference
// of each action and the validation outcome. Shared by every system.
struct GroundTruthAnalysis {
  std::vector<ReferenceSelection> selections;
  ValidationOutcome validation;
};

GroundTruthAnalysis analyze_ground_truth(const EvalInstance& instance,
                                         const InstanceReferences& refs, NliBackend& nli,
                                         const EvalOptions& options = {});

ValidationOutcome validate_instance(const EvalInstance& instance, const InstanceReferences& refs,
                                    NliBackend& nli, const EvalOptions& options = {});

struct ActionAssessment {
  std::size_t action_index = 0;
  CandidateReference entailment_reference;
  bool faithful = false;
  bool used_augmented_premise = false;
  NliVerdict verdict = NliVerdict::neutral_only();
};

struct InstanceResult {
  std::string instance_id;
  std::string system_id;
  std::vector<ActionAssessment> assessments;
  bool instance_faithful = false;
  bool validated = false;
  bool unseen = false;
};

// Checks each action's entailment reference against the generation, with
// one augmented retry on failure. `validated` is copied from the analysis
// when validation ran, and is false otherwise.
InstanceResult evaluate_instance(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const InstanceReferences& refs,
                                 const GroundTruthAnalysis& analysis, NliBackend& nli,
                                 const EvalOptions& options = {});

InstanceResult evaluate_instance(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const InstanceReferences& refs,
                                 NliBackend& nli, const EvalOptions& options = {});

}  // namespace sgsacc
