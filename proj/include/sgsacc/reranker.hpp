#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgsacc/data.hpp"
#include "sgsacc/evaluator.hpp"
#include "sgsacc/nli.hpp"
#include "sgsacc/references.hpp"

namespace sgsacc {

struct FidelityScore {
  std::string instance_id;
  std::string system_id;
  // Number of actions for which the generation entails any candidate.
  std::size_t score = 0;
  std::optional<double> log_likelihood;
  std::vector<bool> realized;
};

// Scores a generation without looking at the ground truth: an action counts
// when the generation entails at least one of its candidates (bare premise,
// then augmented when options.augmentation is set).
FidelityScore fidelity_score(const GenerationCandidate& generation, const EvalInstance& instance,
                             const InstanceReferences& refs, NliBackend& nli,
                             const EvalOptions& options = {});

// Index of the winner: highest score, then highest log-likelihood (absent
// ranks below any value), then earliest position.
std::size_t select_most_faithful(std::span<const FidelityScore> scores);

struct RerankOutcome {
  GenerationCandidate selected;
  std::size_t winner_index = 0;
  std::vector<FidelityScore> scores;
};

// Throws std::invalid_argument if `candidates` is empty or mixes instances.
RerankOutcome rerank(std::span<const GenerationCandidate> candidates,
                     const EvalInstance& instance, const InstanceReferences& refs,
                     NliBackend& nli, const EvalOptions& options = {});

}  // namespace sgsacc
