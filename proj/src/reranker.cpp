#include "sgsacc/reranker.hpp"

#include <stdexcept>

namespace sgsacc {

FidelityScore fidelity_score(const GenerationCandidate& generation, const EvalInstance& instance,
                             const InstanceReferences& refs, NliBackend& nli,
                             const EvalOptions& options) {
  if (refs.actions.size() != instance.actions.size()) {
    throw std::logic_error("references do not match instance '" + instance.instance_id + "'");
  }
  FidelityScore fs;
  fs.instance_id = generation.instance_id;
  fs.system_id = generation.system_id;
  fs.log_likelihood = generation.log_likelihood;
  fs.realized.assign(refs.actions.size(), false);

  const bool blank = generation.text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) return fs;

  for (std::size_t i = 0; i < refs.actions.size(); ++i) {
    std::vector<std::string> hyps;
    hyps.reserve(refs.actions[i].candidates.size());
    for (const auto& c : refs.actions[i].candidates) hyps.push_back(c.text);
    const auto ctx = context_for(instance, refs.actions[i], options);
    if (entails_any(generation.text, hyps, ctx, nli)) {
      fs.realized[i] = true;
      ++fs.score;
    }
  }
  return fs;
}

std::size_t select_most_faithful(std::span<const FidelityScore> scores) {
  if (scores.empty()) throw std::invalid_argument("no candidates to rerank");
  const auto better = [](const FidelityScore& a, const FidelityScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.log_likelihood && b.log_likelihood) return *a.log_likelihood > *b.log_likelihood;
    return a.log_likelihood.has_value() && !b.log_likelihood.has_value();
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (better(scores[i], scores[best])) best = i;
  }
  return best;
}

RerankOutcome rerank(std::span<const GenerationCandidate> candidates,
                     const EvalInstance& instance, const InstanceReferences& refs,
                     NliBackend& nli, const EvalOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to rerank");
  RerankOutcome out;
  out.scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.instance_id != instance.instance_id) {
      throw std::invalid_argument("candidate for '" + c.instance_id + "' reranked under '" +
                                  instance.instance_id + "'");
    }
    out.scores.push_back(fidelity_score(c, instance, refs, nli, options));
  }
  out.winner_index = select_most_faithful(out.scores);
  out.selected = candidates[out.winner_index];
  return out;
}

}  // namespace sgsacc
