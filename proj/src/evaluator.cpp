#include "sgsacc/evaluator.hpp"

#include <cctype>
#include <stdexcept>

namespace sgsacc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void check_refs(const EvalInstance& instance, const InstanceReferences& refs) {
  if (refs.instance_id != instance.instance_id || refs.actions.size() != instance.actions.size()) {
    throw std::logic_error("references for '" + refs.instance_id + "' do not match instance '" +
                           instance.instance_id + "'");
  }
  for (const auto& a : refs.actions) {
    if (a.candidates.empty()) {
      throw std::logic_error("instance '" + instance.instance_id + "' has an action without candidates");
    }
  }
}

std::size_t best_entailment(std::span<const NliVerdict> verdicts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < verdicts.size(); ++i) {
    if (verdicts[i].entailment() > verdicts[best].entailment()) best = i;
  }
  return best;
}

std::vector<NliVerdict> score(std::string_view premise, std::span<const CandidateReference> cands,
                              NliBackend& nli) {
  std::vector<NliPair> pairs;
  pairs.reserve(cands.size());
  for (const auto& c : cands) pairs.push_back({std::string(premise), c.text});
  return nli.classify_batch(pairs);
}

}  // namespace

std::string augment_premise(std::string_view utterance,
                            std::optional<std::string_view> previous_turn,
                            std::optional<std::string_view> slot_description) {
  std::string out;
  if (previous_turn) {
    const auto prev = trim(*previous_turn);
    if (!prev.empty()) out.append(prev);
  }
  if (slot_description) {
    auto desc = trim(*slot_description);
    while (!desc.empty() && desc.back() == '.') desc = trim(desc.substr(0, desc.size() - 1));
    if (!desc.empty()) {
      if (!out.empty()) out += ' ';
      out.append(desc);
      out += '.';
    }
  }
  const auto u = trim(utterance);
  if (!out.empty() && !u.empty()) out += ' ';
  out.append(u);
  return out;
}

std::string PremiseContext::augment(std::string_view utterance) const {
  std::optional<std::string_view> prev;
  std::optional<std::string_view> desc;
  if (previous_turn) prev = *previous_turn;
  if (slot_description) desc = *slot_description;
  return augment_premise(utterance, prev, desc);
}

PremiseContext context_for(const EvalInstance& instance, const ActionReferences& refs,
                           const EvalOptions& options) {
  PremiseContext ctx;
  if (!options.augmentation) return ctx;
  if (instance.previous_turn && !trim(*instance.previous_turn).empty()) {
    ctx.previous_turn = instance.previous_turn;
  }
  if (!trim(refs.slot_description).empty()) {
    ctx.slot_description = refs.slot_description;
  }
  return ctx;
}

ReferenceSelection select_entailment_reference(std::span<const CandidateReference> candidates,
                                               std::string_view ground_truth,
                                               const PremiseContext& context, NliBackend& nli) {
  if (candidates.empty()) {
    throw std::invalid_argument("no candidate references to select from");
  }
  auto verdicts = score(ground_truth, candidates, nli);
  ReferenceSelection sel;
  sel.index = best_entailment(verdicts);

  if (!verdicts[sel.index].entails() && !context.empty()) {
    verdicts = score(context.augment(ground_truth), candidates, nli);
    sel.index = best_entailment(verdicts);
    sel.used_augmented_premise = true;
  }
  sel.reference = candidates[sel.index];
  sel.verdict = verdicts[sel.index];
  return sel;
}

bool entails_any(std::string_view premise, std::span<const std::string> hypotheses,
                 const PremiseContext& context, NliBackend& nli) {
  if (hypotheses.empty()) return false;
  const auto run = [&](const std::string& p) {
    std::vector<NliPair> pairs;
    pairs.reserve(hypotheses.size());
    for (const auto& h : hypotheses) pairs.push_back({p, h});
    for (const auto& v : nli.classify_batch(pairs)) {
      if (v.entails()) return true;
    }
    return false;
  };
  if (run(std::string(premise))) return true;
  return !context.empty() && run(context.augment(premise));
}

GroundTruthAnalysis analyze_ground_truth(const EvalInstance& instance,
                                         const InstanceReferences& refs, NliBackend& nli,
                                         const EvalOptions& options) {
  check_refs(instance, refs);
  GroundTruthAnalysis analysis;
  analysis.validation.instance_id = instance.instance_id;
  analysis.selections.reserve(refs.actions.size());

  for (const auto& action : refs.actions) {
    const auto ctx = context_for(instance, action, options);
    auto sel = select_entailment_reference(action.candidates, instance.ground_truth, ctx, nli);
    if (options.validation) {
      if (!sel.entailed()) analysis.validation.failed_positive = true;
      if (!analysis.validation.failed_negative && !action.negatives.empty()) {
        std::vector<std::string> hyps;
        hyps.reserve(action.negatives.size());
        for (const auto& n : action.negatives) hyps.push_back(n.text);
        if (entails_any(instance.ground_truth, hyps, ctx, nli)) {
          analysis.validation.failed_negative = true;
        }
      }
    }
    analysis.selections.push_back(std::move(sel));
  }
  analysis.validation.passed =
      !analysis.validation.failed_positive && !analysis.validation.failed_negative;
  return analysis;
}

ValidationOutcome validate_instance(const EvalInstance& instance, const InstanceReferences& refs,
                                    NliBackend& nli, const EvalOptions& options) {
  EvalOptions with_validation = options;
  with_validation.validation = true;
  return analyze_ground_truth(instance, refs, nli, with_validation).validation;
}

InstanceResult evaluate_instance(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const InstanceReferences& refs,
                                 const GroundTruthAnalysis& analysis, NliBackend& nli,
                                 const EvalOptions& options) {
  check_refs(instance, refs);
  if (generation.instance_id != instance.instance_id) {
    throw std::invalid_argument("generation for '" + generation.instance_id +
                                "' evaluated against instance '" + instance.instance_id + "'");
  }
  if (analysis.selections.size() != instance.actions.size()) {
    throw std::logic_error("ground-truth analysis does not match instance '" +
                           instance.instance_id + "'");
  }

  InstanceResult result;
  result.instance_id = instance.instance_id;
  result.system_id = generation.system_id;
  result.validated = options.validation && analysis.validation.passed;
  result.unseen = instance.is_unseen_domain;
  result.instance_faithful = true;

  // An empty generation cannot entail anything; the NLI pair would be invalid.
  const bool blank = trim(generation.text).empty();
  for (std::size_t i = 0; i < refs.actions.size(); ++i) {
    const auto& sel = analysis.selections[i];
    ActionAssessment a;
    a.action_index = i;
    a.entailment_reference = sel.reference;
    if (!blank) {
      a.verdict = nli.classify({generation.text, sel.reference.text});
      if (!a.verdict.entails()) {
        const auto ctx = context_for(instance, refs.actions[i], options);
        if (!ctx.empty()) {
          a.verdict = nli.classify({ctx.augment(generation.text), sel.reference.text});
          a.used_augmented_premise = true;
        }
      }
      a.faithful = a.verdict.entails();
    }
    result.instance_faithful = result.instance_faithful && a.faithful;
    result.assessments.push_back(std::move(a));
  }
  return result;
}

InstanceResult evaluate_instance(const GenerationCandidate& generation,
                                 const EvalInstance& instance, const InstanceReferences& refs,
                                 NliBackend& nli, const EvalOptions& options) {
  const auto analysis = analyze_ground_truth(instance, refs, nli, options);
  return evaluate_instance(generation, instance, refs, analysis, nli, options);
}

}  // namespace sgsacc
