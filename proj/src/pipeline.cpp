#include "sgsacc/pipeline.hpp"

#include <stdexcept>
#include <unordered_map>

#include "parallel.hpp"
#include "sgsacc/errors.hpp"

namespace sgsacc {

Pipeline::Pipeline(SchemaCatalog catalog, std::vector<EvalInstance> instances,
                   std::shared_ptr<NliBackend> nli, PipelineOptions options)
    : catalog_(std::move(catalog)),
      instances_(std::move(instances)),
      nli_(std::move(nli)),
      options_(options),
      pool_(ValuePool::from_instances(instances_)) {
  if (!nli_) throw std::invalid_argument("pipeline needs an NLI backend");
  references_.reserve(instances_.size());
  for (const auto& inst : instances_) {
    try {
      references_.push_back(build_instance_references(inst, catalog_, pool_, options_.negatives));
    } catch (const ValueDomainError& e) {
      throw ValueDomainError("instance '" + inst.instance_id + "': " + e.what());
    }
    const auto& w = references_.back().warnings;
    warnings_.insert(warnings_.end(), w.begin(), w.end());
  }
}

const std::vector<GroundTruthAnalysis>& Pipeline::analyses() {
  if (!analyses_) {
    std::vector<GroundTruthAnalysis> out(instances_.size());
    detail::parallel_for(instances_.size(), options_.workers, [&](std::size_t i) {
      out[i] = analyze_ground_truth(instances_[i], references_[i], *nli_, options_.eval);
    });
    analyses_ = std::move(out);
  }
  return *analyses_;
}

std::vector<ValidationOutcome> Pipeline::validation_outcomes() {
  std::vector<ValidationOutcome> out;
  const auto& a = analyses();
  out.reserve(a.size());
  for (const auto& analysis : a) out.push_back(analysis.validation);
  return out;
}

SystemEvaluation Pipeline::evaluate_system(const std::string& system_id,
                                           std::span<const GenerationCandidate> generations) {
  std::unordered_map<std::string_view, const GenerationCandidate*> by_instance;
  for (const auto& g : generations) {
    by_instance.try_emplace(g.instance_id, &g);
  }

  const auto& analyses = this->analyses();
  SystemEvaluation eval;
  eval.system_id = system_id;
  eval.results.resize(instances_.size());
  eval.slot_checks.resize(instances_.size());
  std::vector<GenerationCandidate> placeholders(instances_.size());
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (!by_instance.contains(instances_[i].instance_id)) {
      eval.missing_ids.push_back(instances_[i].instance_id);
      placeholders[i] = {instances_[i].instance_id, system_id, "", std::nullopt};
    }
  }

  detail::parallel_for(instances_.size(), options_.workers, [&](std::size_t i) {
    const auto it = by_instance.find(instances_[i].instance_id);
    const GenerationCandidate& gen = it == by_instance.end() ? placeholders[i] : *it->second;
    eval.results[i] =
        evaluate_instance(gen, instances_[i], references_[i], analyses[i], *nli_, options_.eval);
    eval.results[i].system_id = system_id;
    eval.slot_checks[i] =
        check_slot_errors(gen, instances_[i], catalog_, options_.eval.ser_case_sensitive);
  });

  eval.report = summarize(system_id, eval.results, eval.slot_checks, instances_,
                          options_.eval.validation);
  return eval;
}

std::vector<EnsembleEntry> Pipeline::rerank(std::span<const GenerationCandidate> candidates) {
  std::unordered_map<std::string_view, std::vector<GenerationCandidate>> grouped;
  for (const auto& c : candidates) grouped[c.instance_id].push_back(c);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (grouped.contains(instances_[i].instance_id)) todo.push_back(i);
  }
  std::vector<EnsembleEntry> out(todo.size());
  detail::parallel_for(todo.size(), options_.workers, [&](std::size_t k) {
    const std::size_t i = todo[k];
    const auto& group = grouped.at(instances_[i].instance_id);
    out[k] = {instances_[i].instance_id,
              sgsacc::rerank(group, instances_[i], references_[i], *nli_, options_.eval)};
  });
  return out;
}

}  // namespace sgsacc
