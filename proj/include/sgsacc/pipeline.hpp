#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgsacc/data.hpp"
#include "sgsacc/evaluator.hpp"
#include "sgsacc/metrics.hpp"
#include "sgsacc/nli.hpp"
#include "sgsacc/references.hpp"
#include "sgsacc/reranker.hpp"

namespace sgsacc {

struct PipelineOptions {
  EvalOptions eval;
  NegativeOptions negatives;
  std::size_t workers = 1;
};

struct SystemEvaluation {
  std::string system_id;
  std::vector<InstanceResult> results;
  std::vector<SlotErrorCheck> slot_checks;
  MetricReport report;
  // Instances the system produced nothing for; scored as empty generations.
  std::vector<std::string> missing_ids;
};

struct EnsembleEntry {
  std::string instance_id;
  RerankOutcome outcome;
};

// Loaded dataset plus the references and ground-truth analysis built from it.
// References are built eagerly; the NLI-dependent analysis on first use.
class Pipeline {
 public:
  Pipeline(SchemaCatalog catalog, std::vector<EvalInstance> instances,
           std::shared_ptr<NliBackend> nli, PipelineOptions options = {});

  const SchemaCatalog& catalog() const { return catalog_; }
  const std::vector<EvalInstance>& instances() const { return instances_; }
  const std::vector<InstanceReferences>& references() const { return references_; }
  const ValuePool& value_pool() const { return pool_; }
  const PipelineOptions& options() const { return options_; }
  NliBackend& nli() { return *nli_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const std::vector<GroundTruthAnalysis>& analyses();
  std::vector<ValidationOutcome> validation_outcomes();

  // Generations of one system; those for unknown instances are ignored.
  SystemEvaluation evaluate_system(const std::string& system_id,
                                   std::span<const GenerationCandidate> generations);

  // One winner per instance that has at least one candidate, in instance order.
  std::vector<EnsembleEntry> rerank(std::span<const GenerationCandidate> candidates);

 private:
  SchemaCatalog catalog_;
  std::vector<EvalInstance> instances_;
  std::shared_ptr<NliBackend> nli_;
  PipelineOptions options_;
  ValuePool pool_;
  std::vector<InstanceReferences> references_;
  std::vector<std::string> warnings_;
  std::optional<std::vector<GroundTruthAnalysis>> analyses_;
};

}  // namespace sgsacc
