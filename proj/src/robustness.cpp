#include "sgsacc/robustness.hpp"

#include "sgsacc/errors.hpp"

namespace sgsacc {

RobustnessReport make_robustness_report(std::string variant_id, const ConfusionCounts& counts) {
  RobustnessReport r;
  r.variant_id = std::move(variant_id);
  r.counts = counts;
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(counts.true_pos, counts.true_pos + counts.false_pos);
  r.recall = ratio(counts.true_pos, counts.true_pos + counts.false_neg);
  if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

RobustnessReport run_robustness(std::string variant_id, std::span<const EvalInstance> instances,
                                const SchemaCatalog& variant, const ValuePool& pool,
                                NliBackend& nli, const EvalOptions& options,
                                const NegativeOptions& negatives) {
  for (const auto& inst : instances) {
    if (variant.find_service(inst.service) == nullptr) {
      throw ResolutionError(inst.instance_id, "variant '" + variant_id + "' lacks service '" +
                                                  inst.service + "'");
    }
    for (const auto& a : inst.actions) {
      if (a.slot && variant.find_slot(inst.service, *a.slot) == nullptr) {
        throw ResolutionError(inst.instance_id, "variant '" + variant_id + "' lacks slot '" +
                                                    *a.slot + "' in service '" + inst.service +
                                                    "'");
      }
    }
  }

  ConfusionCounts counts;
  for (const auto& inst : instances) {
    const auto refs = build_instance_references(inst, variant, pool, negatives);
    for (const auto& action : refs.actions) {
      const auto ctx = context_for(inst, action, options);

      std::vector<std::string> positives;
      for (const auto& c : action.candidates) positives.push_back(c.text);
      if (entails_any(inst.ground_truth, positives, ctx, nli)) {
        ++counts.true_pos;
      } else {
        ++counts.false_neg;
      }

      if (action.negatives.empty()) continue;
      std::vector<std::string> tampered;
      for (const auto& n : action.negatives) tampered.push_back(n.text);
      if (entails_any(inst.ground_truth, tampered, ctx, nli)) {
        ++counts.false_pos;
      } else {
        ++counts.true_neg;
      }
    }
  }
  return make_robustness_report(std::move(variant_id), counts);
}

}  // namespace sgsacc
