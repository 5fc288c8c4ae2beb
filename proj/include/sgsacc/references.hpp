#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgsacc/data.hpp"

namespace sgsacc {

// A hypothesis sentence realized from one dialogue action.
struct CandidateReference {
  std::string text;
  std::string rule_id;

  bool operator==(const CandidateReference&) const = default;
};

// A hypothesis realized from the same action with one value substituted.
struct NegativeReference {
  std::string text;
  std::string tampered_value;
  std::string rule_id;

  bool operator==(const NegativeReference&) const = default;
};

// "kids_friendly" -> "kids friendly". Runs of underscores collapse to one
// space; leading and trailing separators are dropped.
std::string normalize_slot_name(std::string_view slot);

// Sentence form of a template: first letter upper-cased, terminal
// punctuation ensured.
std::string finish_sentence(std::string_view text);

// Candidate references for one action, in order: description-based,
// name-based, then auxiliary-verb variants. Deduplicated.
//
// `slot` may be null only for GOODBYE and REQ_MORE. Throws ValueDomainError
// for a boolean slot whose value is not exactly one of "True"/"False", or an
// inform-like action without values; ResolutionError when a required slot
// schema is missing.
std::vector<CandidateReference> build_candidates(const DialogueAction& action,
                                                 const SlotSchema* slot);

struct NegativeOptions {
  // Substitute values drawn per non-categorical slot.
  std::size_t per_slot = 3;
  std::uint64_t seed = 0;
};

struct NegativeSet {
  std::vector<NegativeReference> refs;
  std::vector<std::string> warnings;
};

// Negative references built by substituting the action's value:
//   boolean          -> the flipped value
//   categorical      -> every other possible value
//   non-categorical  -> up to per_slot values sampled from the pool
// Actions without values (REQUEST, GOODBYE, REQ_MORE) yield nothing. When no
// substitute exists the set is empty and carries a warning.
NegativeSet build_negatives(const DialogueAction& action, const SlotSchema& slot,
                            std::span<const std::string> value_pool,
                            const NegativeOptions& options = {});

struct ActionReferences {
  std::vector<CandidateReference> candidates;
  std::vector<NegativeReference> negatives;
  // Description of the action's slot, used for premise augmentation. Empty
  // for slot-less actions.
  std::string slot_description;
};

struct InstanceReferences {
  std::string instance_id;
  std::vector<ActionReferences> actions;
  std::vector<std::string> warnings;
};

InstanceReferences build_instance_references(const EvalInstance& instance,
                                             const SchemaCatalog& catalog,
                                             const ValuePool& pool,
                                             const NegativeOptions& options = {});

}  // namespace sgsacc
