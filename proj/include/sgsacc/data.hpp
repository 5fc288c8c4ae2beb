#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgsacc {

struct SlotSchema {
  std::string name;
  std::string description;
  bool is_categorical = false;
  bool is_boolean = false;
  std::vector<std::string> possible_values;

  bool operator==(const SlotSchema&) const = default;
};

struct ServiceSchema {
  std::string service_name;
  std::vector<SlotSchema> slots;

  const SlotSchema* find_slot(std::string_view name) const;

  bool operator==(const ServiceSchema&) const = default;
};

// Services keyed by name. Immutable once loaded.
class SchemaCatalog {
 public:
  SchemaCatalog() = default;

  // Throws ConflictError on a duplicate service or slot name.
  void add(ServiceSchema service);

  const ServiceSchema* find_service(std::string_view name) const;
  const SlotSchema* find_slot(std::string_view service, std::string_view slot) const;

  std::size_t size() const noexcept { return services_.size(); }
  bool empty() const noexcept { return services_.empty(); }
  const std::map<std::string, ServiceSchema, std::less<>>& services() const noexcept {
    return services_;
  }

 private:
  std::map<std::string, ServiceSchema, std::less<>> services_;
};

enum class IntentKind {
  kInformLike,
  kRequest,
  kGoodbye,
  kReqMore,
};

// Upper-cases and classifies an intent name; everything outside the three
// special intents realizes as an inform.
IntentKind classify_intent(std::string_view intent);
std::string canonical_intent(std::string_view intent);

struct DialogueAction {
  std::string intent;
  std::optional<std::string> slot;
  std::vector<std::string> values;

  IntentKind kind() const { return classify_intent(intent); }
  // GOODBYE and REQ_MORE carry no slot.
  bool needs_slot() const;

  bool operator==(const DialogueAction&) const = default;
};

struct EvalInstance {
  std::string instance_id;
  std::string service;
  std::string domain;
  std::vector<DialogueAction> actions;
  std::string ground_truth;
  std::optional<std::string> previous_turn;
  bool is_unseen_domain = false;

  bool operator==(const EvalInstance&) const = default;
};

struct GenerationCandidate {
  std::string instance_id;
  std::string system_id;
  std::string text;
  std::optional<double> log_likelihood;

  bool operator==(const GenerationCandidate&) const = default;
};

// Every value observed for a (service, slot) across a dataset, sorted and
// unique. Feeds negative references for non-categorical slots.
class ValuePool {
 public:
  static ValuePool from_instances(std::span<const EvalInstance> instances);

  void add(std::string_view service, std::string_view slot, std::string value);
  std::span<const std::string> values(std::string_view service, std::string_view slot) const;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<std::string>, std::less<>> pool_;
};

// Generations that survived resolution, plus the instance ids that did not.
struct GenerationSet {
  std::vector<GenerationCandidate> candidates;
  std::vector<std::string> dangling_ids;

  std::vector<std::string> system_ids() const;
  std::vector<GenerationCandidate> for_system(std::string_view system_id) const;
  std::vector<GenerationCandidate> for_instance(std::string_view instance_id) const;
};

// Schemas: a JSON array of services (the SGD layout) or an object with a
// "services" array. is_boolean may be given explicitly; otherwise it is
// derived from a categorical slot whose values are exactly True/False.
SchemaCatalog parse_schemas(const std::filesystem::path& path);
SchemaCatalog parse_schemas_text(std::string_view text, std::string_view source = "<memory>");

// Instances: a JSON array or JSON Lines of system turns. Actions must resolve
// against the catalog.
std::vector<EvalInstance> parse_instances(const std::filesystem::path& path,
                                          const SchemaCatalog& catalog,
                                          std::span<const std::string> unseen_domains);
std::vector<EvalInstance> parse_instances_text(std::string_view text,
                                               const SchemaCatalog& catalog,
                                               std::span<const std::string> unseen_domains,
                                               std::string_view source = "<memory>");

// Generations: a JSON array or JSON Lines. When a record has no system_id,
// default_system_id is used (and a ParseError thrown if that is empty too).
std::vector<GenerationCandidate> parse_generations(const std::filesystem::path& path,
                                                   std::string_view default_system_id = {});
std::vector<GenerationCandidate> parse_generations_text(std::string_view text,
                                                       std::string_view default_system_id = {},
                                                       std::string_view source = "<memory>");

// Drops candidates whose instance id is unknown, recording each dangling id once.
GenerationSet resolve_generations(std::vector<GenerationCandidate> candidates,
                                  std::span<const EvalInstance> instances);

std::string serialize_instances(std::span<const EvalInstance> instances);
std::string serialize_generations(std::span<const GenerationCandidate> candidates);

// "Restaurants_1" -> "Restaurants".
std::string domain_from_service(std::string_view service);

}  // namespace sgsacc
