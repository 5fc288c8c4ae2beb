#include "sgsacc/data.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "records.hpp"
#include "sgsacc/errors.hpp"

namespace sgsacc {

using nlohmann::json;

const SlotSchema* ServiceSchema::find_slot(std::string_view name) const {
  for (const auto& slot : slots) {
    if (slot.name == name) {
      return &slot;
    }
  }
  return nullptr;
}

void SchemaCatalog::add(ServiceSchema service) {
  std::set<std::string_view> names;
  for (const auto& slot : service.slots) {
    if (!names.insert(slot.name).second) {
      throw ConflictError("service '" + service.service_name + "' declares slot '" + slot.name +
                          "' twice");
    }
  }
  if (services_.contains(service.service_name)) {
    throw ConflictError("duplicate service '" + service.service_name + "'");
  }
  auto name = service.service_name;
  services_.emplace(std::move(name), std::move(service));
}

const ServiceSchema* SchemaCatalog::find_service(std::string_view name) const {
  const auto it = services_.find(name);
  return it == services_.end() ? nullptr : &it->second;
}

const SlotSchema* SchemaCatalog::find_slot(std::string_view service, std::string_view slot) const {
  const auto* s = find_service(service);
  return s == nullptr ? nullptr : s->find_slot(slot);
}

std::string canonical_intent(std::string_view intent) {
  std::string out(intent);
  for (auto& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

IntentKind classify_intent(std::string_view intent) {
  const std::string upper = canonical_intent(intent);
  if (upper == "REQUEST") return IntentKind::kRequest;
  if (upper == "GOODBYE") return IntentKind::kGoodbye;
  if (upper == "REQ_MORE") return IntentKind::kReqMore;
  return IntentKind::kInformLike;
}

bool DialogueAction::needs_slot() const {
  const auto k = kind();
  return k != IntentKind::kGoodbye && k != IntentKind::kReqMore;
}

ValuePool ValuePool::from_instances(std::span<const EvalInstance> instances) {
  ValuePool pool;
  for (const auto& inst : instances) {
    for (const auto& action : inst.actions) {
      if (!action.slot) continue;
      for (const auto& v : action.values) {
        pool.add(inst.service, *action.slot, v);
      }
    }
  }
  return pool;
}

void ValuePool::add(std::string_view service, std::string_view slot, std::string value) {
  auto& values = pool_[{std::string(service), std::string(slot)}];
  const auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) {
    values.insert(it, std::move(value));
  }
}

std::span<const std::string> ValuePool::values(std::string_view service,
                                               std::string_view slot) const {
  const auto it = pool_.find(std::pair<std::string, std::string>(service, slot));
  if (it == pool_.end()) return {};
  return it->second;
}

std::vector<std::string> GenerationSet::system_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : candidates) {
    if (std::find(ids.begin(), ids.end(), c.system_id) == ids.end()) {
      ids.push_back(c.system_id);
    }
  }
  return ids;
}

std::vector<GenerationCandidate> GenerationSet::for_system(std::string_view system_id) const {
  std::vector<GenerationCandidate> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [&](const auto& c) { return c.system_id == system_id; });
  return out;
}

std::vector<GenerationCandidate> GenerationSet::for_instance(std::string_view instance_id) const {
  std::vector<GenerationCandidate> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [&](const auto& c) { return c.instance_id == instance_id; });
  return out;
}

std::string domain_from_service(std::string_view service) {
  const auto pos = service.rfind('_');
  if (pos != std::string_view::npos && pos + 1 < service.size() &&
      std::all_of(service.begin() + pos + 1, service.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::string(service.substr(0, pos));
  }
  return std::string(service);
}

namespace {

bool is_true_false(const std::string& v) { return v == "True" || v == "False"; }

SlotSchema parse_slot(const json& record, const std::string& where) {
  SlotSchema slot;
  slot.name = detail::require_string(record, "name", where);
  if (slot.name.empty()) {
    throw ParseError(where + ": empty slot name");
  }
  const std::string slot_where = where + " slot '" + slot.name + "'";
  slot.description = detail::optional_string(record, "description", slot_where).value_or("");
  slot.is_categorical = detail::optional_bool(record, "is_categorical", false, slot_where);
  slot.possible_values = detail::string_list(record, "possible_values", slot_where);

  const bool looks_boolean = slot.is_categorical && !slot.possible_values.empty() &&
                             std::all_of(slot.possible_values.begin(),
                                         slot.possible_values.end(), is_true_false);
  slot.is_boolean = detail::optional_bool(record, "is_boolean", looks_boolean, slot_where);
  if (slot.is_boolean) {
    if (!slot.is_categorical) {
      throw ParseError(slot_where + ": boolean slot must be categorical");
    }
    if (!std::all_of(slot.possible_values.begin(), slot.possible_values.end(), is_true_false)) {
      throw ParseError(slot_where + ": boolean slot values must be True/False");
    }
  }
  return slot;
}

std::string record_label(std::size_t index, const json& record, const char* id_key) {
  std::string label = "record " + std::to_string(index);
  if (record.is_object()) {
    const auto it = record.find(id_key);
    if (it != record.end() && it->is_string()) {
      label += " ('" + it->get<std::string>() + "')";
    }
  }
  return label;
}

}  // namespace

SchemaCatalog parse_schemas_text(std::string_view text, std::string_view source) {
  SchemaCatalog catalog;
  const auto records = detail::parse_records(text, source, "services");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    const std::string where = std::string(source) + " " + record_label(i, record, "service_name");
    ServiceSchema service;
    service.service_name = detail::require_string(record, "service_name", where);
    if (service.service_name.empty()) {
      throw ParseError(where + ": empty service_name");
    }
    const auto slots = record.find("slots");
    if (slots != record.end() && !slots->is_null()) {
      if (!slots->is_array()) {
        throw ParseError(where + ": 'slots' is not a list");
      }
      for (const auto& s : *slots) {
        service.slots.push_back(parse_slot(s, where));
      }
    }
    catalog.add(std::move(service));
  }
  return catalog;
}

SchemaCatalog parse_schemas(const std::filesystem::path& path) {
  return parse_schemas_text(detail::read_file(path), path.string());
}

namespace {

DialogueAction parse_action(const json& record, const std::string& where) {
  DialogueAction action;
  action.intent = canonical_intent(detail::require_string(record, "intent", where));
  if (action.intent.empty()) {
    throw ParseError(where + ": empty intent");
  }
  auto slot = detail::optional_string(record, "slot", where);
  if (slot && !slot->empty()) {
    action.slot = std::move(slot);
  }
  action.values = detail::string_list(record, "values", where);
  return action;
}

}  // namespace

std::vector<EvalInstance> parse_instances_text(std::string_view text,
                                               const SchemaCatalog& catalog,
                                               std::span<const std::string> unseen_domains,
                                               std::string_view source) {
  const std::unordered_set<std::string> unseen(unseen_domains.begin(), unseen_domains.end());
  std::unordered_set<std::string> seen_ids;
  std::vector<EvalInstance> instances;

  const auto records = detail::parse_records(text, source, "instances");
  instances.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    const std::string where = std::string(source) + " " + record_label(i, record, "instance_id");

    EvalInstance inst;
    inst.instance_id = detail::require_string(record, "instance_id", where);
    if (inst.instance_id.empty()) {
      throw ParseError(where + ": empty instance_id");
    }
    if (!seen_ids.insert(inst.instance_id).second) {
      throw ConflictError("duplicate instance_id '" + inst.instance_id + "'");
    }
    inst.service = detail::require_string(record, "service", where);
    inst.domain =
        detail::optional_string(record, "domain", where).value_or(domain_from_service(inst.service));
    inst.ground_truth = detail::optional_string(record, "ground_truth", where).value_or("");
    if (inst.ground_truth.empty()) {
      throw ParseError(where + ": missing ground_truth");
    }
    auto prev = detail::optional_string(record, "previous_turn", where);
    if (prev && !prev->empty()) {
      inst.previous_turn = std::move(prev);
    }

    const auto actions = record.find("actions");
    if (actions == record.end() || !actions->is_array() || actions->empty()) {
      throw ParseError(where + ": 'actions' must be a non-empty list");
    }
    for (std::size_t a = 0; a < actions->size(); ++a) {
      inst.actions.push_back(parse_action((*actions)[a], where + " action " + std::to_string(a)));
    }

    const ServiceSchema* service = catalog.find_service(inst.service);
    if (service == nullptr) {
      throw ResolutionError(inst.instance_id, "unknown service '" + inst.service + "'");
    }
    for (const auto& action : inst.actions) {
      if (!action.slot) {
        if (action.needs_slot()) {
          throw ResolutionError(inst.instance_id, action.intent + " action has no slot");
        }
        continue;
      }
      if (service->find_slot(*action.slot) == nullptr) {
        throw ResolutionError(inst.instance_id, "unknown slot '" + *action.slot +
                                                    "' in service '" + inst.service + "'");
      }
    }

    inst.is_unseen_domain = unseen.contains(inst.domain);
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::vector<EvalInstance> parse_instances(const std::filesystem::path& path,
                                          const SchemaCatalog& catalog,
                                          std::span<const std::string> unseen_domains) {
  return parse_instances_text(detail::read_file(path), catalog, unseen_domains, path.string());
}

std::vector<GenerationCandidate> parse_generations_text(std::string_view text,
                                                       std::string_view default_system_id,
                                                       std::string_view source) {
  std::vector<GenerationCandidate> out;
  const auto records = detail::parse_records(text, source, "generations");
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    const std::string where = std::string(source) + " " + record_label(i, record, "instance_id");
    GenerationCandidate c;
    c.instance_id = detail::require_string(record, "instance_id", where);
    c.system_id = detail::optional_string(record, "system_id", where)
                      .value_or(std::string(default_system_id));
    if (c.system_id.empty()) {
      throw ParseError(where + ": missing field 'system_id'");
    }
    c.text = detail::optional_string(record, "text", where).value_or("");
    const auto ll = record.find("log_likelihood");
    if (ll != record.end() && !ll->is_null()) {
      if (!ll->is_number()) {
        throw ParseError(where + ": 'log_likelihood' is not a number");
      }
      c.log_likelihood = ll->get<double>();
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GenerationCandidate> parse_generations(const std::filesystem::path& path,
                                                   std::string_view default_system_id) {
  return parse_generations_text(detail::read_file(path), default_system_id, path.string());
}

GenerationSet resolve_generations(std::vector<GenerationCandidate> candidates,
                                  std::span<const EvalInstance> instances) {
  std::unordered_set<std::string_view> known;
  for (const auto& inst : instances) {
    known.insert(inst.instance_id);
  }
  GenerationSet set;
  std::unordered_set<std::string> reported;
  for (auto& c : candidates) {
    if (known.contains(c.instance_id)) {
      set.candidates.push_back(std::move(c));
    } else if (reported.insert(c.instance_id).second) {
      set.dangling_ids.push_back(c.instance_id);
    }
  }
  return set;
}

std::string serialize_instances(std::span<const EvalInstance> instances) {
  json doc = json::array();
  for (const auto& inst : instances) {
    json actions = json::array();
    for (const auto& a : inst.actions) {
      json action = {{"intent", a.intent}, {"values", a.values}};
      action["slot"] = a.slot ? json(*a.slot) : json(nullptr);
      actions.push_back(std::move(action));
    }
    json record = {{"instance_id", inst.instance_id},
                   {"service", inst.service},
                   {"domain", inst.domain},
                   {"actions", std::move(actions)},
                   {"ground_truth", inst.ground_truth}};
    record["previous_turn"] = inst.previous_turn ? json(*inst.previous_turn) : json(nullptr);
    doc.push_back(std::move(record));
  }
  return doc.dump(2) + "\n";
}

std::string serialize_generations(std::span<const GenerationCandidate> candidates) {
  std::string out;
  for (const auto& c : candidates) {
    json record = {{"instance_id", c.instance_id}, {"system_id", c.system_id}, {"text", c.text}};
    if (c.log_likelihood) {
      record["log_likelihood"] = *c.log_likelihood;
    }
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sgsacc
