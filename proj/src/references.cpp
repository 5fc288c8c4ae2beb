#include "sgsacc/references.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <unordered_set>

#include "sgsacc/errors.hpp"

namespace sgsacc {

namespace {

constexpr std::string_view kTrue = "True";
constexpr std::string_view kFalse = "False";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Descriptions are templated mid-sentence, so their own closing
// punctuation goes.
std::string clean_description(std::string_view desc) {
  desc = trim(desc);
  while (!desc.empty() && (desc.back() == '.' || desc.back() == '?' || desc.back() == '!')) {
    desc.remove_suffix(1);
    desc = trim(desc);
  }
  return std::string(desc);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) words.emplace_back(s.substr(start, i - start));
  }
  return words;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool has_word(const std::vector<std::string>& words, std::string_view word) {
  return std::any_of(words.begin(), words.end(),
                     [&](const std::string& w) { return lower(w) == word; });
}

// "a", "a and b", "a, b and c".
std::string join_values(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += (i + 1 == values.size()) ? " and " : ", ";
    out += values[i];
  }
  return out;
}

class CandidateList {
 public:
  void add(std::string_view text, std::string rule_id) {
    if (trim(text).empty()) return;
    std::string sentence = finish_sentence(text);
    if (seen_.insert(sentence).second) {
      out_.push_back({std::move(sentence), std::move(rule_id)});
    }
  }

  std::vector<CandidateReference> take() { return std::move(out_); }

 private:
  std::vector<CandidateReference> out_;
  std::unordered_set<std::string> seen_;
};

void add_boolean(CandidateList& list, const std::string& desc, const std::string& name,
                 bool value) {
  const auto words = split_words(name);
  const bool has_have = has_word(words, "has") || has_word(words, "have");
  const bool has_is = has_word(words, "is");

  if (value) {
    if (!desc.empty()) list.add(desc + "? Yes.", "bool-desc-yes");
    list.add(name + "? Yes.", "bool-name-yes");
    if (has_have) list.add("Does " + name, "bool-does");
    if (has_is) list.add(name, "bool-is-name");
    if (!has_have && !has_is) {
      list.add("has " + name, "bool-prefix-has");
      list.add("have " + name, "bool-prefix-have");
      list.add("is " + name, "bool-prefix-is");
    }
    return;
  }

  if (!desc.empty()) list.add(desc + "? No.", "bool-desc-no");
  list.add(name + "? No.", "bool-name-no");
  if (has_have) list.add("Does not " + name, "bool-does-not");
  if (has_is) {
    std::string substituted;
    bool replaced = false;
    for (const auto& w : words) {
      if (!substituted.empty()) substituted += ' ';
      substituted += w;
      if (!replaced && lower(w) == "is") {
        substituted += " not";
        replaced = true;
      }
    }
    list.add(substituted, "bool-is-not-subst");
  }
  if (!has_have && !has_is) {
    list.add("has not " + name, "bool-prefix-has-not");
    list.add("have not " + name, "bool-prefix-have-not");
    list.add("is not " + name, "bool-prefix-is-not");
    // Forms seen on noun-led slot names such as additional_luggage.
    list.add("has no " + name, "bool-prefix-has-no");
    list.add("does not " + name, "bool-prefix-does-not");
  }
}

}  // namespace

std::string normalize_slot_name(std::string_view slot) {
  std::string out;
  std::size_t i = 0;
  while (i < slot.size()) {
    while (i < slot.size() && (slot[i] == '_' || is_space(slot[i]))) ++i;
    const std::size_t start = i;
    while (i < slot.size() && slot[i] != '_' && !is_space(slot[i])) ++i;
    if (i > start) {
      if (!out.empty()) out += ' ';
      out.append(slot.substr(start, i - start));
    }
  }
  return out;
}

std::string finish_sentence(std::string_view text) {
  std::string out(trim(text));
  if (out.empty()) return out;
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  const char last = out.back();
  if (last != '.' && last != '?' && last != '!') out += '.';
  return out;
}

std::vector<CandidateReference> build_candidates(const DialogueAction& action,
                                                 const SlotSchema* slot) {
  CandidateList list;
  const IntentKind kind = action.kind();

  if (kind == IntentKind::kGoodbye) {
    list.add("Have a good day.", "goodbye");
    list.add("Bye bye.", "goodbye");
    list.add("See you.", "goodbye");
    return list.take();
  }
  if (kind == IntentKind::kReqMore) {
    list.add("What else do you need?", "req-more");
    list.add("What else can I help you with?", "req-more");
    list.add("Is there anything else?", "req-more");
    return list.take();
  }

  if (slot == nullptr) {
    throw ResolutionError("", action.intent + " action needs a slot schema");
  }
  const std::string desc = clean_description(slot->description);
  const std::string name = normalize_slot_name(slot->name);

  if (kind == IntentKind::kRequest) {
    if (!desc.empty()) list.add("Request " + desc, "request-desc");
    list.add("Request " + name, "request-name");
    return list.take();
  }

  if (action.values.empty()) {
    throw ValueDomainError(action.intent + "(" + slot->name + ") carries no value");
  }

  if (slot->is_boolean) {
    if (action.values.size() != 1 || (action.values[0] != kTrue && action.values[0] != kFalse)) {
      throw ValueDomainError("boolean slot '" + slot->name + "' expects exactly one of True/False");
    }
    add_boolean(list, desc, name, action.values[0] == kTrue);
    return list.take();
  }

  const std::string joined = join_values(action.values);
  if (action.values.size() == 1) {
    if (!desc.empty()) list.add(desc + " is " + joined, "desc-single");
    list.add(name + " is " + joined, "name-single");
  } else {
    if (!desc.empty()) list.add(desc + " are " + joined, "desc-multi");
    list.add(name + " are " + joined, "name-multi");
  }
  return list.take();
}

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 14695981039346656037ULL) {
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

// Unbiased draw in [0, bound); std distributions are not portable across
// standard libraries, the raw engine output is.
std::uint64_t draw_below(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t r = engine();
  while (r >= limit) r = engine();
  return r % bound;
}

std::vector<std::string> substitute_values(const DialogueAction& action, const SlotSchema& slot,
                                           std::span<const std::string> value_pool,
                                           const NegativeOptions& options) {
  const auto is_true_value = [&](const std::string& v) {
    return std::find(action.values.begin(), action.values.end(), v) != action.values.end();
  };

  if (slot.is_boolean) {
    return {action.values.front() == kTrue ? std::string(kFalse) : std::string(kTrue)};
  }

  std::vector<std::string> alternatives;
  if (slot.is_categorical) {
    for (const auto& v : slot.possible_values) {
      if (!is_true_value(v) &&
          std::find(alternatives.begin(), alternatives.end(), v) == alternatives.end()) {
        alternatives.push_back(v);
      }
    }
    return alternatives;
  }

  for (const auto& v : value_pool) {
    if (!is_true_value(v)) alternatives.push_back(v);
  }
  if (alternatives.size() <= options.per_slot) return alternatives;

  std::uint64_t key = fnv1a(slot.name);
  for (const auto& v : action.values) key = fnv1a(v, fnv1a("\x1f", key));
  std::mt19937_64 engine(options.seed ^ key);
  const std::size_t n = alternatives.size();
  for (std::size_t i = 0; i < options.per_slot; ++i) {
    const std::size_t j = i + draw_below(engine, n - i);
    std::swap(alternatives[i], alternatives[j]);
  }
  alternatives.resize(options.per_slot);
  return alternatives;
}

}  // namespace

NegativeSet build_negatives(const DialogueAction& action, const SlotSchema& slot,
                            std::span<const std::string> value_pool,
                            const NegativeOptions& options) {
  NegativeSet set;
  if (action.kind() != IntentKind::kInformLike || action.values.empty()) {
    return set;
  }

  const auto positives = build_candidates(action, &slot);
  const auto values = substitute_values(action, slot, value_pool, options);
  if (values.empty()) {
    set.warnings.push_back("no substitute value for " + action.intent + "(" + slot.name + ")");
    return set;
  }

  std::unordered_set<std::string> emitted;
  for (const auto& p : positives) emitted.insert(p.text);
  for (const auto& value : values) {
    DialogueAction tampered = action;
    tampered.values = {value};
    for (auto& c : build_candidates(tampered, &slot)) {
      if (emitted.insert(c.text).second) {
        set.refs.push_back({std::move(c.text), value, "negative:" + c.rule_id});
      }
    }
  }
  return set;
}

InstanceReferences build_instance_references(const EvalInstance& instance,
                                             const SchemaCatalog& catalog,
                                             const ValuePool& pool,
                                             const NegativeOptions& options) {
  InstanceReferences refs;
  refs.instance_id = instance.instance_id;
  refs.actions.reserve(instance.actions.size());
  for (const auto& action : instance.actions) {
    ActionReferences out;
    const SlotSchema* slot = nullptr;
    if (action.slot) {
      slot = catalog.find_slot(instance.service, *action.slot);
      if (slot == nullptr) {
        throw ResolutionError(instance.instance_id, "unknown slot '" + *action.slot +
                                                        "' in service '" + instance.service + "'");
      }
      out.slot_description = slot->description;
    }
    out.candidates = build_candidates(action, slot);
    if (slot != nullptr && !action.values.empty()) {
      auto negatives =
          build_negatives(action, *slot, pool.values(instance.service, slot->name), options);
      out.negatives = std::move(negatives.refs);
      for (auto& w : negatives.warnings) {
        refs.warnings.push_back(instance.instance_id + ": " + w);
      }
    }
    refs.actions.push_back(std::move(out));
  }
  return refs;
}

}  // namespace sgsacc
