#include "sgsacc/nli.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_set>

#include "sgsacc/errors.hpp"

namespace sgsacc {

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment:
      return "entailment";
    case NliLabel::kNeutral:
      return "neutral";
    case NliLabel::kContradiction:
      return "contradiction";
  }
  return "unknown";
}

NliVerdict NliVerdict::make(double entailment, double neutral, double contradiction) {
  for (const double p : {entailment, neutral, contradiction}) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ProtocolError("verdict probability out of [0, 1]: " + std::to_string(p));
    }
  }
  const double sum = entailment + neutral + contradiction;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ProtocolError("verdict probabilities sum to " + std::to_string(sum));
  }
  return {entailment, neutral, contradiction};
}

NliLabel NliVerdict::label() const noexcept {
  if (entailment_ >= neutral_ && entailment_ >= contradiction_) return NliLabel::kEntailment;
  if (neutral_ >= contradiction_) return NliLabel::kNeutral;
  return NliLabel::kContradiction;
}

void check_pairs(std::span<const NliPair> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].premise.empty() || pairs[i].hypothesis.empty()) {
      throw std::invalid_argument("NLI pair " + std::to_string(i) + " has an empty side");
    }
  }
}

NliVerdict NliBackend::classify(const NliPair& pair) {
  auto verdicts = classify_batch(std::span<const NliPair>(&pair, 1));
  if (verdicts.size() != 1) {
    throw ProtocolError("backend returned " + std::to_string(verdicts.size()) +
                        " verdicts for one pair");
  }
  return verdicts.front();
}

namespace {

constexpr std::array<std::string_view, 21> kStopWords = {
    "the", "a",  "an", "is",  "are", "of", "to", "whether", "yes", "in", "on",
    "at",  "for", "and", "or", "with", "by", "be", "it",     "this", "that"};

constexpr std::array<std::string_view, 2> kNegations = {"not", "no"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

std::vector<std::string> mock_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

NliVerdict mock_verdict(std::string_view premise, std::string_view hypothesis) {
  const auto premise_tokens = mock_tokens(premise);
  const std::unordered_set<std::string> in_premise(premise_tokens.begin(), premise_tokens.end());

  bool core_present = true;
  bool negations_present = true;
  for (const auto& token : mock_tokens(hypothesis)) {
    if (contains(kStopWords, token)) continue;
    const bool found = in_premise.contains(token);
    if (contains(kNegations, token)) {
      negations_present = negations_present && found;
    } else {
      core_present = core_present && found;
    }
  }
  if (!core_present) return NliVerdict::neutral_only();
  return negations_present ? NliVerdict::entailment_only() : NliVerdict::contradiction_only();
}

std::vector<NliVerdict> MockNli::classify_batch(std::span<const NliPair> pairs) {
  check_pairs(pairs);
  std::vector<NliVerdict> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(mock_verdict(p.premise, p.hypothesis));
  }
  return out;
}

std::size_t CachingNli::PairHash::operator()(const NliPair& p) const noexcept {
  const std::size_t a = std::hash<std::string>{}(p.premise);
  const std::size_t b = std::hash<std::string>{}(p.hypothesis);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

CachingNli::CachingNli(std::shared_ptr<NliBackend> inner) : inner_(std::move(inner)) {
  if (!inner_) throw std::invalid_argument("CachingNli needs an inner backend");
}

std::vector<NliVerdict> CachingNli::classify_batch(std::span<const NliPair> pairs) {
  check_pairs(pairs);
  std::vector<std::optional<NliVerdict>> found(pairs.size());
  std::vector<NliPair> missing;
  std::vector<std::size_t> missing_slot(pairs.size(), 0);
  {
    std::shared_lock lock(mutex_);
    std::unordered_map<NliPair, std::size_t, PairHash> pending;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (const auto it = entries_.find(pairs[i]); it != entries_.end()) {
        found[i] = it->second;
        continue;
      }
      const auto [slot, inserted] = pending.try_emplace(pairs[i], missing.size());
      if (inserted) missing.push_back(pairs[i]);
      missing_slot[i] = slot->second;
    }
  }
  hits_ += pairs.size() - std::count_if(found.begin(), found.end(),
                                        [](const auto& v) { return !v.has_value(); });
  misses_ += missing.size();

  if (!missing.empty()) {
    auto computed = inner_->classify_batch(missing);
    if (computed.size() != missing.size()) {
      throw ProtocolError("backend returned " + std::to_string(computed.size()) +
                          " verdicts for " + std::to_string(missing.size()) + " pairs");
    }
    {
      std::unique_lock lock(mutex_);
      for (std::size_t m = 0; m < missing.size(); ++m) {
        entries_.insert_or_assign(missing[m], computed[m]);
      }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!found[i]) found[i] = computed[missing_slot[i]];
    }
  }

  std::vector<NliVerdict> out;
  out.reserve(pairs.size());
  for (auto& v : found) out.push_back(*v);
  return out;
}

std::size_t CachingNli::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t CachingNli::hits() const { return hits_.load(); }
std::size_t CachingNli::misses() const { return misses_.load(); }

}  // namespace sgsacc
