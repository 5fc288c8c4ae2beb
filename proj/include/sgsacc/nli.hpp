#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sgsacc {

enum class NliLabel { kEntailment, kNeutral, kContradiction };

std::string_view to_string(NliLabel label);

// Probability triple over the three NLI classes. Construction validates the
// triple, so any NliVerdict in hand is well formed.
class NliVerdict {
 public:
  static constexpr double kSumTolerance = 1e-4;

  // Throws ProtocolError if a probability is outside [0, 1] or not finite,
  // or the three do not sum to 1 within kSumTolerance.
  static NliVerdict make(double entailment, double neutral, double contradiction);

  static NliVerdict entailment_only() { return {1.0, 0.0, 0.0}; }
  static NliVerdict neutral_only() { return {0.0, 1.0, 0.0}; }
  static NliVerdict contradiction_only() { return {0.0, 0.0, 1.0}; }

  double entailment() const noexcept { return entailment_; }
  double neutral() const noexcept { return neutral_; }
  double contradiction() const noexcept { return contradiction_; }

  // Argmax; ties resolve entailment > neutral > contradiction.
  NliLabel label() const noexcept;
  bool entails() const noexcept { return label() == NliLabel::kEntailment; }

  bool operator==(const NliVerdict&) const = default;

 private:
  NliVerdict(double e, double n, double c) : entailment_(e), neutral_(n), contradiction_(c) {}

  double entailment_;
  double neutral_;
  double contradiction_;
};

struct NliPair {
  std::string premise;
  std::string hypothesis;

  bool operator==(const NliPair&) const = default;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;

  // verdicts[i] answers pairs[i]. Either every verdict comes back or the
  // call throws. Throws std::invalid_argument for a pair with an empty side.
  virtual std::vector<NliVerdict> classify_batch(std::span<const NliPair> pairs) = 0;

  NliVerdict classify(const NliPair& pair);

  // Stable description embedded in reports ("mock", "remote:<url>").
  virtual std::string identity() const = 0;
};

void check_pairs(std::span<const NliPair> pairs);

// Offline stand-in for an NLI model. Both texts are lower-cased and stripped
// of punctuation; stop words are dropped from the hypothesis. If every
// remaining hypothesis token is in the premise the pair is entailed. If it
// would be entailed once its negation tokens ("not", "no") were removed, it
// is a contradiction. Otherwise neutral.
NliVerdict mock_verdict(std::string_view premise, std::string_view hypothesis);

class MockNli final : public NliBackend {
 public:
  std::vector<NliVerdict> classify_batch(std::span<const NliPair> pairs) override;
  std::string identity() const override { return "mock"; }
};

// Memoizes an inner backend on the exact (premise, hypothesis) bytes.
// Concurrent readers share the lock; inserts take it exclusively.
class CachingNli final : public NliBackend {
 public:
  explicit CachingNli(std::shared_ptr<NliBackend> inner);

  std::vector<NliVerdict> classify_batch(std::span<const NliPair> pairs) override;
  std::string identity() const override { return inner_->identity(); }

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  struct PairHash {
    std::size_t operator()(const NliPair& p) const noexcept;
  };

  std::shared_ptr<NliBackend> inner_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<NliPair, NliVerdict, PairHash> entries_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
};

// Client for the inference sidecar: POST {base}/v1/classify with
// {"pairs": [{"premise", "hypothesis"}]} and a {"verdicts": [...]} reply.
// Connection failures and 5xx replies are retried with doubling backoff;
// a 4xx reply or a malformed body is a ProtocolError.
class RemoteNli final : public NliBackend {
 public:
  static constexpr const char* kUrlEnv = "SGSACC_NLI_URL";

  explicit RemoteNli(std::string base_url, RetryPolicy retry = {},
                     std::size_t max_batch = 64,
                     std::chrono::seconds timeout = std::chrono::seconds(120));

  // Value of SGSACC_NLI_URL, or an empty string.
  static std::string url_from_env();

  std::vector<NliVerdict> classify_batch(std::span<const NliPair> pairs) override;
  std::string identity() const override { return "remote:" + base_url_; }

  // Replaces the sleep between retries; tests use it to skip waiting.
  void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
  }

 private:
  std::vector<NliVerdict> send_chunk(std::span<const NliPair> pairs);

  std::string base_url_;
  std::string host_;
  std::string path_prefix_;
  RetryPolicy retry_;
  std::size_t max_batch_;
  std::chrono::seconds timeout_;
  std::function<void(std::chrono::milliseconds)> sleeper_;
};

// Parses a /v1/classify reply, checking length and every verdict.
std::vector<NliVerdict> parse_verdicts(std::string_view body, std::size_t expected);
std::string encode_pairs(std::span<const NliPair> pairs);

}  // namespace sgsacc
