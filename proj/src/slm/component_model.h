#ifndef SLM_COMPONENT_MODEL_H_
#define SLM_COMPONENT_MODEL_H_

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "slm/vocabulary.h"

namespace slm {

class LineReader;

inline constexpr int kMaxContextFields = 4;
// Marks unused slots of a projected context key.
inline constexpr int32_t kUnusedField = std::numeric_limits<int32_t>::min();

// A full conditioning context: up to four integer fields.
struct Context {
  std::array<int32_t, kMaxContextFields> fields{kUnusedField, kUnusedField,
                                                kUnusedField, kUnusedField};
  bool operator==(const Context&) const = default;
  auto operator<=>(const Context&) const = default;
};

struct ContextHash {
  size_t operator()(const Context& c) const noexcept;
};

struct EventKey {
  Context context;
  int32_t outcome = 0;
  bool operator==(const EventKey&) const = default;
  auto operator<=>(const EventKey&) const = default;
};

struct EventKeyHash {
  size_t operator()(const EventKey& e) const noexcept;
};

// Multiset of (full context, outcome) events with real-valued counts
// (fractional after EM). Merging is a per-key sum.
class EventCounts {
 public:
  void Add(const Context& context, int32_t outcome, double count = 1.0);
  void Merge(const EventCounts& other);
  double Get(const Context& context, int32_t outcome) const;
  double Total() const;
  size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  // Deterministic (sorted) view.
  std::vector<std::pair<EventKey, double>> Sorted() const;
  const std::unordered_map<EventKey, double, EventKeyHash>& raw() const { return counts_; }

 private:
  std::unordered_map<EventKey, double, EventKeyHash> counts_;
};

// Back-off structure: names of the full-context fields and, per level, the
// subset of fields kept (from most specific to least). The uniform
// distribution over outcomes is an implicit final level.
struct ContextSchema {
  std::vector<std::string> field_names;
  std::vector<std::vector<int>> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }
  Context Project(const Context& full, int level) const;
  bool operator==(const ContextSchema&) const = default;
};

// Interpolation weights are tied within buckets. A bucket is the most
// specific level whose context has been seen, together with the count range
// of that context: {1, 2-4, 5-15, 16+}. Contexts unseen at every level fall
// into a single bucket that only has the uniform level.
using BucketId = int32_t;
inline constexpr int kNumCountRanges = 4;
int CountRange(double count);

struct ContextStats {
  double total = 0.0;
  std::vector<std::pair<int32_t, double>> outcomes;  // sorted by outcome

  double Count(int32_t outcome) const;
};

// Deleted-interpolation conditional distribution P(outcome | context):
//   sum_l w_l(bucket) * f_l(outcome | context projected to level l)
//     + w_uniform(bucket) / num_outcomes
// where f_l are relative frequencies.
class ComponentModel {
 public:
  ComponentModel() = default;
  ComponentModel(ContextSchema schema, int32_t num_outcomes);

  // Replaces all count tables with the projections of `events`.
  void SetCounts(const EventCounts& events);
  void SetWeights(std::map<BucketId, std::vector<double>> weights);

  // Weight vector (one entry per level plus uniform) for a bucket; buckets
  // without estimated weights get a uniform split over their usable levels.
  std::vector<double> Weights(BucketId bucket) const;
  BucketId Bucket(const Context& context) const;
  int FirstSeenLevel(BucketId bucket) const;

  double Prob(int32_t outcome, const Context& context) const;
  // out.size() == num_outcomes().
  void Distribution(const Context& context, std::span<double> out) const;
  // Relative frequency at one level; 0 for an unseen context.
  double RelativeFrequency(int level, int32_t outcome, const Context& context) const;
  const ContextStats* Find(int level, const Context& context) const;

  // Distinct (context, outcome) types with nonzero count at the top level.
  size_t NumParameters() const;

  const ContextSchema& schema() const { return schema_; }
  int32_t num_outcomes() const { return num_outcomes_; }
  int num_levels() const { return schema_.num_levels(); }
  const std::map<BucketId, std::vector<double>>& weights() const { return weights_; }

  void Write(const std::string& name, std::ostream& out) const;
  // Reads a block written by Write; `name` must match.
  static ComponentModel Read(const std::string& name, LineReader& reader);

  bool operator==(const ComponentModel& other) const;

 private:
  using LevelTable = std::unordered_map<Context, ContextStats, ContextHash>;

  void FinalizeTotals();

  ContextSchema schema_;
  int32_t num_outcomes_ = 0;
  std::vector<LevelTable> tables_;
  std::map<BucketId, std::vector<double>> weights_;
};

}  // namespace slm

#endif  // SLM_COMPONENT_MODEL_H_
