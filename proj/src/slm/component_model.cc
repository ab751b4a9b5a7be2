#include "slm/component_model.h"

#include <algorithm>

#include "slm/error.h"
#include "slm/text_io.h"

namespace slm {

namespace {

inline uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

size_t ContextHash::operator()(const Context& c) const noexcept {
  uint64_t h = 0;
  for (int32_t f : c.fields) h = Mix(h ^ static_cast<uint32_t>(f));
  return static_cast<size_t>(h);
}

size_t EventKeyHash::operator()(const EventKey& e) const noexcept {
  return static_cast<size_t>(
      Mix(ContextHash()(e.context) ^ static_cast<uint32_t>(e.outcome)));
}

void EventCounts::Add(const Context& context, int32_t outcome, double count) {
  counts_[EventKey{context, outcome}] += count;
}

void EventCounts::Merge(const EventCounts& other) {
  for (const auto& [key, count] : other.counts_) counts_[key] += count;
}

double EventCounts::Get(const Context& context, int32_t outcome) const {
  auto it = counts_.find(EventKey{context, outcome});
  return it == counts_.end() ? 0.0 : it->second;
}

double EventCounts::Total() const {
  double total = 0.0;
  for (const auto& [key, count] : Sorted()) total += count;
  return total;
}

std::vector<std::pair<EventKey, double>> EventCounts::Sorted() const {
  std::vector<std::pair<EventKey, double>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

Context ContextSchema::Project(const Context& full, int level) const {
  Context out;
  const auto& keep = levels[level];
  for (size_t i = 0; i < keep.size(); ++i) out.fields[i] = full.fields[keep[i]];
  return out;
}

int CountRange(double count) {
  if (count < 2.0) return 0;
  if (count < 5.0) return 1;
  if (count < 16.0) return 2;
  return 3;
}

double ContextStats::Count(int32_t outcome) const {
  auto it = std::lower_bound(
      outcomes.begin(), outcomes.end(), outcome,
      [](const std::pair<int32_t, double>& p, int32_t o) { return p.first < o; });
  return (it != outcomes.end() && it->first == outcome) ? it->second : 0.0;
}

ComponentModel::ComponentModel(ContextSchema schema, int32_t num_outcomes)
    : schema_(std::move(schema)), num_outcomes_(num_outcomes) {
  if (num_outcomes_ <= 0)
    throw Error(ErrorCode::kInvalidArgument, "component model needs at least one outcome");
  tables_.resize(schema_.levels.size());
}

void ComponentModel::SetCounts(const EventCounts& events) {
  tables_.assign(schema_.levels.size(), LevelTable());
  // Sorted iteration keeps floating-point sums independent of hash order.
  for (const auto& [key, count] : events.Sorted()) {
    if (count <= 0.0) continue;
    if (key.outcome < 0 || key.outcome >= num_outcomes_)
      throw Error(ErrorCode::kInternal, "event outcome out of range");
    for (int l = 0; l < num_levels(); ++l) {
      ContextStats& stats = tables_[l][schema_.Project(key.context, l)];
      auto it = std::lower_bound(
          stats.outcomes.begin(), stats.outcomes.end(), key.outcome,
          [](const std::pair<int32_t, double>& p, int32_t o) { return p.first < o; });
      if (it != stats.outcomes.end() && it->first == key.outcome) {
        it->second += count;
      } else {
        stats.outcomes.insert(it, {key.outcome, count});
      }
    }
  }
  FinalizeTotals();
}

void ComponentModel::FinalizeTotals() {
  for (auto& table : tables_) {
    for (auto& [context, stats] : table) {
      stats.total = 0.0;
      for (const auto& [outcome, count] : stats.outcomes) stats.total += count;
    }
  }
}

void ComponentModel::SetWeights(std::map<BucketId, std::vector<double>> weights) {
  for (const auto& [bucket, w] : weights) {
    if (w.size() != static_cast<size_t>(num_levels()) + 1)
      throw Error(ErrorCode::kInternal, "weight vector has wrong length");
  }
  weights_ = std::move(weights);
}

int ComponentModel::FirstSeenLevel(BucketId bucket) const {
  return bucket / kNumCountRanges;
}

std::vector<double> ComponentModel::Weights(BucketId bucket) const {
  auto it = weights_.find(bucket);
  if (it != weights_.end()) return it->second;
  const int first = std::min(FirstSeenLevel(bucket), num_levels());
  std::vector<double> w(num_levels() + 1, 0.0);
  const double share = 1.0 / static_cast<double>(num_levels() + 1 - first);
  for (int l = first; l <= num_levels(); ++l) w[l] = share;
  return w;
}

const ContextStats* ComponentModel::Find(int level, const Context& context) const {
  const auto& table = tables_[level];
  auto it = table.find(schema_.Project(context, level));
  return it == table.end() ? nullptr : &it->second;
}

BucketId ComponentModel::Bucket(const Context& context) const {
  for (int l = 0; l < num_levels(); ++l) {
    const ContextStats* stats = Find(l, context);
    if (stats != nullptr && stats->total > 0.0)
      return l * kNumCountRanges + CountRange(stats->total);
  }
  return num_levels() * kNumCountRanges;
}

double ComponentModel::RelativeFrequency(int level, int32_t outcome,
                                         const Context& context) const {
  const ContextStats* stats = Find(level, context);
  if (stats == nullptr || stats->total <= 0.0) return 0.0;
  return stats->Count(outcome) / stats->total;
}

double ComponentModel::Prob(int32_t outcome, const Context& context) const {
  const int n = num_levels();
  std::array<const ContextStats*, 8> found{};
  int first = n;
  for (int l = 0; l < n; ++l) {
    found[l] = Find(l, context);
    if (first == n && found[l] != nullptr && found[l]->total > 0.0) first = l;
  }
  const BucketId bucket =
      first < n ? first * kNumCountRanges + CountRange(found[first]->total)
                : n * kNumCountRanges;
  const std::vector<double> w = Weights(bucket);
  double p = w[n] / static_cast<double>(num_outcomes_);
  for (int l = first; l < n; ++l) {
    if (found[l] == nullptr || found[l]->total <= 0.0) continue;
    p += w[l] * found[l]->Count(outcome) / found[l]->total;
  }
  return p;
}

void ComponentModel::Distribution(const Context& context, std::span<double> out) const {
  if (out.size() != static_cast<size_t>(num_outcomes_))
    throw Error(ErrorCode::kInternal, "distribution buffer has wrong size");
  const int n = num_levels();
  const BucketId bucket = Bucket(context);
  const std::vector<double> w = Weights(bucket);
  std::fill(out.begin(), out.end(), w[n] / static_cast<double>(num_outcomes_));
  for (int l = FirstSeenLevel(bucket); l < n; ++l) {
    const ContextStats* stats = Find(l, context);
    if (stats == nullptr || stats->total <= 0.0) continue;
    const double scale = w[l] / stats->total;
    for (const auto& [outcome, count] : stats->outcomes) out[outcome] += scale * count;
  }
}

size_t ComponentModel::NumParameters() const {
  if (tables_.empty()) return 0;
  size_t n = 0;
  for (const auto& [context, stats] : tables_[0])
    for (const auto& [outcome, count] : stats.outcomes) n += (count > 0.0);
  return n;
}

void ComponentModel::Write(const std::string& name, std::ostream& out) const {
  out << "component " << name << '\n';
  out << "fields " << schema_.field_names.size();
  for (const auto& f : schema_.field_names) out << ' ' << f;
  out << '\n';
  out << "levels " << num_levels() << '\n';
  for (const auto& level : schema_.levels) {
    out << "level";
    for (int f : level) out << ' ' << f;
    out << '\n';
  }
  out << "outcomes " << num_outcomes_ << '\n';
  out << "buckets " << weights_.size() << '\n';
  for (const auto& [bucket, w] : weights_) {
    out << "bucket " << bucket;
    for (double x : w) out << ' ' << FormatDouble(x);
    out << '\n';
  }
  size_t lines = 0;
  for (const auto& table : tables_)
    for (const auto& [context, stats] : table) lines += stats.outcomes.size();
  out << "counts " << lines << '\n';
  for (int l = 0; l < num_levels(); ++l) {
    std::vector<const std::pair<const Context, ContextStats>*> entries;
    entries.reserve(tables_[l].size());
    for (const auto& entry : tables_[l]) entries.push_back(&entry);
    std::sort(entries.begin(), entries.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    const size_t width = schema_.levels[l].size();
    for (const auto* entry : entries) {
      for (const auto& [outcome, count] : entry->second.outcomes) {
        out << l;
        for (size_t i = 0; i < width; ++i) out << ' ' << entry->first.fields[i];
        out << ' ' << outcome << ' ' << FormatDouble(count) << '\n';
      }
    }
  }
  out << "end " << name << '\n';
}

ComponentModel ComponentModel::Read(const std::string& name, LineReader& reader) {
  auto args = reader.Expect("component");
  if (args.size() != 1 || args[0] != name) reader.Fail("expected component '" + name + "'");
  ContextSchema schema;
  args = reader.Expect("fields");
  if (args.empty()) reader.Fail("malformed 'fields' line");
  const long long num_fields = ParseInt(args[0], reader.line_number());
  if (num_fields < 0 || num_fields > kMaxContextFields ||
      static_cast<size_t>(num_fields) + 1 != args.size())
    reader.Fail("malformed 'fields' line");
  schema.field_names.assign(args.begin() + 1, args.end());
  args = reader.Expect("levels");
  if (args.size() != 1) reader.Fail("malformed 'levels' line");
  const long long num_levels = ParseInt(args[0], reader.line_number());
  if (num_levels < 0 || num_levels > 7) reader.Fail("unsupported number of levels");
  for (long long l = 0; l < num_levels; ++l) {
    auto fields = reader.Expect("level");
    std::vector<int> keep;
    for (const auto& f : fields) {
      long long idx = ParseInt(f, reader.line_number());
      if (idx < 0 || idx >= num_fields) reader.Fail("level field out of range");
      keep.push_back(static_cast<int>(idx));
    }
    schema.levels.push_back(std::move(keep));
  }
  args = reader.Expect("outcomes");
  if (args.size() != 1) reader.Fail("malformed 'outcomes' line");
  ComponentModel model(std::move(schema),
                       static_cast<int32_t>(ParseInt(args[0], reader.line_number())));

  args = reader.Expect("buckets");
  if (args.size() != 1) reader.Fail("malformed 'buckets' line");
  const long long num_buckets = ParseInt(args[0], reader.line_number());
  std::map<BucketId, std::vector<double>> weights;
  for (long long b = 0; b < num_buckets; ++b) {
    auto tokens = reader.Expect("bucket");
    if (tokens.size() != static_cast<size_t>(num_levels) + 2)
      reader.Fail("bucket line has wrong number of weights");
    std::vector<double> w;
    for (size_t i = 1; i < tokens.size(); ++i)
      w.push_back(ParseDouble(tokens[i], reader.line_number()));
    weights[static_cast<BucketId>(ParseInt(tokens[0], reader.line_number()))] = std::move(w);
  }
  model.weights_ = std::move(weights);

  args = reader.Expect("counts");
  if (args.size() != 1) reader.Fail("malformed 'counts' line");
  const long long num_lines = ParseInt(args[0], reader.line_number());
  for (long long i = 0; i < num_lines; ++i) {
    auto tokens = reader.Tokens();
    if (tokens.size() < 3) reader.Fail("malformed count line");
    const long long level = ParseInt(tokens[0], reader.line_number());
    if (level < 0 || level >= model.num_levels()) reader.Fail("count level out of range");
    const size_t width = model.schema_.levels[level].size();
    if (tokens.size() != width + 3) reader.Fail("count line has wrong number of fields");
    Context context;
    for (size_t f = 0; f < width; ++f)
      context.fields[f] = static_cast<int32_t>(ParseInt(tokens[1 + f], reader.line_number()));
    const auto outcome = static_cast<int32_t>(ParseInt(tokens[1 + width], reader.line_number()));
    if (outcome < 0 || outcome >= model.num_outcomes_) reader.Fail("outcome out of range");
    const double count = ParseDouble(tokens[2 + width], reader.line_number());
    model.tables_[level][context].outcomes.emplace_back(outcome, count);
  }
  for (auto& table : model.tables_)
    for (auto& [context, stats] : table)
      std::sort(stats.outcomes.begin(), stats.outcomes.end());
  model.FinalizeTotals();
  auto end = reader.Expect("end");
  if (end.size() != 1 || end[0] != name) reader.Fail("expected 'end " + name + "'");
  return model;
}

bool ComponentModel::operator==(const ComponentModel& other) const {
  if (!(schema_ == other.schema_) || num_outcomes_ != other.num_outcomes_ ||
      weights_ != other.weights_ || tables_.size() != other.tables_.size())
    return false;
  for (size_t l = 0; l < tables_.size(); ++l) {
    if (tables_[l].size() != other.tables_[l].size()) return false;
    for (const auto& [context, stats] : tables_[l]) {
      auto it = other.tables_[l].find(context);
      if (it == other.tables_[l].end() || it->second.outcomes != stats.outcomes) return false;
    }
  }
  return true;
}

}  // namespace slm
