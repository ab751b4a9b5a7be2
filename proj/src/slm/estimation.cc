#include "slm/estimation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "slm/error.h"

namespace slm {

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int32_t RootLabelIndex(const Vocabulary& vocab) {
  const int32_t root = vocab.RootLabel();
  return root == kNoSymbol ? 0 : root;
}

CategoryId SentenceEndTag(const Vocabulary& vocab) {
  CategoryId se = vocab.Tag(kSentenceEndTag);
  return se == kNoSymbol ? 0 : se;
}

class DerivationBuilder {
 public:
  explicit DerivationBuilder(const Vocabulary& vocab) : vocab_(vocab) {}

  void Visit(const ParseNode& node) {
    if (node.is_leaf()) {
      if (node.head.word <= Vocabulary::kBos || node.head.word == Vocabulary::kEos)
        throw Error(ErrorCode::kInvalidDerivation, "sentence markers cannot be tree leaves");
      if (!vocab_.IsTag(node.head.category))
        throw Error(ErrorCode::kInvalidDerivation, "leaf category is not a tag");
      CloseCurrent();
      derivation_.positions.push_back({node.head.word, node.head.category, {}});
      return;
    }
    if (!node.right)
      throw Error(ErrorCode::kInvalidDerivation, "internal node without two children");
    if (!vocab_.IsLabel(node.head.category))
      throw Error(ErrorCode::kInvalidDerivation, "internal node category is not a label");
    Visit(*node.left);
    Visit(*node.right);
    const int32_t label = vocab_.LabelIndex(node.head.category);
    derivation_.positions.back().actions.push_back(
        node.head_is_left ? ParserAction::AdjoinLeft(label) : ParserAction::AdjoinRight(label));
  }

  ParseDerivation Finish() {
    CloseCurrent();
    derivation_.positions.push_back({Vocabulary::kEos, SentenceEndTag(vocab_), {}});
    if (derivation_.positions.size() > 1)
      derivation_.positions.back().actions.push_back(
          ParserAction::AdjoinLeft(RootLabelIndex(vocab_)));
    derivation_.positions.back().actions.push_back(ParserAction::Null());
    return std::move(derivation_);
  }

 private:
  void CloseCurrent() {
    if (!derivation_.positions.empty())
      derivation_.positions.back().actions.push_back(ParserAction::Null());
  }

  const Vocabulary& vocab_;
  ParseDerivation derivation_;
};

}  // namespace

ParseDerivation TreeToDerivation(const ParseNode& tree, const Vocabulary& vocab) {
  DerivationBuilder builder(vocab);
  builder.Visit(tree);
  return builder.Finish();
}

ParseDerivation NullOnlyDerivation(const std::vector<WordId>& words,
                                   const std::vector<CategoryId>& tags,
                                   const Vocabulary& vocab) {
  if (words.size() != tags.size())
    throw Error(ErrorCode::kInvalidArgument, "words and tags differ in length");
  ParseDerivation d;
  for (size_t i = 0; i < words.size(); ++i)
    d.positions.push_back({words[i], tags[i], {ParserAction::Null()}});
  PositionRecord end{Vocabulary::kEos, SentenceEndTag(vocab), {}};
  for (size_t i = 0; i < words.size(); ++i) end.actions.push_back(ParserAction::AdjoinLeft(0));
  end.actions.push_back(ParserAction::Null());
  d.positions.push_back(std::move(end));
  return d;
}

std::vector<bool> CheckMembership(size_t num_sentences, uint64_t seed) {
  std::vector<bool> check(num_sentences, false);
  size_t num_check = (num_sentences + 5) / 10;
  if (num_sentences >= 2) num_check = std::max<size_t>(num_check, 1);
  std::vector<std::pair<uint64_t, size_t>> ranked(num_sentences);
  const uint64_t salt = SplitMix(seed);
  for (size_t i = 0; i < num_sentences; ++i) ranked[i] = {SplitMix(salt ^ SplitMix(i)), i};
  std::sort(ranked.begin(), ranked.end());
  for (size_t i = 0; i < num_check; ++i) check[ranked[i].second] = true;
  return check;
}

void CountSplit::Merge(const CountSplit& other) {
  for (int c = 0; c < kNumComponents; ++c) {
    main[c].Merge(other.main[c]);
    check[c].Merge(other.check[c]);
  }
}

void AddDerivationEvents(const ParseDerivation& derivation, double weight, bool is_check,
                         const Vocabulary& vocab, ParserMode mode, CountSplit* counts) {
  ForEachEvent(derivation, vocab, mode,
               [&](Component c, const Context& context, int32_t outcome,
                   const WordParsePrefix&) { counts->part(c, is_check).Add(context, outcome, weight); });
}

CountSplit GatherCounts(const std::vector<ParseDerivation>& derivations,
                        const std::vector<bool>& check_membership, const Vocabulary& vocab,
                        ParserMode mode) {
  if (check_membership.size() != derivations.size())
    throw Error(ErrorCode::kInvalidArgument, "split membership does not match the corpus");
  CountSplit counts;
  for (size_t i = 0; i < derivations.size(); ++i)
    AddDerivationEvents(derivations[i], 1.0, check_membership[i], vocab, mode, &counts);
  return counts;
}

WeightEstimate EstimateWeights(const ComponentModel& main_model, const EventCounts& check,
                               const WeightEstimationOptions& options) {
  WeightEstimate result;
  if (check.empty()) {
    Warn("empty check set: interpolation weights left uniform");
    return result;
  }
  const int n = main_model.num_levels();
  const double uniform = 1.0 / static_cast<double>(main_model.num_outcomes());

  struct BucketData {
    std::vector<double> weights;
    std::vector<double> rel;     // events x (n + 1), row-major
    std::vector<double> counts;  // per event
  };
  std::map<BucketId, BucketData> buckets;
  for (const auto& [key, count] : check.Sorted()) {
    if (count <= 0.0) continue;
    const BucketId b = main_model.Bucket(key.context);
    BucketData& data = buckets[b];
    if (data.weights.empty()) data.weights = main_model.Weights(b);
    for (int l = 0; l < n; ++l)
      data.rel.push_back(main_model.RelativeFrequency(l, key.outcome, key.context));
    data.rel.push_back(uniform);
    data.counts.push_back(count);
  }

  auto log_likelihood = [&]() {
    double ll = 0.0;
    for (const auto& [b, data] : buckets) {
      for (size_t e = 0; e < data.counts.size(); ++e) {
        const double* rel = &data.rel[e * (n + 1)];
        double p = 0.0;
        for (int l = 0; l <= n; ++l) p += data.weights[l] * rel[l];
        ll += data.counts[e] * std::log(p);
      }
    }
    return ll;
  };

  double ll = log_likelihood();
  result.log_likelihood.push_back(ll);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (auto& [b, data] : buckets) {
      std::vector<double> expected(n + 1, 0.0);
      double total = 0.0;
      for (size_t e = 0; e < data.counts.size(); ++e) {
        const double* rel = &data.rel[e * (n + 1)];
        double p = 0.0;
        for (int l = 0; l <= n; ++l) p += data.weights[l] * rel[l];
        for (int l = 0; l <= n; ++l) expected[l] += data.counts[e] * data.weights[l] * rel[l] / p;
        total += data.counts[e];
      }
      for (int l = 0; l <= n; ++l) data.weights[l] = expected[l] / total;
    }
    const double next = log_likelihood();
    result.log_likelihood.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < options.min_improvement) break;
  }
  for (auto& [b, data] : buckets) result.weights[b] = std::move(data.weights);
  return result;
}

ContextSchema ActiveSchema(const ContextSchema& schema, const EventCounts& events) {
  if (events.empty() || schema.levels.empty()) return schema;
  ContextSchema active;
  active.field_names = schema.field_names;
  const int n = schema.num_levels();
  for (int l = 0; l < n; ++l) {
    bool constant = true;
    bool first = true;
    Context value;
    for (const auto& [key, count] : events.raw()) {
      Context projected = schema.Project(key.context, l);
      if (first) {
        value = projected;
        first = false;
      } else if (!(projected == value)) {
        constant = false;
        break;
      }
    }
    if (constant) {
      // Every coarser level is constant too; keep only the last one.
      active.levels.push_back(schema.levels[n - 1]);
      return active;
    }
    active.levels.push_back(schema.levels[l]);
  }
  return active;
}

ComponentEstimate EstimateComponent(const ContextSchema& canonical, int32_t num_outcomes,
                                    const EventCounts& main, const EventCounts& check,
                                    bool pool_check, const WeightEstimationOptions& options) {
  EventCounts all = main;
  all.Merge(check);
  ComponentModel main_model(ActiveSchema(canonical, all), num_outcomes);
  main_model.SetCounts(main);
  WeightEstimate estimate = EstimateWeights(main_model, check, options);
  ComponentEstimate out{std::move(main_model), std::move(estimate.log_likelihood)};
  if (pool_check) out.model.SetCounts(all);
  out.model.SetWeights(std::move(estimate.weights));
  return out;
}

void EstimateModel(const CountSplit& counts, StructuredLm* model,
                   const WeightEstimationOptions& options) {
  for (int c = 0; c < kNumComponents; ++c) {
    const auto comp = static_cast<Component>(c);
    model->mutable_component(comp) =
        EstimateComponent(CanonicalSchema(comp), model->NumOutcomes(comp), counts.main[c],
                          counts.check[c], model->pool_check, options)
            .model;
  }
}

namespace {

void CollectCategories(const BinarizedTree& tree, std::set<std::string>* tags,
                       std::vector<std::string>* tag_order, std::set<std::string>* labels,
                       std::vector<std::string>* label_order) {
  if (tree.is_leaf()) {
    if (tags->insert(tree.label).second) tag_order->push_back(tree.label);
    return;
  }
  if (labels->insert(tree.label).second) label_order->push_back(tree.label);
  CollectCategories(tree.left(), tags, tag_order, labels, label_order);
  CollectCategories(tree.right(), tags, tag_order, labels, label_order);
}

}  // namespace

void AddCategories(const std::vector<BinarizedTree>& trees, Vocabulary* vocab) {
  std::set<std::string> tags, labels;
  std::vector<std::string> tag_order, label_order;
  for (const auto& tree : trees) CollectCategories(tree, &tags, &tag_order, &labels, &label_order);
  vocab->AddTag(kSentenceBeginTag);
  vocab->AddTag(kSentenceEndTag);
  for (const auto& t : tag_order) vocab->AddTag(t);
  vocab->AddLabel(kRootLabel);
  for (const auto& l : label_order) vocab->AddLabel(l);
}

std::vector<BinarizedTree> PrepareTrees(const std::vector<BracketedTree>& trees,
                                        const HeadRules& rules) {
  std::vector<BinarizedTree> out;
  out.reserve(trees.size());
  for (const auto& tree : trees)
    out.push_back(Binarize(PercolateHeadwords(StripAnnotations(tree), rules)));
  return out;
}

StructuredLm InitializeModel(const std::vector<BracketedTree>& trees, const Vocabulary& words,
                             const InitOptions& options) {
  const HeadRules default_rules = HeadRules::Default();
  const HeadRules& rules = options.head_rules ? *options.head_rules : default_rules;
  const std::vector<BinarizedTree> binarized = PrepareTrees(trees, rules);

  Vocabulary vocab;
  for (WordId w = 3; w < words.num_words(); ++w) vocab.AddWord(words.WordString(w));
  if (options.collapse_tags) vocab.CollapseTags();
  if (options.collapse_labels) vocab.CollapseLabels();
  AddCategories(binarized, &vocab);

  std::vector<ParseDerivation> derivations;
  derivations.reserve(binarized.size());
  for (const auto& tree : binarized) {
    ParseTreePtr indexed = ToParseTree(tree, vocab);
    if (options.mode == ParserMode::kNullOnly) {
      std::vector<WordId> ws;
      std::vector<CategoryId> ts;
      std::vector<const ParseNode*> stack{indexed.get()};
      while (!stack.empty()) {
        const ParseNode* node = stack.back();
        stack.pop_back();
        if (node->is_leaf()) {
          ws.push_back(node->head.word);
          ts.push_back(node->head.category);
        } else {
          stack.push_back(node->right.get());
          stack.push_back(node->left.get());
        }
      }
      derivations.push_back(NullOnlyDerivation(ws, ts, vocab));
    } else {
      derivations.push_back(TreeToDerivation(*indexed, vocab));
    }
  }

  StructuredLm model(std::move(vocab), options.mode);
  model.source = options.source;
  model.iteration = 0;
  model.split_seed = options.split_seed;
  model.pool_check = options.pool_check;
  const CountSplit counts = GatherCounts(
      derivations, CheckMembership(derivations.size(), options.split_seed), model.vocab(),
      options.mode);
  EstimateModel(counts, &model);
  return model;
}

}  // namespace slm
