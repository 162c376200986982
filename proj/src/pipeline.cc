#include "cotype/pipeline.h"

#include <algorithm>
#include <chrono>
#include <map>

#include "cotype/util.h"

namespace cotype {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FeatureOptions feature_options(const RunConfig& config, const BrownClusters* brown) {
  return {config.features.window, brown};
}

double gold_span_accuracy(const PipelineInputs& in, const EmbeddingModel& model, const RunConfig& config,
                          const std::vector<std::vector<std::string>>* injected = nullptr) {
  const auto spans = gold_mention_spans(*in.test_gold, *in.test);
  const Predictions p = batch_predict(*in.test, spans, model, in.kb->hierarchy(), config.inference,
                                      feature_options(config, in.brown), config.threads, injected);
  return relation_classification_accuracy(in.test_gold->relations,
                                          to_annotations(p, *in.test, in.kb->hierarchy()).relations);
}

}  // namespace

std::vector<MentionSpan> gold_mention_spans(const Annotations& gold, const Corpus& corpus) {
  std::vector<MentionSpan> out;
  for (const auto& e : gold.entities) {
    const auto s = corpus.find_sentence(e.doc, e.sentence);
    if (!s) throw InputError("gold annotation references unknown sentence " + e.doc + ":" + std::to_string(e.sentence));
    if (e.span.start >= e.span.end || e.span.end > corpus.sentence(*s).tokens.size()) {
      throw InputError("gold annotation span outside sentence " + e.doc + ":" + std::to_string(e.sentence));
    }
    out.push_back({*s, e.span});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PipelineResult run_pipeline(const PipelineInputs& in, const RunConfig& config) {
  if (!in.train || !in.kb) throw InputError("pipeline needs a training corpus and a knowledge base");
  PipelineResult r;
  auto t0 = std::chrono::steady_clock::now();
  r.segmentation = run_segmentation(*in.train, *in.kb, config.segmenter);
  r.seconds_segment = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.labeled = build_labeled_corpus(*in.train, r.segmentation.mentions, *in.kb, config.labeler);
  r.seconds_label = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.features = featurize_corpus(*in.train, r.labeled, config.features, in.brown, nullptr, config.threads);
  r.graph = build_training_graph(r.labeled, r.features, in.kb->hierarchy());
  r.seconds_features = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.model = train(r.graph, config.train, &r.train_stats);
  r.seconds_train = seconds_since(t0);

  if (!in.test) return r;
  t0 = std::chrono::steady_clock::now();
  if (in.gold_mentions) {
    if (!in.test_gold) throw InputError("gold mentions requested without a gold file");
    r.test_mentions = gold_mention_spans(*in.test_gold, *in.test);
  } else {
    r.test_mentions = detect_mentions(r.segmentation.model, *in.test);
  }
  r.predictions = batch_predict(*in.test, r.test_mentions, r.model, in.kb->hierarchy(), config.inference,
                                feature_options(config, in.brown), config.threads);
  if (in.test_gold) {
    r.metrics = evaluate(*in.test_gold, to_annotations(*r.predictions, *in.test, in.kb->hierarchy()));
    if (!in.gold_mentions) r.metrics->relation_accuracy = gold_span_accuracy(in, r.model, config);
  }
  r.seconds_predict = seconds_since(t0);
  return r;
}

std::vector<StudyRow> error_propagation_study(const PipelineInputs& in, const PipelineResult& base,
                                              const RunConfig& config) {
  if (!in.test || !in.test_gold) throw InputError("error propagation study needs a test corpus and gold file");
  const TypeHierarchy& h = in.kb->hierarchy();
  const FeatureOptions opts = feature_options(config, in.brown);
  const FeatureIndex ent_index(base.model.entity);
  auto predicted_types = [&](const Corpus& corpus, size_t sentence, Span span) {
    const auto feats = extract_entity_features(corpus.sentence(sentence), span, opts);
    const auto p = predict_entity_typepath(embed_mention(feats, ent_index, base.model.dim), base.model, h,
                                           config.inference);
    std::vector<std::string> names;
    for (TypeId t : p.path) names.push_back(h.entity_type_name(t));
    return names;
  };

  const auto test_spans = gold_mention_spans(*in.test_gold, *in.test);
  std::map<MentionSpan, std::vector<std::string>> gold_types;
  for (const auto& e : in.test_gold->entities) {
    gold_types[{*in.test->find_sentence(e.doc, e.sentence), e.span}] = e.types;
  }

  std::vector<StudyRow> rows;
  rows.push_back({"none", gold_span_accuracy(in, base.model, config)});
  for (const std::string mode : {"predicted", "gold"}) {
    EntityTypeInjection train_types(base.labeled.mentions.size());
    for (const auto& m : base.labeled.mentions) {
      if (mode == "predicted") {
        train_types[m.id] = predicted_types(*in.train, m.sentence, m.span);
      } else if (m.entity) {
        for (TypeId t : m.types) train_types[m.id].push_back(h.entity_type_name(t));
      }
    }
    std::vector<std::vector<std::string>> test_types;
    for (const auto& s : test_spans) {
      test_types.push_back(mode == "predicted" ? predicted_types(*in.test, s.sentence, s.span) : gold_types[s]);
    }
    const FeaturizedCorpus feats =
        featurize_corpus(*in.train, base.labeled, config.features, in.brown, &train_types, config.threads);
    const TrainingGraph graph = build_training_graph(base.labeled, feats, h);
    const EmbeddingModel model = train(graph, config.train);
    rows.push_back({mode, gold_span_accuracy(in, model, config, &test_types)});
  }
  return rows;
}

std::string format_study(const std::vector<StudyRow>& rows) {
  std::string out = "entity_types\trelation_accuracy\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "\t%.6f\n", r.accuracy);
    out += r.mode + buf;
  }
  return out;
}

}  // namespace cotype
