#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "cotype/config.h"
#include "cotype/evaluation.h"
#include "cotype/features.h"
#include "cotype/inference.h"
#include "cotype/labeler.h"
#include "cotype/pipeline.h"
#include "cotype/segmenter.h"
#include "cotype/synthetic.h"
#include "cotype/trainer.h"
#include "cotype/util.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cotype;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string run_dir;
  PathConfig paths;
  std::string mentions;
  std::string apply_to;
  std::string labeled_dir;
  std::string features_dir;
  std::string model;
  std::string predictions;
  bool gold_mentions = false;
  bool study = false;
  std::optional<double> eta;
  SyntheticConfig synth;
  std::string synth_out;
};

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Collects the artifacts of one command under its run directory.
class Run {
 public:
  Run(std::string command, RunConfig config, const std::string& dir_override)
      : command_(std::move(command)), config_(std::move(config)), start_(std::chrono::steady_clock::now()) {
    dir_ = dir_override.empty() ? fs::path("runs") / (utc_stamp() + "-" + config_hash(config_)) : fs::path(dir_override);
    fs::create_directories(dir_);
  }

  const RunConfig& config() const { return config_; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  void input(const std::string& path) {
    if (!path.empty()) inputs_[path] = hex64(hash_file(path));
  }

  void output(const std::string& name, const std::string& content) {
    write_file(path(name).string(), content);
    outputs_.push_back(name);
  }

  void finish() {
    output("config.json", dump_config(config_));
    json meta{{"command", command_},
              {"version", kVersion},
              {"config_hash", config_hash(config_)},
              {"seed", config_.seed},
              {"threads", config_.threads},
              {"wall_time_seconds",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()},
              {"inputs", inputs_},
              {"outputs", outputs_}};
    write_file(path("run.json").string(), meta.dump(2) + "\n");
    std::cerr << "artifacts in " << dir_.string() << "\n";
  }

 private:
  std::string command_;
  RunConfig config_;
  std::chrono::steady_clock::time_point start_;
  fs::path dir_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

RunConfig resolve_config(const Options& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.eta) c.inference.eta = *o.eta;
  auto over = [](std::string& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  over(c.paths.corpus, o.paths.corpus);
  over(c.paths.kb_entities, o.paths.kb_entities);
  over(c.paths.kb_relations, o.paths.kb_relations);
  over(c.paths.hierarchy, o.paths.hierarchy);
  over(c.paths.test_corpus, o.paths.test_corpus);
  over(c.paths.gold, o.paths.gold);
  over(c.paths.brown, o.paths.brown);
  over(c.paths.run_dir, o.run_dir);
  c.features.brown_path = c.paths.brown;
  propagate_globals(c);
  return c;
}

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string("missing required input ") + flag);
  return value;
}

KnowledgeBase load_kb(const PathConfig& p, Run& run) {
  run.input(need(p.kb_entities, "--kb-entities"));
  run.input(need(p.kb_relations, "--kb-relations"));
  run.input(need(p.hierarchy, "--hierarchy"));
  return KnowledgeBase::load(p.kb_entities, p.kb_relations, p.hierarchy);
}

Corpus load_corpus(const std::string& path, const char* flag, Run& run) {
  run.input(need(path, flag));
  return Corpus::load(path);
}

std::optional<BrownClusters> load_brown(const RunConfig& c, Run& run) {
  if (c.paths.brown.empty()) return std::nullopt;
  run.input(c.paths.brown);
  return load_brown_clusters(c.paths.brown);
}

LabeledCorpus load_labeled(const std::string& dir, const Corpus& corpus, const TypeHierarchy& h, Run& run) {
  const fs::path d(need(dir, "--labeled"));
  LabeledCorpusFiles files;
  const std::pair<std::string*, const char*> parts[] = {{&files.relations, "dl_relations.jsonl"},
                                                       {&files.entities, "dl_entities.jsonl"},
                                                       {&files.none_entities, "dl_none_entities.jsonl"}};
  for (const auto& [dst, name] : parts) {
    run.input((d / name).string());
    *dst = read_file((d / name).string());
  }
  return parse_labeled_corpus(files, corpus, h);
}

void write_labeled(Run& run, const LabeledCorpus& dl, const Corpus& corpus, const TypeHierarchy& h) {
  const auto files = serialize_labeled_corpus(dl, corpus, h);
  run.output("dl_relations.jsonl", files.relations);
  run.output("dl_entities.jsonl", files.entities);
  run.output("dl_none_entities.jsonl", files.none_entities);
  run.output("label_stats.json", label_stats_json(dl.stats));
}

void write_features(Run& run, const FeaturizedCorpus& f) {
  run.output("relation_features.tsv", f.relation.dictionary.serialize());
  run.output("relation_edges.tsv", format_edges(f.relation.vectors));
  run.output("entity_features.tsv", f.entity.dictionary.serialize());
  run.output("entity_edges.tsv", format_edges(f.entity.vectors));
}

json segmentation_summary(const SegmentationRun& s) {
  return json{{"rounds", s.rounds},
              {"log_likelihood_trace", s.log_likelihood_trace},
              {"mentions", s.mentions.size()},
              {"phrase_training_accuracy", s.model.quality.phrase_training_accuracy},
              {"pos_training_accuracy", s.model.quality.pos_training_accuracy}};
}

json train_summary(const TrainStats& st) {
  json trace = json::array();
  for (const auto& [it, v] : st.trace) {
    trace.push_back({{"iteration", it}, {"O_Z", v.o_z}, {"O_M", v.o_m}, {"O_ZM", v.o_zm}, {"O", v.total()}});
  }
  return json{{"iterations", st.iterations}, {"converged", st.converged}, {"seconds", st.seconds}, {"trace", trace}};
}

int cmd_segment(const Options& o) {
  Run run("segment", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  const KnowledgeBase kb = load_kb(c.paths, run);
  const SegmentationRun seg = run_segmentation(corpus, kb, c.segmenter);
  run.output("mentions.tsv", format_mentions(corpus, seg.mentions));
  run.output("segmentation.json", segmentation_summary(seg).dump(2) + "\n");
  if (!o.apply_to.empty()) {
    const Corpus other = load_corpus(o.apply_to, "--apply-to", run);
    run.output("test_mentions.tsv", format_mentions(other, detect_mentions(seg.model, other)));
  }
  run.finish();
  return 0;
}

int cmd_label(const Options& o) {
  Run run("label", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  const KnowledgeBase kb = load_kb(c.paths, run);
  run.input(need(o.mentions, "--mentions"));
  auto spans = parse_mentions(read_file(o.mentions), corpus, o.mentions);
  const LabeledCorpus dl = build_labeled_corpus(corpus, std::move(spans), kb, c.labeler);
  write_labeled(run, dl, corpus, kb.hierarchy());
  run.finish();
  return 0;
}

int cmd_featurize(const Options& o) {
  Run run("featurize", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  run.input(need(c.paths.hierarchy, "--hierarchy"));
  const TypeHierarchy h = TypeHierarchy::load(c.paths.hierarchy);
  const LabeledCorpus dl = load_labeled(o.labeled_dir, corpus, h, run);
  const auto brown = load_brown(c, run);
  write_features(run, featurize_corpus(corpus, dl, c.features, brown ? &*brown : nullptr, nullptr, c.threads));
  run.finish();
  return 0;
}

FeaturizedCorpus load_features(const std::string& dir, const LabeledCorpus& dl, Run& run) {
  const fs::path d(need(dir, "--features"));
  auto space = [&](const std::string& prefix, size_t mentions) {
    const std::string dict_path = (d / (prefix + "_features.tsv")).string();
    const std::string edge_path = (d / (prefix + "_edges.tsv")).string();
    run.input(dict_path);
    run.input(edge_path);
    SpaceFeatures s{FeatureDictionary::parse(read_file(dict_path), dict_path), {}, {}};
    s.vectors = parse_edges(read_file(edge_path), mentions, s.dictionary.size(), edge_path);
    for (const auto& v : s.vectors) s.empty.push_back(v.empty());
    return s;
  };
  FeaturizedCorpus f;
  f.relation = space("relation", relation_training_order(dl).size());
  f.entity = space("entity", entity_training_order(dl).size());
  return f;
}

int cmd_train(const Options& o) {
  Run run("train", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  run.input(need(c.paths.hierarchy, "--hierarchy"));
  const TypeHierarchy h = TypeHierarchy::load(c.paths.hierarchy);
  const LabeledCorpus dl = load_labeled(o.labeled_dir, corpus, h, run);
  const FeaturizedCorpus f = load_features(o.features_dir, dl, run);
  TrainStats st;
  const EmbeddingModel model = train(build_training_graph(dl, f, h), c.train, &st);
  run.output("model.txt", serialize_model(model));
  run.output("train.json", train_summary(st).dump(2) + "\n");
  run.finish();
  return 0;
}

int cmd_predict(const Options& o) {
  Run run("predict", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  run.input(need(o.model, "--model"));
  const EmbeddingModel model = parse_model(read_file(o.model), o.model);
  run.input(need(c.paths.hierarchy, "--hierarchy"));
  const TypeHierarchy h = TypeHierarchy::load(c.paths.hierarchy);
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  std::vector<MentionSpan> spans;
  if (o.gold_mentions) {
    run.input(need(c.paths.gold, "--gold"));
    spans = gold_mention_spans(parse_annotations(read_file(c.paths.gold), c.paths.gold), corpus);
  } else {
    run.input(need(o.mentions, "--mentions (or --gold-mentions with --gold)"));
    spans = parse_mentions(read_file(o.mentions), corpus, o.mentions);
  }
  const auto brown = load_brown(c, run);
  const Predictions p = batch_predict(corpus, spans, model, h, c.inference,
                                      FeatureOptions{c.features.window, brown ? &*brown : nullptr}, c.threads);
  run.output("predictions.jsonl", format_predictions(p, corpus, h));
  run.finish();
  return 0;
}

void print_metrics(const MetricsReport& m) {
  if (m.has_entity) {
    std::printf("entity typing  strict %.4f  macro %.4f  micro %.4f\n", m.entity.strict.f1, m.entity.macro.f1,
                m.entity.micro.f1);
  }
  std::printf("relation classification accuracy %.4f\n", m.relation_accuracy);
  std::printf("relation extraction  P %.4f  R %.4f  F1 %.4f  (best F1 %.4f at %.2f)\n", m.relation.at_default.precision,
              m.relation.at_default.recall, m.relation.at_default.f1, m.relation.best.prf.f1, m.relation.best.threshold);
}

int cmd_evaluate(const Options& o) {
  Run run("evaluate", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  run.input(need(c.paths.gold, "--gold"));
  run.input(need(o.predictions, "--predictions"));
  const Annotations gold = parse_annotations(read_file(c.paths.gold), c.paths.gold);
  const Annotations pred = parse_annotations(read_file(o.predictions), o.predictions);
  const MetricsReport m = evaluate(gold, pred);
  run.output("metrics.json", metrics_json(m));
  run.output("pr_curve.tsv", format_curve(m.relation.curve));
  print_metrics(m);
  run.finish();
  return 0;
}

int cmd_synth(const Options& o) {
  RunConfig c = resolve_config(o);
  SyntheticConfig sc = o.synth;
  sc.seed = c.seed;
  Run run("synth", c, o.run_dir);
  const std::string out = o.synth_out.empty() ? run.path("data").string() : o.synth_out;
  write_synthetic(generate_synthetic(sc), out);
  std::cerr << "synthetic data in " << out << "\n";
  run.finish();
  return 0;
}

int cmd_pipeline(const Options& o) {
  Run run("pipeline", resolve_config(o), o.run_dir);
  const RunConfig& c = run.config();
  const Corpus corpus = load_corpus(c.paths.corpus, "--corpus", run);
  const KnowledgeBase kb = load_kb(c.paths, run);
  std::optional<Corpus> test;
  std::optional<Annotations> gold;
  if (!c.paths.test_corpus.empty()) test = load_corpus(c.paths.test_corpus, "--test-corpus", run);
  if (!c.paths.gold.empty()) {
    run.input(c.paths.gold);
    gold = parse_annotations(read_file(c.paths.gold), c.paths.gold);
  }
  if (gold && !test) throw InputError("--gold requires --test-corpus");
  const auto brown = load_brown(c, run);

  PipelineInputs in{&corpus, &kb, test ? &*test : nullptr, gold ? &*gold : nullptr, brown ? &*brown : nullptr,
                    o.gold_mentions};
  const PipelineResult r = run_pipeline(in, c);
  run.output("mentions.tsv", format_mentions(corpus, r.segmentation.mentions));
  run.output("segmentation.json", segmentation_summary(r.segmentation).dump(2) + "\n");
  write_labeled(run, r.labeled, corpus, kb.hierarchy());
  write_features(run, r.features);
  run.output("model.txt", serialize_model(r.model));
  run.output("train.json", train_summary(r.train_stats).dump(2) + "\n");
  if (r.predictions) {
    run.output("test_mentions.tsv", format_mentions(*test, r.test_mentions));
    run.output("predictions.jsonl", format_predictions(*r.predictions, *test, kb.hierarchy()));
  }
  if (r.metrics) {
    run.output("metrics.json", metrics_json(*r.metrics));
    run.output("pr_curve.tsv", format_curve(r.metrics->relation.curve));
    print_metrics(*r.metrics);
  }
  if (o.study) {
    if (!gold) throw InputError("--study requires --test-corpus and --gold");
    const auto rows = error_propagation_study(in, r, c);
    run.output("study.tsv", format_study(rows));
    std::cout << format_study(rows);
  }
  run.finish();
  return 0;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--seed", o.seed, "Random seed for every stage");
  app->add_option("--threads", o.threads, "Worker threads");
  app->add_option("--run-dir", o.run_dir, "Output directory (default runs/<timestamp>-<confighash>)");
}

void add_kb(CLI::App* app, Options& o) {
  app->add_option("--kb-entities", o.paths.kb_entities, "Entity TSV");
  app->add_option("--kb-relations", o.paths.kb_relations, "Relation fact TSV");
  app->add_option("--hierarchy", o.paths.hierarchy, "Type hierarchy TSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint entity and relation typing with distant supervision"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto* segment = app.add_subcommand("segment", "Detect entity mentions in a corpus");
  add_common(segment, o);
  segment->add_option("--corpus", o.paths.corpus, "POS-tagged corpus");
  add_kb(segment, o);
  segment->add_option("--apply-to", o.apply_to, "Also detect mentions in this corpus");

  auto* label = app.add_subcommand("label", "Build the distantly labeled training set");
  add_common(label, o);
  label->add_option("--corpus", o.paths.corpus, "POS-tagged corpus");
  add_kb(label, o);
  label->add_option("--mentions", o.mentions, "Mention TSV from segment");

  auto* featurize = app.add_subcommand("featurize", "Extract text features for the labeled set");
  add_common(featurize, o);
  featurize->add_option("--corpus", o.paths.corpus, "POS-tagged corpus");
  featurize->add_option("--hierarchy", o.paths.hierarchy, "Type hierarchy TSV");
  featurize->add_option("--labeled", o.labeled_dir, "Directory with the labeled set");
  featurize->add_option("--brown", o.paths.brown, "Brown cluster TSV");

  auto* train_cmd = app.add_subcommand("train", "Learn the embedding spaces");
  add_common(train_cmd, o);
  train_cmd->add_option("--corpus", o.paths.corpus, "POS-tagged corpus");
  train_cmd->add_option("--hierarchy", o.paths.hierarchy, "Type hierarchy TSV");
  train_cmd->add_option("--labeled", o.labeled_dir, "Directory with the labeled set");
  train_cmd->add_option("--features", o.features_dir, "Directory with feature dictionaries and edges");

  auto* predict = app.add_subcommand("predict", "Type mentions of a corpus");
  add_common(predict, o);
  predict->add_option("--model", o.model, "Model file");
  predict->add_option("--hierarchy", o.paths.hierarchy, "Type hierarchy TSV");
  predict->add_option("--corpus", o.paths.corpus, "POS-tagged corpus to type");
  predict->add_option("--mentions", o.mentions, "Mention TSV");
  predict->add_option("--gold", o.paths.gold, "Gold annotations");
  predict->add_flag("--gold-mentions", o.gold_mentions, "Use the gold entity spans");
  predict->add_option("--eta", o.eta, "Similarity threshold");
  predict->add_option("--brown", o.paths.brown, "Brown cluster TSV");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold annotations");
  add_common(evaluate_cmd, o);
  evaluate_cmd->add_option("--gold", o.paths.gold, "Gold annotations");
  evaluate_cmd->add_option("--predictions", o.predictions, "Predictions JSONL");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus, KB and gold labels");
  add_common(synth, o);
  synth->add_option("--out", o.synth_out, "Output directory (default <run-dir>/data)");
  synth->add_option("--sentences", o.synth.sentences, "Training sentences");
  synth->add_option("--test-sentences", o.synth.test_sentences, "Held-out sentences");
  synth->add_option("--relation-types", o.synth.relation_types, "Number of relation types");
  synth->add_option("--entity-types", o.synth.entity_types, "Number of entity types");
  synth->add_option("--noise-rate", o.synth.noise_rate, "Fraction of fact pairs with a second KB relation");
  synth->add_option("--kb-coverage", o.synth.kb_coverage, "Fraction of entities in the KB");
  synth->add_option("--shared-context-rate", o.synth.shared_context_rate,
                    "Chance that a context word comes from the relation-agnostic pool");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  add_common(pipeline, o);
  pipeline->add_option("--corpus", o.paths.corpus, "POS-tagged training corpus");
  add_kb(pipeline, o);
  pipeline->add_option("--test-corpus", o.paths.test_corpus, "Held-out corpus to type");
  pipeline->add_option("--gold", o.paths.gold, "Gold annotations for the held-out corpus");
  pipeline->add_flag("--gold-mentions", o.gold_mentions, "Type the gold entity spans");
  pipeline->add_option("--eta", o.eta, "Similarity threshold");
  pipeline->add_option("--brown", o.paths.brown, "Brown cluster TSV");
  pipeline->add_flag("--study", o.study, "Also run the entity-type feature study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*segment) return cmd_segment(o);
    if (*label) return cmd_label(o);
    if (*featurize) return cmd_featurize(o);
    if (*train_cmd) return cmd_train(o);
    if (*predict) return cmd_predict(o);
    if (*evaluate_cmd) return cmd_evaluate(o);
    if (*synth) return cmd_synth(o);
    if (*pipeline) return cmd_pipeline(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
