#include "cotype/config.h"

#include <set>

#include "cotype/util.h"

namespace cotype {

using nlohmann::json;

void propagate_globals(RunConfig& c) {
  c.segmenter.seed = mix_seed(c.seed, 1);
  c.labeler.seed = mix_seed(c.seed, 2);
  c.train.seed = mix_seed(c.seed, 3);
  c.segmenter.threads = c.threads;
  c.train.threads = c.threads;
}

namespace {

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, const char*>> names;
};

const EnumNames<LabelLoss> kLabelLoss{{{LabelLoss::kPartial, "partial"}, {LabelLoss::kPerCandidate, "per_candidate"}}};
const EnumNames<Schedule> kSchedule{{{Schedule::kJoint, "joint"}, {Schedule::kTwoStage, "two_stage"}}};
const EnumNames<ObjectiveMode> kObjectiveMode{{{ObjectiveMode::kFull, "full"}, {ObjectiveMode::kSampled, "sampled"}}};

// Walks every field of a section with a visitor that either writes to or
// reads from a JSON object.
class Writer {
 public:
  json out = json::object();
  template <typename T>
  void operator()(const char* key, T& value) {
    out[key] = value;
  }
  void operator()(const char* key, std::optional<double>& value) {
    out[key] = value ? json(*value) : json(nullptr);
  }
  template <typename E>
  void operator()(const char* key, E& value, const EnumNames<E>& names) {
    for (const auto& [v, n] : names.names) {
      if (v == value) out[key] = n;
    }
  }
};

class Reader {
 public:
  Reader(const json& in, std::string where) : in_(in), where_(std::move(where)) {
    if (!in_.is_object()) throw InputError(where_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (auto it = in_.begin(); it != in_.end(); ++it) {
      if (!seen_.count(it.key())) throw InputError(where_ + ": unknown key '" + it.key() + "'");
    }
  }
  template <typename T>
  void operator()(const char* key, T& value) {
    seen_.insert(key);
    auto it = in_.find(key);
    if (it == in_.end()) return;
    try {
      value = it->template get<T>();
    } catch (const json::exception&) {
      throw InputError(where_ + "." + key + ": wrong value type");
    }
  }
  void operator()(const char* key, std::optional<double>& value) {
    seen_.insert(key);
    auto it = in_.find(key);
    if (it == in_.end()) return;
    if (it->is_null()) {
      value.reset();
    } else if (it->is_number()) {
      value = it->get<double>();
    } else {
      throw InputError(where_ + "." + key + ": expected a number or null");
    }
  }
  template <typename E>
  void operator()(const char* key, E& value, const EnumNames<E>& names) {
    seen_.insert(key);
    auto it = in_.find(key);
    if (it == in_.end()) return;
    if (it->is_string()) {
      for (const auto& [v, n] : names.names) {
        if (*it == n) {
          value = v;
          return;
        }
      }
    }
    throw InputError(where_ + "." + key + ": unknown value " + it->dump());
  }

 private:
  const json& in_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename V>
void visit(SegmenterConfig& c, V& v) {
  v("max_len", c.max_len);
  v("min_support", c.min_support);
  v("negative_ratio", c.negative_ratio);
  v("seg_tol", c.seg_tol);
  v("max_rounds", c.max_rounds);
  v("q_min", c.q_min);
  v("epsilon_unseen", c.epsilon_unseen);
  v("num_trees", c.num_trees);
  v("max_depth", c.max_depth);
  v("min_examples", c.min_examples);
}

template <typename V>
void visit(LabelerConfig& c, V& v) {
  v("none_ratio", c.none_ratio);
}

template <typename V>
void visit(FeatureConfig& c, V& v) {
  v("min_count", c.min_count);
  v("window", c.window);
}

template <typename V>
void visit(TrainConfig& c, V& v) {
  v("dim", c.dim);
  v("negatives", c.negatives);
  v("lambda", c.lambda);
  v("alpha", c.alpha);
  v("margin", c.margin);
  v("max_iters", c.max_iters);
  v("iters_per_edge", c.iters_per_edge);
  v("convergence_tol", c.convergence_tol);
  v("objective_check_every", c.objective_check_every);
  v("objective_mode", c.objective_mode, kObjectiveMode);
  v("linear_decay", c.linear_decay);
  v("label_loss", c.label_loss, kLabelLoss);
  v("schedule", c.schedule, kSchedule);
}

template <typename V>
void visit(InferenceConfig& c, V& v) {
  v("eta", c.eta);
  v("eta_relation", c.eta_relation);
  v("eta_entity", c.eta_entity);
  v("include_none_relation", c.include_none_relation);
}

template <typename V>
void visit(PathConfig& c, V& v) {
  v("corpus", c.corpus);
  v("kb_entities", c.kb_entities);
  v("kb_relations", c.kb_relations);
  v("hierarchy", c.hierarchy);
  v("test_corpus", c.test_corpus);
  v("gold", c.gold);
  v("brown", c.brown);
  v("run_dir", c.run_dir);
}

template <typename S>
json write_section(const S& section) {
  S copy = section;
  Writer w;
  visit(copy, w);
  return w.out;
}

template <typename S>
void read_section(const json& j, const char* name, S& section, const std::string& source) {
  auto it = j.find(name);
  if (it == j.end()) return;
  Reader r(*it, source + ": " + name);
  visit(section, r);
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["segmenter"] = write_section(c.segmenter);
  j["labeler"] = write_section(c.labeler);
  j["features"] = write_section(c.features);
  j["train"] = write_section(c.train);
  j["inference"] = write_section(c.inference);
  j["paths"] = write_section(c.paths);
  return j;
}

RunConfig config_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) throw InputError(source + ": config must be a JSON object");
  static const std::set<std::string> kKeys = {"seed",     "threads", "segmenter", "labeler",
                                              "features", "train",   "inference", "paths"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKeys.count(it.key())) throw InputError(source + ": unknown key '" + it.key() + "'");
  }
  RunConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception&) {
    throw InputError(source + ": seed and threads must be integers");
  }
  read_section(j, "segmenter", c.segmenter, source);
  read_section(j, "labeler", c.labeler, source);
  read_section(j, "features", c.features, source);
  read_section(j, "train", c.train, source);
  read_section(j, "inference", c.inference, source);
  read_section(j, "paths", c.paths, source);
  c.features.brown_path = c.paths.brown;
  propagate_globals(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return config_from_json(j, path);
}

std::string dump_config(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) {
  json j = config_to_json(config);
  j.erase("paths");
  return hex64(fnv1a64(j.dump()));
}

}  // namespace cotype
