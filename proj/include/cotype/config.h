#ifndef COTYPE_CONFIG_H_
#define COTYPE_CONFIG_H_

#include <cstdint>
#include <string>

#include "cotype/features.h"
#include "cotype/inference.h"
#include "cotype/labeler.h"
#include "cotype/segmenter.h"
#include "cotype/trainer.h"
#include "json.hpp"

namespace cotype {

inline constexpr const char* kVersion = "0.1.0";

struct PathConfig {
  std::string corpus;
  std::string kb_entities;
  std::string kb_relations;
  std::string hierarchy;
  std::string test_corpus;
  std::string gold;
  std::string brown;
  std::string run_dir;
};

struct RunConfig {
  uint64_t seed = 1;
  int threads = 1;
  SegmenterConfig segmenter;
  LabelerConfig labeler;
  FeatureConfig features;
  TrainConfig train;
  InferenceConfig inference;
  PathConfig paths;
};

// Copies the global seed and thread count into every module section.
void propagate_globals(RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);

// Hash of the tunables only; paths do not take part.
std::string config_hash(const RunConfig& config);

}  // namespace cotype

#endif  // COTYPE_CONFIG_H_
