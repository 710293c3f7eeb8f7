#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "redsense/clustering.hpp"
#include "redsense/corpus.hpp"
#include "redsense/engagement.hpp"
#include "redsense/report.hpp"
#include "redsense/setdistance.hpp"

namespace redsense::config {

struct TopicSettings {
  int k_min = 3;
  int k_max = 8;
  std::optional<double> alpha;  // default 50 / k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t master_seed = 1;
  bool average_samples = false;
  std::size_t min_document_frequency = 2;
  std::size_t min_token_length = 3;
  std::string stopwords_path;  // empty: built-in list
  std::size_t top_terms = 10;
};

struct KeywordSettings {
  std::size_t max_ngram = 3;
  std::size_t top_n = 30;
  std::size_t m = 10;
  double dedup_threshold = 0.9;
};

struct ClusterSettings {
  bool enabled = true;
  std::size_t max_k = 25;
  clustering::DeltaMode delta_mode = clustering::DeltaMode::paper;
  bool iterate_to_convergence = false;
  setdistance::ChiNormalization chi_normalization = setdistance::ChiNormalization::pair_mean;
  std::uint64_t seed = 7;
};

struct EmbeddingSettings {
  std::string provider = "files";  // "files" | "synthetic"
  std::string words_path;
  std::string docs_path;
  std::uint64_t synthetic_seed = 7;
  std::size_t synthetic_dim = 32;
};

struct LlmSettings {
  std::string provider = "disabled";  // "disabled" | "mock" | "http"
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 4;
  int initial_backoff_ms = 500;
  std::size_t concurrency = 4;
  std::size_t context_chars = 12000;
  int timeout_seconds = 60;
  std::size_t max_posts_per_cluster = 20;
};

struct PipelineConfig {
  std::string posts_path;
  std::string comments_path;
  corpus::TimeWindow window{1, INT64_MAX};
  std::vector<std::int64_t> boundaries;
  std::string output_dir = "redsense-out";
  TopicSettings topics;
  KeywordSettings keywords;
  ClusterSettings clustering;
  EmbeddingSettings embeddings;
  engagement::ActiveMeasure active_measure = engagement::ActiveMeasure::unique_commenters;
  report::ShareMode share_mode = report::ShareMode::dominant_topic;
  LlmSettings llm;
  unsigned workers = 1;
  bool record_timings = false;
};

// Missing keys take the defaults above; unknown keys are rejected.
PipelineConfig from_json(const nlohmann::json& obj);
nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig load(const std::filesystem::path& path);

// Throws PreconditionError describing the first problem found: unreadable
// inputs, bad ranges, or a stage that cannot run with the given settings
// (e.g. clustering without embedding files).
void validate(const PipelineConfig& config);

}  // namespace redsense::config
