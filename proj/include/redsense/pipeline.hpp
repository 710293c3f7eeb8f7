#pragma once

// Stage orchestration over an output directory. Stages exchange data only
// through the files they write, so any stage can be rerun on its own once
// its prerequisites have succeeded.
//
// Layout of the output directory:
//   config.json                   resolved configuration
//   ingest_stats.json             per-file accounting
//   timelines.json                label, window and counts per sub-corpus
//   timelines/<label>/posts.jsonl, comments.jsonl
//   timelines/<label>/sweep.csv   k,w_k,wall_seconds
//   timelines/<label>/model/      model.json, theta.csv, phi.csv
//   timelines/<label>/topics.json top terms and representatives per topic
//   clusters.json, keywords.csv
//   engagement.csv, scatter.csv, topic_engagement.csv
//   summaries.jsonl
//   report.md, topics.csv
//   plots/fig1_scatter.csv, plots/fig2_topic_share.csv, plots/fig3_topic_engagement.csv
//   manifest.json                 stage status and sha256 of every artifact

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "redsense/chat_client.hpp"
#include "redsense/config.hpp"

namespace redsense::pipeline {

enum class Stage { ingest, sweep, topics, cluster, engage, summarize, report };

inline constexpr std::array<Stage, 7> kAllStages{Stage::ingest,  Stage::sweep,     Stage::topics, Stage::cluster,
                                                 Stage::engage, Stage::summarize, Stage::report};

std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);

enum class Status { ok, skipped, failed };

struct StageResult {
  Stage stage = Stage::ingest;
  Status status = Status::ok;
  std::string error;
};

// Validates the configuration, runs one stage and rewrites the manifest.
// Stage errors are caught and reported through the result (and the
// manifest); only an invalid configuration throws.
StageResult run_stage(const config::PipelineConfig& config, Stage stage);

// Every stage in order, stopping at the first failure. Returns 0 on success,
// 1 when a stage failed.
int run_pipeline(const config::PipelineConfig& config);

// Plot tables under <out_dir>/plots. Throws PreconditionError
// ("stage not run: ...") unless topics and engage have succeeded.
void emit_plot_data(const std::filesystem::path& out_dir);

nlohmann::json read_manifest(const std::filesystem::path& out_dir);

// nullptr when the provider is "disabled".
std::unique_ptr<insight::ChatClient> make_chat_client(const config::LlmSettings& llm);

}  // namespace redsense::pipeline
