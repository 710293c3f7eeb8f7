// redsense: command-line driver for the analysis pipeline.
//
//   redsense [options] <ingest|sweep|topics|cluster|engage|summarize|report|all>
//
// Options override the values of --config; the LLM API key is only ever read
// from the environment variable named by --llm-key-env.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>

#include "redsense/config.hpp"
#include "redsense/errors.hpp"
#include "redsense/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> posts, comments, out, stopwords;
  std::optional<std::int64_t> start, end;
  std::vector<std::int64_t> boundaries;
  std::optional<int> k_min, k_max, iterations;
  std::optional<double> alpha, beta;
  std::optional<std::uint64_t> seed, cluster_seed;
  std::optional<std::size_t> m, max_k, max_ngram, top_n;
  std::optional<std::string> delta_mode, chi_normalization, active_measure, share_mode;
  bool no_clustering = false;
  bool iterate = false;
  std::optional<std::string> embeddings, words, docs;
  std::optional<std::size_t> synthetic_dim;
  std::optional<std::string> llm, llm_base_url, llm_model, llm_key_env;
  std::optional<std::size_t> llm_concurrency;
  std::optional<unsigned> workers;
  bool record_timings = false;
};

template <typename T>
void put(nlohmann::json& obj, const char* key, const std::optional<T>& value) {
  if (value) obj[key] = *value;
}

nlohmann::json merge(const Overrides& o) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!o.config_path.empty()) cfg = redsense::config::to_json(redsense::config::load(o.config_path));
  put(cfg, "posts_path", o.posts);
  put(cfg, "comments_path", o.comments);
  put(cfg, "output_dir", o.out);
  put(cfg, "workers", o.workers);
  if (!o.boundaries.empty()) cfg["boundaries"] = o.boundaries;
  if (o.record_timings) cfg["record_timings"] = true;
  auto& window = cfg["window"];
  if (window.is_null()) window = nlohmann::json::object();
  put(window, "start", o.start);
  put(window, "end", o.end);
  if (window.empty()) cfg.erase("window");

  nlohmann::json topics = cfg.value("topics", nlohmann::json::object());
  put(topics, "k_min", o.k_min);
  put(topics, "k_max", o.k_max);
  put(topics, "alpha", o.alpha);
  put(topics, "beta", o.beta);
  put(topics, "iterations", o.iterations);
  put(topics, "master_seed", o.seed);
  put(topics, "stopwords_path", o.stopwords);
  cfg["topics"] = topics;

  nlohmann::json kw = cfg.value("keywords", nlohmann::json::object());
  put(kw, "m", o.m);
  put(kw, "max_ngram", o.max_ngram);
  put(kw, "top_n", o.top_n);
  cfg["keywords"] = kw;

  nlohmann::json cl = cfg.value("clustering", nlohmann::json::object());
  put(cl, "max_k", o.max_k);
  put(cl, "delta_mode", o.delta_mode);
  put(cl, "chi_normalization", o.chi_normalization);
  put(cl, "seed", o.cluster_seed);
  if (o.no_clustering) cl["enabled"] = false;
  if (o.iterate) cl["iterate_to_convergence"] = true;
  cfg["clustering"] = cl;

  nlohmann::json emb = cfg.value("embeddings", nlohmann::json::object());
  put(emb, "provider", o.embeddings);
  put(emb, "words_path", o.words);
  put(emb, "docs_path", o.docs);
  put(emb, "synthetic_dim", o.synthetic_dim);
  cfg["embeddings"] = emb;

  if (o.active_measure) cfg["engagement"] = {{"active_measure", *o.active_measure}};
  if (o.share_mode) cfg["report"] = {{"share_mode", *o.share_mode}};

  nlohmann::json llm = cfg.value("llm", nlohmann::json::object());
  put(llm, "provider", o.llm);
  put(llm, "base_url", o.llm_base_url);
  put(llm, "model", o.llm_model);
  put(llm, "api_key_env", o.llm_key_env);
  put(llm, "concurrency", o.llm_concurrency);
  cfg["llm"] = llm;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic, keyword-cluster and engagement analysis of Reddit dumps"};
  app.require_subcommand(1);
  Overrides o;
  bool verbose = false;
  app.add_option("-c,--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--posts", o.posts, "Posts JSONL dump");
  app.add_option("--comments", o.comments, "Comments JSONL dump");
  app.add_option("-o,--out", o.out, "Output directory");
  app.add_option("--start", o.start, "Window start (epoch seconds, inclusive)");
  app.add_option("--end", o.end, "Window end (epoch seconds, exclusive)");
  app.add_option("--boundary", o.boundaries, "Timeline boundary (repeatable)");
  app.add_option("--k-min", o.k_min, "Smallest topic count swept");
  app.add_option("--k-max", o.k_max, "Largest topic count swept");
  app.add_option("--alpha", o.alpha, "Symmetric document-topic prior (default 50/k)");
  app.add_option("--beta", o.beta, "Symmetric topic-word prior");
  app.add_option("--iterations", o.iterations, "Gibbs sweeps per fit");
  app.add_option("--seed", o.seed, "Master seed for the topic sweep");
  app.add_option("--stopwords", o.stopwords, "Stopword list, one per line");
  app.add_option("--m", o.m, "Keywords kept per cluster");
  app.add_option("--max-ngram", o.max_ngram, "Longest keyword phrase");
  app.add_option("--top-n", o.top_n, "Keywords extracted per cluster before TF-IDF");
  app.add_option("--max-k", o.max_k, "Cluster count limit");
  app.add_option("--delta-mode", o.delta_mode, "Next-center rule: paper or minmax");
  app.add_option("--chi-normalization", o.chi_normalization, "pair_mean or per_cluster");
  app.add_option("--cluster-seed", o.cluster_seed, "Seed for the first cluster center");
  app.add_flag("--no-clustering", o.no_clustering, "Skip keyword clustering");
  app.add_flag("--iterate", o.iterate, "Refine assignments to convergence after each new center");
  app.add_option("--embeddings", o.embeddings, "files or synthetic");
  app.add_option("--words", o.words, "Word embeddings JSONL");
  app.add_option("--docs", o.docs, "Document embeddings JSONL");
  app.add_option("--synthetic-dim", o.synthetic_dim, "Dimension of synthetic embeddings");
  app.add_option("--active-measure", o.active_measure, "unique_commenters or comment_count");
  app.add_option("--share-mode", o.share_mode, "dominant_topic or representative");
  app.add_option("--llm", o.llm, "disabled, mock or http");
  app.add_option("--llm-base-url", o.llm_base_url, "Chat-completions base URL");
  app.add_option("--llm-model", o.llm_model, "Chat model id");
  app.add_option("--llm-key-env", o.llm_key_env, "Environment variable holding the API key");
  app.add_option("--llm-concurrency", o.llm_concurrency, "Summaries in flight");
  app.add_option("-j,--workers", o.workers, "Worker threads");
  app.add_flag("--record-timings", o.record_timings, "Write fit wall times into sweep.csv");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::vector<std::string> names{"all"};
  for (auto s : redsense::pipeline::kAllStages) names.emplace_back(redsense::pipeline::stage_name(s));
  for (const auto& name : names) app.add_subcommand(name, name == "all" ? "Run every stage" : "Run the " + name + " stage");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_default_logger(spdlog::stderr_color_mt("redsense"));

  redsense::config::PipelineConfig cfg;
  try {
    cfg = redsense::config::from_json(merge(o));
    redsense::config::validate(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "redsense: %s\n", e.what());
    return 2;
  }
  const auto name = app.get_subcommands().front()->get_name();
  try {
    if (name == "all") return redsense::pipeline::run_pipeline(cfg);
    const auto result = redsense::pipeline::run_stage(cfg, redsense::pipeline::parse_stage(name));
    return result.status == redsense::pipeline::Status::failed ? 1 : 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "redsense: %s\n", e.what());
    return 1;
  }
}
