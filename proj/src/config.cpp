#include "redsense/config.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw PreconditionError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw PreconditionError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw PreconditionError(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

std::string chi_name(setdistance::ChiNormalization n) {
  return n == setdistance::ChiNormalization::pair_mean ? "pair_mean" : "per_cluster";
}

setdistance::ChiNormalization parse_chi(const std::string& name) {
  if (name == "pair_mean") return setdistance::ChiNormalization::pair_mean;
  if (name == "per_cluster") return setdistance::ChiNormalization::per_cluster;
  throw PreconditionError("config: unknown chi_normalization '" + name + "'");
}

}  // namespace

PipelineConfig from_json(const json& obj) {
  PipelineConfig c;
  reject_unknown(obj,
                 {"posts_path", "comments_path", "window", "boundaries", "output_dir", "topics", "keywords",
                  "clustering", "embeddings", "engagement", "report", "llm", "workers", "record_timings"},
                 "");
  read(obj, "posts_path", c.posts_path);
  read(obj, "comments_path", c.comments_path);
  read(obj, "boundaries", c.boundaries);
  read(obj, "output_dir", c.output_dir);
  read(obj, "workers", c.workers);
  read(obj, "record_timings", c.record_timings);
  if (obj.contains("window")) {
    const auto& w = obj.at("window");
    reject_unknown(w, {"start", "end"}, "window.");
    read(w, "start", c.window.start);
    read(w, "end", c.window.end);
  }
  if (obj.contains("topics")) {
    const auto& t = obj.at("topics");
    reject_unknown(t,
                   {"k_min", "k_max", "alpha", "beta", "iterations", "master_seed", "average_samples",
                    "min_document_frequency", "min_token_length", "stopwords_path", "top_terms"},
                   "topics.");
    read(t, "k_min", c.topics.k_min);
    read(t, "k_max", c.topics.k_max);
    if (t.contains("alpha") && !t.at("alpha").is_null()) c.topics.alpha = t.at("alpha").get<double>();
    read(t, "beta", c.topics.beta);
    read(t, "iterations", c.topics.iterations);
    read(t, "master_seed", c.topics.master_seed);
    read(t, "average_samples", c.topics.average_samples);
    read(t, "min_document_frequency", c.topics.min_document_frequency);
    read(t, "min_token_length", c.topics.min_token_length);
    read(t, "stopwords_path", c.topics.stopwords_path);
    read(t, "top_terms", c.topics.top_terms);
  }
  if (obj.contains("keywords")) {
    const auto& k = obj.at("keywords");
    reject_unknown(k, {"max_ngram", "top_n", "m", "dedup_threshold"}, "keywords.");
    read(k, "max_ngram", c.keywords.max_ngram);
    read(k, "top_n", c.keywords.top_n);
    read(k, "m", c.keywords.m);
    read(k, "dedup_threshold", c.keywords.dedup_threshold);
  }
  if (obj.contains("clustering")) {
    const auto& k = obj.at("clustering");
    reject_unknown(k, {"enabled", "max_k", "delta_mode", "iterate_to_convergence", "chi_normalization", "seed"},
                   "clustering.");
    read(k, "enabled", c.clustering.enabled);
    read(k, "max_k", c.clustering.max_k);
    std::string mode(clustering::mode_name(c.clustering.delta_mode));
    read(k, "delta_mode", mode);
    c.clustering.delta_mode = clustering::parse_mode(mode);
    read(k, "iterate_to_convergence", c.clustering.iterate_to_convergence);
    std::string chi = chi_name(c.clustering.chi_normalization);
    read(k, "chi_normalization", chi);
    c.clustering.chi_normalization = parse_chi(chi);
    read(k, "seed", c.clustering.seed);
  }
  if (obj.contains("embeddings")) {
    const auto& e = obj.at("embeddings");
    reject_unknown(e, {"provider", "words_path", "docs_path", "synthetic_seed", "synthetic_dim"}, "embeddings.");
    read(e, "provider", c.embeddings.provider);
    read(e, "words_path", c.embeddings.words_path);
    read(e, "docs_path", c.embeddings.docs_path);
    read(e, "synthetic_seed", c.embeddings.synthetic_seed);
    read(e, "synthetic_dim", c.embeddings.synthetic_dim);
  }
  if (obj.contains("engagement")) {
    const auto& e = obj.at("engagement");
    reject_unknown(e, {"active_measure"}, "engagement.");
    std::string measure(engagement::measure_name(c.active_measure));
    read(e, "active_measure", measure);
    c.active_measure = engagement::parse_measure(measure);
  }
  if (obj.contains("report")) {
    const auto& r = obj.at("report");
    reject_unknown(r, {"share_mode"}, "report.");
    std::string mode(report::share_mode_name(c.share_mode));
    read(r, "share_mode", mode);
    c.share_mode = report::parse_share_mode(mode);
  }
  if (obj.contains("llm")) {
    const auto& l = obj.at("llm");
    reject_unknown(l,
                   {"provider", "base_url", "model", "api_key_env", "max_attempts", "initial_backoff_ms",
                    "concurrency", "context_chars", "timeout_seconds", "max_posts_per_cluster"},
                   "llm.");
    read(l, "provider", c.llm.provider);
    read(l, "base_url", c.llm.base_url);
    read(l, "model", c.llm.model);
    read(l, "api_key_env", c.llm.api_key_env);
    read(l, "max_attempts", c.llm.max_attempts);
    read(l, "initial_backoff_ms", c.llm.initial_backoff_ms);
    read(l, "concurrency", c.llm.concurrency);
    read(l, "context_chars", c.llm.context_chars);
    read(l, "timeout_seconds", c.llm.timeout_seconds);
    read(l, "max_posts_per_cluster", c.llm.max_posts_per_cluster);
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  return json{
      {"posts_path", c.posts_path},
      {"comments_path", c.comments_path},
      {"window", {{"start", c.window.start}, {"end", c.window.end}}},
      {"boundaries", c.boundaries},
      {"output_dir", c.output_dir},
      {"topics",
       {{"k_min", c.topics.k_min},
        {"k_max", c.topics.k_max},
        {"alpha", c.topics.alpha ? json(*c.topics.alpha) : json(nullptr)},
        {"beta", c.topics.beta},
        {"iterations", c.topics.iterations},
        {"master_seed", c.topics.master_seed},
        {"average_samples", c.topics.average_samples},
        {"min_document_frequency", c.topics.min_document_frequency},
        {"min_token_length", c.topics.min_token_length},
        {"stopwords_path", c.topics.stopwords_path},
        {"top_terms", c.topics.top_terms}}},
      {"keywords",
       {{"max_ngram", c.keywords.max_ngram},
        {"top_n", c.keywords.top_n},
        {"m", c.keywords.m},
        {"dedup_threshold", c.keywords.dedup_threshold}}},
      {"clustering",
       {{"enabled", c.clustering.enabled},
        {"max_k", c.clustering.max_k},
        {"delta_mode", clustering::mode_name(c.clustering.delta_mode)},
        {"iterate_to_convergence", c.clustering.iterate_to_convergence},
        {"chi_normalization", chi_name(c.clustering.chi_normalization)},
        {"seed", c.clustering.seed}}},
      {"embeddings",
       {{"provider", c.embeddings.provider},
        {"words_path", c.embeddings.words_path},
        {"docs_path", c.embeddings.docs_path},
        {"synthetic_seed", c.embeddings.synthetic_seed},
        {"synthetic_dim", c.embeddings.synthetic_dim}}},
      {"engagement", {{"active_measure", engagement::measure_name(c.active_measure)}}},
      {"report", {{"share_mode", report::share_mode_name(c.share_mode)}}},
      {"llm",
       {{"provider", c.llm.provider},
        {"base_url", c.llm.base_url},
        {"model", c.llm.model},
        {"api_key_env", c.llm.api_key_env},
        {"max_attempts", c.llm.max_attempts},
        {"initial_backoff_ms", c.llm.initial_backoff_ms},
        {"concurrency", c.llm.concurrency},
        {"context_chars", c.llm.context_chars},
        {"timeout_seconds", c.llm.timeout_seconds},
        {"max_posts_per_cluster", c.llm.max_posts_per_cluster}}},
      {"workers", c.workers},
      {"record_timings", c.record_timings}};
}

PipelineConfig load(const std::filesystem::path& path) {
  auto obj = json::parse(io::read_file(path), nullptr, false);
  if (obj.is_discarded()) throw PreconditionError("config: " + path.string() + " is not valid JSON");
  return from_json(obj);
}

void validate(const PipelineConfig& c) {
  auto readable = [](const std::string& path, const std::string& what) {
    if (path.empty()) throw PreconditionError("config: " + what + " is not set");
    if (!std::filesystem::is_regular_file(path)) throw PreconditionError("config: " + what + " '" + path + "' does not exist");
  };
  readable(c.posts_path, "posts_path");
  readable(c.comments_path, "comments_path");
  if (c.window.start >= c.window.end) throw PreconditionError("config: window.start must precede window.end");
  for (std::size_t i = 1; i < c.boundaries.size(); ++i) {
    if (c.boundaries[i] <= c.boundaries[i - 1]) throw PreconditionError("config: boundaries must be strictly increasing");
  }
  if (c.output_dir.empty()) throw PreconditionError("config: output_dir is not set");
  if (c.topics.k_min < 3) {
    throw PreconditionError("config: topics.k_min must be at least 3 (the representative threshold needs k >= 3)");
  }
  if (c.topics.k_max <= c.topics.k_min) throw PreconditionError("config: topics.k_max must exceed topics.k_min");
  if (c.topics.iterations < 1) throw PreconditionError("config: topics.iterations must be positive");
  if (c.topics.alpha && !(*c.topics.alpha > 0)) throw PreconditionError("config: topics.alpha must be positive");
  if (!(c.topics.beta > 0)) throw PreconditionError("config: topics.beta must be positive");
  if (!c.topics.stopwords_path.empty()) readable(c.topics.stopwords_path, "topics.stopwords_path");
  if (c.keywords.max_ngram < 1 || c.keywords.max_ngram > 3) throw PreconditionError("config: keywords.max_ngram must lie in [1, 3]");
  if (c.keywords.m < 1 || c.keywords.top_n < 1) throw PreconditionError("config: keywords.m and keywords.top_n must be positive");
  if (c.clustering.enabled) {
    if (c.clustering.max_k < 2) throw PreconditionError("config: clustering.max_k must be at least 2");
    if (c.embeddings.provider == "files") {
      readable(c.embeddings.words_path, "embeddings.words_path");
      readable(c.embeddings.docs_path, "embeddings.docs_path");
    } else if (c.embeddings.provider == "synthetic") {
      if (c.embeddings.synthetic_dim < 2) throw PreconditionError("config: embeddings.synthetic_dim must be at least 2");
    } else {
      throw PreconditionError("config: unknown embeddings.provider '" + c.embeddings.provider + "'");
    }
  }
  if (c.llm.provider != "disabled" && c.llm.provider != "mock" && c.llm.provider != "http") {
    throw PreconditionError("config: unknown llm.provider '" + c.llm.provider + "'");
  }
  if (c.llm.provider == "http" && (c.llm.base_url.empty() || c.llm.model.empty())) {
    throw PreconditionError("config: llm.base_url and llm.model are required for the http provider");
  }
  if (c.llm.max_attempts < 1) throw PreconditionError("config: llm.max_attempts must be positive");
}

}  // namespace redsense::config
