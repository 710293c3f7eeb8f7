#include "redsense/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "redsense/clustering.hpp"
#include "redsense/corpus.hpp"
#include "redsense/embeddings.hpp"
#include "redsense/engagement.hpp"
#include "redsense/errors.hpp"
#include "redsense/insight.hpp"
#include "redsense/io.hpp"
#include "redsense/keywords.hpp"
#include "redsense/report.hpp"
#include "redsense/topicmodel.hpp"

namespace redsense::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::sweep: return "sweep";
    case Stage::topics: return "topics";
    case Stage::cluster: return "cluster";
    case Stage::engage: return "engage";
    case Stage::summarize: return "summarize";
    case Stage::report: return "report";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (stage_name(s) == name) return s;
  }
  throw PreconditionError("unknown stage '" + std::string(name) + "'");
}

namespace {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::skipped: return "skipped";
    case Status::failed: return "failed";
  }
  return "failed";
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(workers, n);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json parse_json_file(const fs::path& path) {
  auto obj = json::parse(io::read_file(path), nullptr, false);
  if (obj.is_discarded()) throw FormatError(path.string() + " is not valid JSON");
  return obj;
}

void write_json(const fs::path& path, const json& obj) { io::write_file(path, obj.dump(2) + "\n"); }

// Data rows of a CSV file with a header line.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (io::trim(line).empty()) continue;
    rows.push_back(io::parse_csv_line(line));
  }
  return rows;
}

struct TimelineInfo {
  std::string label;
  corpus::TimeWindow window;
  std::size_t posts = 0;
  std::size_t comments = 0;
  std::size_t users = 0;
};

fs::path timeline_dir(const fs::path& out, const std::string& label) { return out / "timelines" / label; }

std::vector<TimelineInfo> read_timelines(const fs::path& out) {
  if (!fs::exists(out / "timelines.json")) throw PreconditionError("stage not run: ingest");
  std::vector<TimelineInfo> infos;
  for (const auto& t : parse_json_file(out / "timelines.json")) {
    TimelineInfo info;
    info.label = t.at("label").get<std::string>();
    info.window = {t.at("start").get<std::int64_t>(), t.at("end").get<std::int64_t>()};
    info.posts = t.at("posts").get<std::size_t>();
    info.comments = t.at("comments").get<std::size_t>();
    info.users = t.at("users").get<std::size_t>();
    infos.push_back(std::move(info));
  }
  return infos;
}

corpus::Corpus load_timeline(const fs::path& out, const TimelineInfo& info) {
  if (info.posts == 0) return {};
  const auto dir = timeline_dir(out, info.label);
  return corpus::ingest_dump(dir / "posts.jsonl", dir / "comments.jsonl", info.window).corpus;
}

struct Context {
  const config::PipelineConfig& cfg;
  fs::path out;
  text::StopwordSet stopwords;
  bool custom_stopwords = false;

  explicit Context(const config::PipelineConfig& c) : cfg(c), out(c.output_dir) {
    if (!c.topics.stopwords_path.empty()) {
      stopwords = text::load_stopwords(c.topics.stopwords_path);
      custom_stopwords = true;
    }
  }

  const text::StopwordSet* stopword_ptr() const { return custom_stopwords ? &stopwords : nullptr; }

  text::TokenizerOptions tokenizer() const { return {cfg.topics.min_token_length, stopword_ptr()}; }

  topicmodel::DocumentOptions document_options() const { return {tokenizer(), cfg.topics.min_document_frequency}; }
};

void require(const json& stages, Stage stage, bool allow_skipped = false) {
  const auto name = std::string(stage_name(stage));
  if (stages.contains(name)) {
    const auto status = stages.at(name).at("status").get<std::string>();
    if (status == "ok" || (allow_skipped && status == "skipped")) return;
  }
  throw PreconditionError("stage not run: " + name);
}

std::string stage_status(const json& stages, Stage stage) {
  const auto name = std::string(stage_name(stage));
  return stages.contains(name) ? stages.at(name).at("status").get<std::string>() : "missing";
}

void write_manifest(const fs::path& out, const json& stages) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), out).generic_string();
    if (rel == "manifest.json" || rel.ends_with(".tmp")) continue;
    paths.push_back(std::move(rel));
  }
  std::sort(paths.begin(), paths.end());
  json artifacts = json::array();
  for (const auto& rel : paths) {
    artifacts.push_back(
        {{"path", rel}, {"sha256", io::sha256_file(out / rel)}, {"bytes", fs::file_size(out / rel)}});
  }
  write_json(out / "manifest.json", json{{"stages", stages}, {"artifacts", artifacts}});
}

Status stage_ingest(Context& ctx, const json&) {
  const auto& cfg = ctx.cfg;
  auto result = corpus::ingest_dump(cfg.posts_path, cfg.comments_path, cfg.window);
  auto parts = corpus::split_by_window(result.corpus, cfg.boundaries);
  fs::remove_all(ctx.out / "timelines");
  json timelines = json::array();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto label = "t" + std::to_string(i);
    const auto dir = timeline_dir(ctx.out, label);
    corpus::write_jsonl(parts[i], dir / "posts.jsonl", dir / "comments.jsonl");
    timelines.push_back({{"label", label},
                         {"start", parts[i].window().start},
                         {"end", parts[i].window().end},
                         {"posts", parts[i].posts().size()},
                         {"comments", parts[i].comments().size()},
                         {"users", corpus::unique_users(parts[i])}});
  }
  auto stats = corpus::to_json(result.stats);
  stats["corpus"] = {{"posts", result.corpus.posts().size()},
                     {"comments", result.corpus.comments().size()},
                     {"users", corpus::unique_users(result.corpus)}};
  write_json(ctx.out / "ingest_stats.json", stats);
  write_json(ctx.out / "timelines.json", timelines);
  spdlog::info("ingest: {} posts, {} comments in {} timeline(s)", result.corpus.posts().size(),
               result.corpus.comments().size(), parts.size());
  return Status::ok;
}

Status stage_sweep(Context& ctx, const json& stages) {
  require(stages, Stage::ingest);
  const auto& t = ctx.cfg.topics;
  for (const auto& info : read_timelines(ctx.out)) {
    const auto docs = topicmodel::tokenize_posts(load_timeline(ctx.out, info), ctx.document_options());
    topicmodel::SweepConfig sweep{t.alpha, t.beta, t.iterations, t.master_seed, t.average_samples, ctx.cfg.workers};
    topicmodel::SweepResult result;
    try {
      result = topicmodel::select_topic_count(docs, t.k_min, t.k_max, sweep);
    } catch (const Error& e) {
      throw Error("timeline " + info.label + ": " + e.what());
    }
    std::string csv = "k,w_k,wall_seconds\n";
    for (const auto& e : result.sweep) {
      csv += io::csv_row({std::to_string(e.k), std::to_string(e.w_k),
                          ctx.cfg.record_timings ? io::format_double(e.wall_seconds) : std::string()});
    }
    const auto dir = timeline_dir(ctx.out, info.label);
    io::write_file(dir / "sweep.csv", csv);
    topicmodel::write_model(result.best, dir / "model");
    spdlog::info("sweep {}: k* = {}", info.label, result.k_star);
  }
  return Status::ok;
}

Status stage_topics(Context& ctx, const json& stages) {
  require(stages, Stage::sweep);
  for (const auto& info : read_timelines(ctx.out)) {
    const auto dir = timeline_dir(ctx.out, info.label);
    const auto model = topicmodel::read_model(dir / "model");
    json topics = json::array();
    for (int k = 0; k < model.k; ++k) {
      topics.push_back({{"topic", k},
                        {"top_terms", topicmodel::top_terms(model, k, ctx.cfg.topics.top_terms)},
                        {"representatives", topicmodel::representative_posts(model, k)}});
    }
    write_json(dir / "topics.json", {{"k", model.k},
                                     {"tau", topicmodel::rep_threshold(model.k)},
                                     {"w_k", topicmodel::count_nonpositive_skew(model).w_k},
                                     {"topics", topics}});
  }
  return Status::ok;
}

json read_topics(const fs::path& out, const std::string& label) {
  const auto path = timeline_dir(out, label) / "topics.json";
  if (!fs::exists(path)) throw PreconditionError("stage not run: topics");
  return parse_json_file(path);
}

Status stage_cluster(Context& ctx, const json& stages) {
  require(stages, Stage::topics);
  const auto& cfg = ctx.cfg;
  if (!cfg.clustering.enabled) {
    fs::remove(ctx.out / "clusters.json");
    fs::remove(ctx.out / "keywords.csv");
    return Status::skipped;
  }
  clustering::ClusterConfig cc;
  cc.max_k = cfg.clustering.max_k;
  cc.mode = cfg.clustering.delta_mode;
  cc.iterate_to_convergence = cfg.clustering.iterate_to_convergence;
  cc.chi_normalization = cfg.clustering.chi_normalization;
  cc.keywords.extract.max_ngram = cfg.keywords.max_ngram;
  cc.keywords.extract.top_n = cfg.keywords.top_n;
  cc.keywords.extract.dedup_threshold = cfg.keywords.dedup_threshold;
  cc.keywords.extract.stopwords = ctx.stopword_ptr();
  cc.keywords.m = cfg.keywords.m;

  std::optional<embeddings::EmbeddingStore> file_store;
  if (cfg.embeddings.provider == "files") {
    file_store = embeddings::load_store(cfg.embeddings.words_path, cfg.embeddings.docs_path);
  }

  json by_timeline = json::object();
  std::vector<keywords::KeywordSet> all_sets;
  const auto infos = read_timelines(ctx.out);
  for (std::size_t ti = 0; ti < infos.size(); ++ti) {
    const auto& info = infos[ti];
    const auto corpus = load_timeline(ctx.out, info);
    const auto topics = read_topics(ctx.out, info.label);

    embeddings::EmbeddingStore synthetic;
    if (!file_store) {
      synthetic.words = embeddings::EmbeddingSpace::synthetic(cfg.embeddings.synthetic_seed, cfg.embeddings.synthetic_dim);
      std::vector<std::pair<std::string, std::string>> id_text;
      for (const auto& p : corpus.posts()) id_text.emplace_back(p.id, corpus::post_text(p));
      synthetic.docs = embeddings::mean_word_documents(synthetic.words, id_text, ctx.tokenizer());
    }
    const auto& store = file_store ? *file_store : synthetic;

    const auto& topic_list = topics.at("topics");
    std::vector<json> results(topic_list.size());
    std::vector<std::vector<keywords::KeywordSet>> sets(topic_list.size());
    parallel_for(topic_list.size(), cfg.workers, [&](std::size_t i) {
      const int topic = topic_list[i].at("topic").get<int>();
      const auto seed = topicmodel::seed_for_k(cfg.clustering.seed + ti, topic);
      std::vector<clustering::ClusterDoc> docs;
      for (const auto& id : topic_list[i].at("representatives")) {
        const auto* post = corpus.find_post(id.get<std::string>());
        if (!post) throw FormatError("representative " + id.get<std::string>() + " is not in timeline " + info.label);
        docs.push_back({post->id, corpus::post_text(*post)});
      }
      json entry{{"topic", topic}};
      if (docs.empty()) {
        entry["clustering"] = {{"seed", seed},
                               {"k", 0},
                               {"assignments", json::object()},
                               {"chi_trace", json::array()},
                               {"clusters", json::array()},
                               {"skipped", json::array()},
                               {"warnings", {"no representative posts"}}};
      } else {
        auto result = clustering::incremental_cluster(docs, store, seed, cc);
        entry["clustering"] = clustering::to_json(result);
        for (auto& set : result.keywords) {
          set.set_id = info.label + "/topic" + std::to_string(topic) + "/" + set.set_id;
          sets[i].push_back(std::move(set));
        }
      }
      results[i] = std::move(entry);
    });
    by_timeline[info.label] = results;
    for (auto& s : sets) all_sets.insert(all_sets.end(), s.begin(), s.end());
    spdlog::info("cluster {}: {} topic(s) clustered", info.label, results.size());
  }
  json settings{{"max_k", cfg.clustering.max_k},
                {"delta_mode", clustering::mode_name(cfg.clustering.delta_mode)},
                {"iterate_to_convergence", cfg.clustering.iterate_to_convergence},
                {"chi_normalization", config::to_json(cfg).at("clustering").at("chi_normalization")},
                {"m", cfg.keywords.m},
                {"max_ngram", cfg.keywords.max_ngram},
                {"top_n", cfg.keywords.top_n},
                {"embeddings", cfg.embeddings.provider}};
  write_json(ctx.out / "clusters.json", {{"config", settings}, {"timelines", by_timeline}});
  io::write_file(ctx.out / "keywords.csv", keywords::keyword_csv(all_sets));
  return Status::ok;
}

Status stage_engage(Context& ctx, const json& stages) {
  require(stages, Stage::topics);
  std::string records_csv = "timeline,post_id,active,passive,total,comments\n";
  std::string topic_csv = "topic,timeline,avg_active,avg_passive\n";
  std::vector<engagement::ScatterRow> scatter;
  for (const auto& info : read_timelines(ctx.out)) {
    const auto corpus = load_timeline(ctx.out, info);
    const auto records = engagement::compute_records(corpus);
    for (const auto& r : records) {
      records_csv += io::csv_row({info.label, r.post_id, std::to_string(r.active), std::to_string(r.passive),
                                  std::to_string(r.total), std::to_string(r.comments)});
    }
    const auto index = engagement::index_records(records);
    const auto rows = engagement::engagement_scatter(corpus, index);
    scatter.insert(scatter.end(), rows.begin(), rows.end());
    const auto topics = read_topics(ctx.out, info.label);
    for (const auto& t : topics.at("topics")) {
      const auto reps = t.at("representatives").get<std::vector<std::string>>();
      std::string active, passive;
      if (!reps.empty()) {
        const auto te = engagement::topic_engagement(reps, index, ctx.cfg.active_measure);
        active = io::format_double(te.avg_active);
        passive = io::format_double(te.avg_passive);
      }
      topic_csv += io::csv_row({std::to_string(t.at("topic").get<int>()), info.label, active, passive});
    }
  }
  std::sort(scatter.begin(), scatter.end(), [](const auto& a, const auto& b) { return a.post_id < b.post_id; });
  std::string scatter_csv = "post_id,active,passive\n";
  for (const auto& r : scatter) {
    scatter_csv += io::csv_row({r.post_id, std::to_string(r.active), std::to_string(r.passive)});
  }
  io::write_file(ctx.out / "engagement.csv", records_csv);
  io::write_file(ctx.out / "scatter.csv", scatter_csv);
  io::write_file(ctx.out / "topic_engagement.csv", topic_csv);
  return Status::ok;
}

struct ClusterRef {
  std::string id;
  std::string label;
  std::vector<std::string> members;
};

std::string cluster_id(const std::string& label, int topic, std::size_t index) {
  return label + "/topic" + std::to_string(topic) + "/c" + std::to_string(index);
}

std::vector<ClusterRef> read_clusters(const fs::path& out) {
  std::vector<ClusterRef> refs;
  const auto doc = parse_json_file(out / "clusters.json");
  for (const auto& [label, topics] : doc.at("timelines").items()) {
    for (const auto& entry : topics) {
      const int topic = entry.at("topic").get<int>();
      for (const auto& c : entry.at("clustering").at("clusters")) {
        refs.push_back({cluster_id(label, topic, c.at("index").get<std::size_t>()), label,
                        c.at("members").get<std::vector<std::string>>()});
      }
    }
  }
  return refs;
}

Status stage_summarize(Context& ctx, const json& stages) {
  require(stages, Stage::cluster, true);
  const auto client = make_chat_client(ctx.cfg.llm);
  if (!client || stage_status(stages, Stage::cluster) == "skipped") {
    fs::remove(ctx.out / "summaries.jsonl");
    return Status::skipped;
  }
  std::map<std::string, corpus::Corpus> corpora;
  for (const auto& info : read_timelines(ctx.out)) corpora.emplace(info.label, load_timeline(ctx.out, info));

  const auto clusters = read_clusters(ctx.out);
  std::vector<const corpus::Post*> posts;
  std::map<std::string, std::size_t> position;
  for (const auto& c : clusters) {
    const auto n = std::min(c.members.size(), ctx.cfg.llm.max_posts_per_cluster);
    for (std::size_t i = 0; i < n; ++i) {
      if (position.contains(c.members[i])) continue;
      const auto* post = corpora.at(c.label).find_post(c.members[i]);
      if (!post) throw FormatError("cluster member " + c.members[i] + " is not in timeline " + c.label);
      position.emplace(c.members[i], posts.size());
      posts.push_back(post);
    }
  }

  insight::RetryPolicy policy;
  policy.max_attempts = ctx.cfg.llm.max_attempts;
  policy.initial_backoff = std::chrono::milliseconds(ctx.cfg.llm.initial_backoff_ms);
  auto records = insight::summarize_posts(*client, posts, policy, ctx.cfg.llm.concurrency);

  std::vector<insight::SummaryRecord> cluster_records;
  for (const auto& c : clusters) {
    std::vector<insight::SummaryRecord> children;
    const auto n = std::min(c.members.size(), ctx.cfg.llm.max_posts_per_cluster);
    for (std::size_t i = 0; i < n; ++i) children.push_back(records[position.at(c.members[i])]);
    try {
      cluster_records.push_back(insight::summarize_cluster(*client, c.id, children, policy));
    } catch (const PreconditionError& e) {
      insight::SummaryRecord failed;
      failed.subject_id = c.id;
      failed.level = insight::Level::cluster;
      failed.model_id = client->model_id();
      failed.prompt = insight::cluster_prompt().name + "." + insight::cluster_prompt().version;
      failed.error = e.what();
      cluster_records.push_back(std::move(failed));
    }
  }
  const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok; });
  if (failed) spdlog::warn("summarize: {} of {} post summaries failed", failed, records.size());
  records.insert(records.end(), cluster_records.begin(), cluster_records.end());
  io::write_file(ctx.out / "summaries.jsonl", insight::summaries_jsonl(records));
  return Status::ok;
}

std::vector<topicmodel::SweepEntry> read_sweep(const fs::path& path) {
  std::vector<topicmodel::SweepEntry> out;
  for (const auto& row : read_csv(path)) {
    if (row.size() != 3) throw FormatError(path.string() + ": expected 3 columns");
    topicmodel::SweepEntry e;
    e.k = std::stoi(row[0]);
    e.w_k = std::stoul(row[1]);
    e.wall_seconds = row[2].empty() ? 0.0 : std::stod(row[2]);
    out.push_back(e);
  }
  return out;
}

Status stage_report(Context& ctx, const json& stages) {
  for (Stage s : {Stage::ingest, Stage::sweep, Stage::topics, Stage::engage}) require(stages, s);
  require(stages, Stage::cluster, true);
  require(stages, Stage::summarize, true);
  const bool clustered = stage_status(stages, Stage::cluster) == "ok";
  const bool summarized = stage_status(stages, Stage::summarize) == "ok";

  std::map<std::pair<std::string, int>, engagement::TopicEngagement> topic_eng;
  for (const auto& row : read_csv(ctx.out / "topic_engagement.csv")) {
    if (row.size() != 4) throw FormatError("topic_engagement.csv: expected 4 columns");
    if (row[2].empty()) continue;
    topic_eng[{row[1], std::stoi(row[0])}] = {std::stod(row[2]), std::stod(row[3])};
  }
  std::map<std::string, insight::SummaryRecord> summaries;
  if (summarized) {
    for (auto& r : insight::read_summaries(ctx.out / "summaries.jsonl")) {
      if (r.level == insight::Level::cluster) summaries.emplace(r.subject_id, std::move(r));
    }
  }
  json clusters_doc;
  if (clustered) clusters_doc = parse_json_file(ctx.out / "clusters.json");

  std::vector<report::TimelineView> views;
  for (const auto& info : read_timelines(ctx.out)) {
    const auto dir = timeline_dir(ctx.out, info.label);
    const auto model = topicmodel::read_model(dir / "model");
    const auto topics = read_topics(ctx.out, info.label);
    const auto shares = report::topic_shares(model, ctx.cfg.share_mode);
    report::TimelineView view;
    view.label = info.label;
    view.window = info.window;
    view.posts = info.posts;
    view.comments = info.comments;
    view.users = info.users;
    view.k = model.k;
    view.sweep = read_sweep(dir / "sweep.csv");
    for (const auto& t : topics.at("topics")) {
      report::TopicView tv;
      tv.topic = t.at("topic").get<int>();
      tv.top_terms = t.at("top_terms").get<std::vector<std::string>>();
      tv.share_percent = shares[static_cast<std::size_t>(tv.topic)];
      tv.representatives = t.at("representatives").size();
      if (auto it = topic_eng.find({info.label, tv.topic}); it != topic_eng.end()) tv.engagement = it->second;
      if (clustered) {
        for (const auto& entry : clusters_doc.at("timelines").at(info.label)) {
          if (entry.at("topic").get<int>() != tv.topic) continue;
          const auto& c = entry.at("clustering");
          for (const auto& step : c.at("chi_trace")) tv.chi_trace.push_back(step.at("chi").get<double>());
          for (const auto& cl : c.at("clusters")) {
            report::ClusterView cv;
            cv.cluster_id = cluster_id(info.label, tv.topic, cl.at("index").get<std::size_t>());
            cv.members = cl.at("members").get<std::vector<std::string>>();
            for (const auto& kw : cl.at("keywords")) cv.keywords.push_back(kw.at("term").get<std::string>());
            if (auto it = summaries.find(cv.cluster_id); it != summaries.end()) cv.summary = it->second;
            tv.clusters.push_back(std::move(cv));
          }
        }
      }
      view.topics.push_back(std::move(tv));
    }
    views.push_back(std::move(view));
  }
  const auto bundle = report::render_report(views, {summarized, clustered, ctx.cfg.share_mode});
  io::write_file(ctx.out / "report.md", bundle.markdown);
  io::write_file(ctx.out / "topics.csv", bundle.topics_csv);
  emit_plot_data(ctx.out);
  return Status::ok;
}

Status dispatch(Context& ctx, const json& stages, Stage stage) {
  switch (stage) {
    case Stage::ingest: return stage_ingest(ctx, stages);
    case Stage::sweep: return stage_sweep(ctx, stages);
    case Stage::topics: return stage_topics(ctx, stages);
    case Stage::cluster: return stage_cluster(ctx, stages);
    case Stage::engage: return stage_engage(ctx, stages);
    case Stage::summarize: return stage_summarize(ctx, stages);
    case Stage::report: return stage_report(ctx, stages);
  }
  throw Error("unknown stage");
}

}  // namespace

json read_manifest(const fs::path& out_dir) {
  const auto path = out_dir / "manifest.json";
  if (!fs::exists(path)) return json{{"stages", json::object()}, {"artifacts", json::array()}};
  return parse_json_file(path);
}

StageResult run_stage(const config::PipelineConfig& config, Stage stage) {
  config::validate(config);
  Context ctx(config);
  fs::create_directories(ctx.out);
  write_json(ctx.out / "config.json", config::to_json(config));

  auto stages = read_manifest(ctx.out).at("stages");
  const auto first = std::find(kAllStages.begin(), kAllStages.end(), stage);
  for (auto it = first; it != kAllStages.end(); ++it) stages.erase(std::string(stage_name(*it)));

  StageResult result{stage, Status::ok, {}};
  spdlog::info("stage {}: start", stage_name(stage));
  try {
    result.status = dispatch(ctx, stages, stage);
  } catch (const std::exception& e) {
    result.status = Status::failed;
    result.error = e.what();
    spdlog::error("stage {} failed: {}", stage_name(stage), e.what());
  }
  json entry{{"status", status_name(result.status)}};
  if (result.status == Status::failed) entry["error"] = result.error;
  stages[std::string(stage_name(stage))] = entry;
  write_manifest(ctx.out, stages);
  return result;
}

int run_pipeline(const config::PipelineConfig& config) {
  config::validate(config);
  for (Stage s : kAllStages) {
    if (run_stage(config, s).status == Status::failed) return 1;
  }
  return 0;
}

void emit_plot_data(const fs::path& out) {
  const auto stages = read_manifest(out).at("stages");
  require(stages, Stage::topics);
  require(stages, Stage::engage);
  const auto cfg = config::from_json(parse_json_file(out / "config.json"));
  const auto infos = read_timelines(out);

  std::string fig1 = "timeline,post_id,active,passive\n";
  for (const auto& row : read_csv(out / "engagement.csv")) {
    if (row.size() != 6) throw FormatError("engagement.csv: expected 6 columns");
    fig1 += io::csv_row({row[0], row[1], row[2], row[3]});
  }

  std::vector<std::string> header{"topic"};
  std::vector<std::vector<double>> shares;
  std::size_t max_k = 0;
  for (const auto& info : infos) {
    header.push_back(info.label);
    const auto model = topicmodel::read_model(timeline_dir(out, info.label) / "model");
    shares.push_back(report::topic_shares(model, cfg.share_mode));
    max_k = std::max(max_k, shares.back().size());
  }
  std::string fig2 = io::csv_row(header);
  for (std::size_t t = 0; t < max_k; ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (const auto& s : shares) row.push_back(t < s.size() ? io::format_double(s[t]) : std::string());
    fig2 += io::csv_row(row);
  }

  std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> eng;
  for (const auto& row : read_csv(out / "topic_engagement.csv")) {
    if (row.size() != 4) throw FormatError("topic_engagement.csv: expected 4 columns");
    eng[{row[0], row[1]}] = {row[2], row[3]};
  }
  auto fig3_header = header;
  fig3_header.insert(fig3_header.begin() + 1, "metric");
  std::string fig3 = io::csv_row(fig3_header);
  for (std::size_t t = 0; t < max_k; ++t) {
    for (const char* metric : {"active", "passive"}) {
      std::vector<std::string> row{std::to_string(t), metric};
      for (const auto& info : infos) {
        auto it = eng.find({std::to_string(t), info.label});
        if (it == eng.end()) {
          row.emplace_back();
        } else {
          row.push_back(std::string_view(metric) == "active" ? it->second.first : it->second.second);
        }
      }
      fig3 += io::csv_row(row);
    }
  }
  io::write_file(out / "plots" / "fig1_scatter.csv", fig1);
  io::write_file(out / "plots" / "fig2_topic_share.csv", fig2);
  io::write_file(out / "plots" / "fig3_topic_engagement.csv", fig3);
}

std::unique_ptr<insight::ChatClient> make_chat_client(const config::LlmSettings& llm) {
  if (llm.provider == "mock") return std::make_unique<insight::MockChatClient>(llm.context_chars);
  if (llm.provider == "http") {
    insight::HttpChatConfig http;
    http.base_url = llm.base_url;
    http.model = llm.model;
    http.api_key_env = llm.api_key_env;
    http.timeout_seconds = llm.timeout_seconds;
    http.context_chars = llm.context_chars;
    return std::make_unique<insight::HttpChatClient>(http);
  }
  if (llm.provider == "disabled") return nullptr;
  throw PreconditionError("unknown llm provider '" + llm.provider + "'");
}

}  // namespace redsense::pipeline
