#include "redsense/topicmodel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::topicmodel {

std::size_t TokenizedDocuments::token_count() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

TokenizedDocuments tokenize_documents(const std::vector<std::pair<std::string, std::string>>& id_text,
                                      const DocumentOptions& options) {
  std::vector<std::vector<std::string>> raw;
  raw.reserve(id_text.size());
  std::map<std::string, std::size_t> df;
  for (const auto& [id, body] : id_text) {
    raw.push_back(text::model_tokens(body, options.tokenizer));
    std::vector<std::string> distinct = raw.back();
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto& t : distinct) ++df[t];
  }

  TokenizedDocuments out;
  std::unordered_map<std::string, std::uint32_t> index;
  for (const auto& [term, count] : df) {  // std::map: lexicographic
    if (count < options.min_document_frequency) continue;
    index.emplace(term, static_cast<std::uint32_t>(out.vocabulary.size()));
    out.vocabulary.push_back(term);
  }
  for (std::size_t i = 0; i < id_text.size(); ++i) {
    out.doc_ids.push_back(id_text[i].first);
    auto& ids = out.docs.emplace_back();
    for (const auto& t : raw[i]) {
      if (auto it = index.find(t); it != index.end()) ids.push_back(it->second);
    }
  }
  return out;
}

TokenizedDocuments tokenize_posts(const corpus::Corpus& corpus, const DocumentOptions& options) {
  std::vector<std::pair<std::string, std::string>> id_text;
  id_text.reserve(corpus.posts().size());
  for (const auto& p : corpus.posts()) id_text.emplace_back(p.id, corpus::post_text(p));
  return tokenize_documents(id_text, options);
}

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class GibbsSampler {
 public:
  GibbsSampler(const TokenizedDocuments& docs, int k, double alpha, double beta, std::uint64_t seed)
      : docs_(docs),
        k_(static_cast<std::size_t>(k)),
        v_(docs.vocabulary.size()),
        alpha_(alpha),
        beta_(beta),
        rng_(seed),
        doc_topic_(docs.docs.size() * k_, 0),
        topic_word_(k_ * v_, 0),
        topic_total_(k_, 0),
        weights_(k_, 0.0) {
    assignments_.reserve(docs.docs.size());
    for (std::size_t d = 0; d < docs.docs.size(); ++d) {
      auto& z = assignments_.emplace_back(docs.docs[d].size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        const auto t = std::min(static_cast<std::size_t>(unit_draw(rng_) * static_cast<double>(k_)), k_ - 1);
        z[i] = static_cast<std::uint32_t>(t);
        add(d, docs.docs[d][i], t, +1);
      }
    }
  }

  void sweep() {
    const double v_beta = static_cast<double>(v_) * beta_;
    for (std::size_t d = 0; d < docs_.docs.size(); ++d) {
      const auto& words = docs_.docs[d];
      auto& z = assignments_[d];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const auto w = words[i];
        add(d, w, z[i], -1);
        double total = 0.0;
        for (std::size_t t = 0; t < k_; ++t) {
          total += (doc_topic_[d * k_ + t] + alpha_) * (topic_word_[t * v_ + w] + beta_) /
                   (topic_total_[t] + v_beta);
          weights_[t] = total;
        }
        const double u = unit_draw(rng_) * total;
        std::size_t t = 0;
        while (t + 1 < k_ && weights_[t] <= u) ++t;
        z[i] = static_cast<std::uint32_t>(t);
        add(d, w, t, +1);
      }
    }
  }

  void accumulate(Matrix& theta, Matrix& phi) const {
    const double k_alpha = static_cast<double>(k_) * alpha_;
    const double v_beta = static_cast<double>(v_) * beta_;
    for (std::size_t d = 0; d < docs_.docs.size(); ++d) {
      const double len = static_cast<double>(docs_.docs[d].size());
      for (std::size_t t = 0; t < k_; ++t) theta(d, t) += (doc_topic_[d * k_ + t] + alpha_) / (len + k_alpha);
    }
    for (std::size_t t = 0; t < k_; ++t) {
      for (std::size_t w = 0; w < v_; ++w) {
        phi(t, w) += (topic_word_[t * v_ + w] + beta_) / (topic_total_[t] + v_beta);
      }
    }
  }

 private:
  void add(std::size_t d, std::uint32_t w, std::size_t t, int delta) {
    doc_topic_[d * k_ + t] += delta;
    topic_word_[t * v_ + w] += delta;
    topic_total_[t] += delta;
  }

  const TokenizedDocuments& docs_;
  std::size_t k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  std::mt19937_64 rng_;
  std::vector<std::vector<std::uint32_t>> assignments_;
  std::vector<double> doc_topic_;
  std::vector<double> topic_word_;
  std::vector<double> topic_total_;
  std::vector<double> weights_;
};

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double sum = 0.0;
    for (double x : row) sum += x;
    for (double& x : row) x /= sum;
  }
}

}  // namespace

TopicModel fit_lda(const TokenizedDocuments& docs, const LdaConfig& config) {
  if (config.k < 2) throw PreconditionError("topic count k must be at least 2");
  if (config.iterations < 1) throw PreconditionError("at least one Gibbs iteration is required");
  if (docs.docs.empty()) throw PreconditionError("cannot fit a topic model to an empty corpus");
  if (docs.vocabulary.empty()) throw PreconditionError("vocabulary is empty after tokenization");
  const double alpha = config.resolved_alpha();
  if (!(alpha > 0) || !(config.beta > 0)) throw PreconditionError("alpha and beta must be positive");

  const auto k = static_cast<std::size_t>(config.k);
  GibbsSampler sampler(docs, config.k, alpha, config.beta, config.seed);
  Matrix theta(docs.docs.size(), k);
  Matrix phi(k, docs.vocabulary.size());

  const bool averaging = config.average_samples && config.burn_in < config.iterations;
  const int lag = std::max(1, config.sample_lag);
  for (int it = 1; it <= config.iterations; ++it) {
    sampler.sweep();
    if (averaging && it > config.burn_in && (it - config.burn_in) % lag == 0) sampler.accumulate(theta, phi);
  }
  if (!averaging) sampler.accumulate(theta, phi);
  normalize_rows(theta);
  normalize_rows(phi);

  TopicModel model;
  model.k = config.k;
  model.alpha = alpha;
  model.beta = config.beta;
  model.seed = config.seed;
  model.iterations = config.iterations;
  model.doc_ids = docs.doc_ids;
  model.vocabulary = docs.vocabulary;
  model.theta = std::move(theta);
  model.phi = std::move(phi);
  return model;
}

double skewness(std::span<const double> row) {
  const std::size_t k = row.size();
  if (k == 0) return 0.0;
  std::vector<double> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end());
  const double scale = std::max(std::abs(sorted.front()), std::abs(sorted.back()));
  if (sorted.back() - sorted.front() <= 1e-12 * scale) return 0.0;

  double mean = 0.0;
  for (double x : sorted) mean += x;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double x : sorted) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(k));
  if (sd == 0.0) return 0.0;

  const double median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  return 3.0 * (mean - median) / sd;
}

SkewnessReport count_nonpositive_skew(const Matrix& theta) {
  SkewnessReport report;
  report.per_post_skew.reserve(theta.rows());
  for (std::size_t i = 0; i < theta.rows(); ++i) {
    const double s = skewness(theta.row(i));
    report.per_post_skew.push_back(s);
    if (s <= 0.0) ++report.w_k;
  }
  return report;
}

SkewnessReport count_nonpositive_skew(const TopicModel& model) { return count_nonpositive_skew(model.theta); }

std::uint64_t seed_for_k(std::uint64_t master_seed, int k) {
  return splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(k)));
}

SweepResult select_topic_count(const TokenizedDocuments& docs, int k_min, int k_max, const SweepConfig& config) {
  if (k_min < 2 || k_min >= k_max) throw PreconditionError("topic sweep requires 2 <= k_min < k_max");

  struct Fit {
    TopicModel model;
    SweepEntry entry;
  };
  auto fit_one = [&](int k) {
    const auto started = std::chrono::steady_clock::now();
    LdaConfig lda;
    lda.k = k;
    lda.alpha = config.alpha;
    lda.beta = config.beta;
    lda.iterations = config.iterations;
    lda.seed = seed_for_k(config.master_seed, k);
    lda.average_samples = config.average_samples;
    Fit fit{fit_lda(docs, lda), {}};
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    fit.entry = SweepEntry{k, count_nonpositive_skew(fit.model).w_k, elapsed};
    spdlog::debug("k={} W_k={} ({:.2f}s)", k, fit.entry.w_k, elapsed);
    return fit;
  };

  std::vector<Fit> fits;
  const unsigned workers = std::max(1u, config.workers);
  for (int next = k_min; next <= k_max;) {
    std::vector<std::future<Fit>> batch;
    for (unsigned w = 0; w < workers && next <= k_max; ++w, ++next) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, fit_one, next));
    }
    for (auto& f : batch) fits.push_back(f.get());
  }

  SweepResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    result.sweep.push_back(fits[i].entry);
    if (fits[i].entry.w_k < fits[best].entry.w_k) best = i;
  }
  result.k_star = fits[best].entry.k;
  result.best = std::move(fits[best].model);
  return result;
}

double rep_threshold(int k) {
  if (k <= 2) {
    throw PreconditionError("representative threshold undefined or >1 for k = " + std::to_string(k) +
                            " (requires k >= 3)");
  }
  const double kd = static_cast<double>(k);
  return 1.0 / (kd - std::sqrt(kd));
}

std::vector<std::string> representative_posts(const TopicModel& model, int topic) {
  if (topic < 0 || topic >= model.k) throw PreconditionError("topic index out of range");
  const double tau = rep_threshold(model.k);
  const auto t = static_cast<std::size_t>(topic);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < model.theta.rows(); ++i) {
    if (model.theta(i, t) > tau) rows.push_back(i);
  }
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    if (model.theta(a, t) != model.theta(b, t)) return model.theta(a, t) > model.theta(b, t);
    return model.doc_ids[a] < model.doc_ids[b];
  });
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(model.doc_ids[r]);
  return ids;
}

int dominant_topic(std::span<const double> theta_row) {
  return static_cast<int>(std::max_element(theta_row.begin(), theta_row.end()) - theta_row.begin());
}

std::vector<std::string> top_terms(const TopicModel& model, int topic, std::size_t n) {
  const auto t = static_cast<std::size_t>(topic);
  std::vector<std::size_t> order(model.vocabulary.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t count = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (model.phi(t, a) != model.phi(t, b)) return model.phi(t, a) > model.phi(t, b);
                      return a < b;
                    });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(model.vocabulary[order[i]]);
  return out;
}

void write_model(const TopicModel& model, const std::filesystem::path& dir) {
  std::vector<std::string> header{"post_id"};
  for (int t = 0; t < model.k; ++t) header.push_back("t" + std::to_string(t));
  std::string theta = io::csv_row(header);
  for (std::size_t i = 0; i < model.theta.rows(); ++i) {
    std::vector<std::string> row{model.doc_ids[i]};
    for (double x : model.theta.row(i)) row.push_back(io::format_double(x));
    theta += io::csv_row(row);
  }
  header[0] = "term";
  std::string phi = io::csv_row(header);
  for (std::size_t w = 0; w < model.vocabulary.size(); ++w) {
    std::vector<std::string> row{model.vocabulary[w]};
    for (int t = 0; t < model.k; ++t) row.push_back(io::format_double(model.phi(static_cast<std::size_t>(t), w)));
    phi += io::csv_row(row);
  }
  nlohmann::json meta{{"k", model.k},
                      {"alpha", model.alpha},
                      {"beta", model.beta},
                      {"seed", model.seed},
                      {"iterations", model.iterations},
                      {"documents", model.doc_ids.size()},
                      {"vocabulary_size", model.vocabulary.size()},
                      {"theta_path", "theta.csv"},
                      {"phi_path", "phi.csv"}};
  io::write_file(dir / "theta.csv", theta);
  io::write_file(dir / "phi.csv", phi);
  io::write_file(dir / "model.json", meta.dump(2) + "\n");
}

namespace {

// Reads a label column plus `cols` numeric columns.
void read_matrix_csv(const std::filesystem::path& path, std::size_t cols, std::vector<std::string>& labels,
                     std::vector<double>& values) {
  std::istringstream in(io::read_file(path));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = io::parse_csv_line(line);
    if (fields.size() != cols + 1) throw FormatError(path.string() + ": unexpected column count");
    labels.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) values.push_back(std::stod(fields[c]));
  }
}

}  // namespace

TopicModel read_model(const std::filesystem::path& dir) {
  const auto meta = nlohmann::json::parse(io::read_file(dir / "model.json"));
  TopicModel model;
  model.k = meta.at("k").get<int>();
  model.alpha = meta.at("alpha").get<double>();
  model.beta = meta.at("beta").get<double>();
  model.seed = meta.at("seed").get<std::uint64_t>();
  model.iterations = meta.at("iterations").get<int>();
  const auto k = static_cast<std::size_t>(model.k);

  std::vector<double> theta_values;
  read_matrix_csv(dir / meta.at("theta_path").get<std::string>(), k, model.doc_ids, theta_values);
  model.theta = Matrix(model.doc_ids.size(), k);
  for (std::size_t i = 0; i < theta_values.size(); ++i) model.theta(i / k, i % k) = theta_values[i];

  std::vector<double> phi_values;
  read_matrix_csv(dir / meta.at("phi_path").get<std::string>(), k, model.vocabulary, phi_values);
  model.phi = Matrix(k, model.vocabulary.size());
  for (std::size_t i = 0; i < phi_values.size(); ++i) model.phi(i % k, i / k) = phi_values[i];
  return model;
}

}  // namespace redsense::topicmodel
