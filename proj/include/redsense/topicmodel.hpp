#pragma once

// LDA by collapsed Gibbs sampling and skewness-based selection of the topic
// count.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "redsense/corpus.hpp"
#include "redsense/text.hpp"

namespace redsense::topicmodel {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct DocumentOptions {
  text::TokenizerOptions tokenizer;
  std::size_t min_document_frequency = 2;
};

// Bag-of-words view of a document collection: token ids per document over a
// vocabulary sorted lexicographically.
struct TokenizedDocuments {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<std::uint32_t>> docs;
  std::vector<std::string> vocabulary;

  std::size_t token_count() const;
};

TokenizedDocuments tokenize_documents(const std::vector<std::pair<std::string, std::string>>& id_text,
                                      const DocumentOptions& options = {});
// Posts in corpus order, text = title + body.
TokenizedDocuments tokenize_posts(const corpus::Corpus& corpus, const DocumentOptions& options = {});

struct LdaConfig {
  int k = 2;
  std::optional<double> alpha;  // symmetric; defaults to 50 / k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 1;
  // Average theta/phi over post-burn-in samples instead of using the final
  // state.
  bool average_samples = false;
  int burn_in = 500;
  int sample_lag = 10;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(k); }
};

struct TopicModel {
  int k = 0;
  double alpha = 0;
  double beta = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<std::string> doc_ids;
  std::vector<std::string> vocabulary;
  Matrix phi;    // k x V
  Matrix theta;  // N x k
};

// Throws PreconditionError when k < 2, iterations < 1, there are no
// documents, or the vocabulary is empty.
TopicModel fit_lda(const TokenizedDocuments& docs, const LdaConfig& config);

// Pearson's second skewness 3 (mean - median) / sd with the population
// standard deviation. Rows whose entries are all equal (up to a relative
// spread of 1e-12) have no defined skew and return 0.
double skewness(std::span<const double> row);

struct SkewnessReport {
  std::vector<double> per_post_skew;
  std::size_t w_k = 0;  // rows with skewness <= 0
};

SkewnessReport count_nonpositive_skew(const Matrix& theta);
SkewnessReport count_nonpositive_skew(const TopicModel& model);

struct SweepConfig {
  std::optional<double> alpha;  // per-k default 50 / k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t master_seed = 1;
  bool average_samples = false;
  unsigned workers = 1;
};

// Seed used for the fit at topic count k.
std::uint64_t seed_for_k(std::uint64_t master_seed, int k);

struct SweepEntry {
  int k = 0;
  std::size_t w_k = 0;
  double wall_seconds = 0;
};

struct SweepResult {
  int k_star = 0;
  std::vector<SweepEntry> sweep;  // ascending k
  TopicModel best;                // the model fitted at k_star
};

// Fits k_min..k_max and returns the k with the fewest non-positively skewed
// posts, smallest k on ties. Throws PreconditionError unless
// 2 <= k_min < k_max.
SweepResult select_topic_count(const TokenizedDocuments& docs, int k_min, int k_max, const SweepConfig& config);

// 1 / (k - sqrt(k)); throws PreconditionError for k <= 2, where the
// threshold is undefined (k = 1) or above 1.
double rep_threshold(int k);

// Posts with theta[i][topic] > rep_threshold(k), by descending probability,
// ties by post id.
std::vector<std::string> representative_posts(const TopicModel& model, int topic);

// Topic with the largest probability, lowest index on ties.
int dominant_topic(std::span<const double> theta_row);

// The n most probable terms of a topic.
std::vector<std::string> top_terms(const TopicModel& model, int topic, std::size_t n);

// model.json (parameters, vocabulary size, file names) plus theta.csv and
// phi.csv in `dir`.
void write_model(const TopicModel& model, const std::filesystem::path& dir);
TopicModel read_model(const std::filesystem::path& dir);

}  // namespace redsense::topicmodel
