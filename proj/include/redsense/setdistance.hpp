#pragma once

// Travel costs between embedded keywords and Word Mover's style distances
// between keyword sets.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "redsense/embeddings.hpp"
#include "redsense/keywords.hpp"

namespace redsense::setdistance {

// Keywords of one document set with their weights and embeddings. Vectors are
// stored contiguously, row-major, for the batched distance kernels.
class WeightedKeywordCloud {
 public:
  WeightedKeywordCloud() = default;
  explicit WeightedKeywordCloud(std::size_t dim) : dim_(dim) {}

  // Throws PreconditionError for a negative weight or a dimension mismatch;
  // the first add fixes the dimension of a default-constructed cloud.
  void add(std::string term, double weight, std::span<const double> vector);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> vector(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> coords() const { return coords_; }
  double total_weight() const;
  // Copy with weights scaled to sum to 1 (unchanged when the total is 0).
  WeightedKeywordCloud normalized() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> terms_;
  std::vector<double> weights_;
  std::vector<double> coords_;
};

struct CloudBuildStats {
  std::size_t missing = 0;  // keywords dropped for lack of an embedding
};

// Weights are the keywords' TF-IDF. A phrase without its own vector uses the
// mean of its words' vectors when all of them are embedded; otherwise the
// keyword is dropped and counted.
WeightedKeywordCloud build_cloud(const keywords::KeywordSet& set, const embeddings::EmbeddingSpace& words,
                                 CloudBuildStats* stats = nullptr);

// ||a - b||_2. Throws PreconditionError on a dimension mismatch.
double travel_cost(std::span<const double> a, std::span<const double> b);

// sum over source keywords w of weight(w) * min over target keywords v of
// travel_cost(w, v). Throws PreconditionError("degenerate set") when either
// cloud is empty.
double directed_set_wmd(const WeightedKeywordCloud& source, const WeightedKeywordCloud& target);

// Mean of both directions.
double sym_set_wmd(const WeightedKeywordCloud& a, const WeightedKeywordCloud& b);

// Optimal transport cost between two clouds whose weights each sum to 1
// (within 1e-9). Throws PreconditionError for unnormalized weights or more
// than 12 keywords on either side (use directed_set_wmd for larger sets).
double exact_pair_wmd(const WeightedKeywordCloud& a, const WeightedKeywordCloud& b);

inline constexpr std::size_t kExactPairLimit = 12;

enum class ChiNormalization {
  pair_mean,   // mean of sym_set_wmd over the k(k-1)/2 unordered pairs
  per_cluster  // (1/k) * sum of directed_set_wmd over ordered pairs i != j
};

// Average pairwise distance among k >= 2 clusters. Throws PreconditionError
// for fewer than two clusters or an empty cloud.
double avg_pairwise_wmd(const std::vector<WeightedKeywordCloud>& clusters,
                        ChiNormalization normalization = ChiNormalization::pair_mean);

// Symmetric k x k matrix of sym_set_wmd (zero diagonal), row-major.
std::vector<double> pairwise_matrix(const std::vector<WeightedKeywordCloud>& clusters);

}  // namespace redsense::setdistance
