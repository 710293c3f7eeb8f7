#include "redsense/setdistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redsense/errors.hpp"
#include "redsense/simd/kernels.hpp"
#include "redsense/transport.hpp"

namespace redsense::setdistance {

void WeightedKeywordCloud::add(std::string term, double weight, std::span<const double> vector) {
  if (!(weight >= 0.0)) throw PreconditionError("keyword weight must be non-negative");
  if (dim_ == 0 && terms_.empty()) dim_ = vector.size();
  if (vector.size() != dim_ || dim_ == 0) throw PreconditionError("keyword vector has the wrong dimension");
  terms_.push_back(std::move(term));
  weights_.push_back(weight);
  coords_.insert(coords_.end(), vector.begin(), vector.end());
}

double WeightedKeywordCloud::total_weight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

WeightedKeywordCloud WeightedKeywordCloud::normalized() const {
  WeightedKeywordCloud out = *this;
  const double total = total_weight();
  if (total > 0.0) {
    for (double& w : out.weights_) w /= total;
  }
  return out;
}

WeightedKeywordCloud build_cloud(const keywords::KeywordSet& set, const embeddings::EmbeddingSpace& words,
                                 CloudBuildStats* stats) {
  WeightedKeywordCloud cloud(words.dim());
  for (const auto& kw : set.keywords) {
    auto vec = words.lookup(kw.term);
    if (!vec) {
      const auto parts = text::word_tokens(kw.term);
      if (parts.size() > 1) {
        embeddings::Vector mean(words.dim(), 0.0);
        bool complete = true;
        for (const auto& part : parts) {
          auto pv = words.lookup(part);
          if (!pv) {
            complete = false;
            break;
          }
          simd::add_into(mean, *pv);
        }
        if (complete) {
          simd::scale(mean, 1.0 / static_cast<double>(parts.size()));
          vec = std::move(mean);
        }
      }
    }
    if (!vec) {
      if (stats) ++stats->missing;
      continue;
    }
    cloud.add(kw.term, kw.tfidf, *vec);
  }
  return cloud;
}

double travel_cost(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("travel cost between vectors of different dimensions");
  return simd::l2(a, b);
}

double directed_set_wmd(const WeightedKeywordCloud& source, const WeightedKeywordCloud& target) {
  if (source.empty() || target.empty()) throw PreconditionError("degenerate set: keyword cloud is empty");
  if (source.dim() != target.dim()) throw PreconditionError("keyword clouds have different dimensions");
  std::vector<double> sq(target.size());
  double total = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double w = source.weights()[i];
    if (w == 0.0) continue;
    simd::squared_l2_rows(source.vector(i), target.coords(), target.dim(), sq);
    total += w * std::sqrt(*std::min_element(sq.begin(), sq.end()));
  }
  return total;
}

double sym_set_wmd(const WeightedKeywordCloud& a, const WeightedKeywordCloud& b) {
  return 0.5 * (directed_set_wmd(a, b) + directed_set_wmd(b, a));
}

double exact_pair_wmd(const WeightedKeywordCloud& a, const WeightedKeywordCloud& b) {
  if (a.empty() || b.empty()) throw PreconditionError("degenerate set: keyword cloud is empty");
  if (a.size() > kExactPairLimit || b.size() > kExactPairLimit) {
    throw PreconditionError("exact transport is limited to " + std::to_string(kExactPairLimit) +
                            " keywords per side; use directed_set_wmd for larger sets");
  }
  if (std::abs(a.total_weight() - 1.0) > 1e-9 || std::abs(b.total_weight() - 1.0) > 1e-9) {
    throw PreconditionError("exact transport requires weights normalized to sum 1");
  }
  if (a.dim() != b.dim()) throw PreconditionError("keyword clouds have different dimensions");
  std::vector<double> cost(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cost[i * b.size() + j] = travel_cost(a.vector(i), b.vector(j));
  }
  return transport::solve_transport(a.weights(), b.weights(), cost).cost;
}

double avg_pairwise_wmd(const std::vector<WeightedKeywordCloud>& clusters, ChiNormalization normalization) {
  const std::size_t k = clusters.size();
  if (k < 2) throw PreconditionError("average pairwise distance needs at least two clusters");
  double sum = 0.0;
  if (normalization == ChiNormalization::pair_mean) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) sum += sym_set_wmd(clusters[i], clusters[j]);
    }
    return sum / static_cast<double>(k * (k - 1) / 2);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) sum += directed_set_wmd(clusters[i], clusters[j]);
    }
  }
  return sum / static_cast<double>(k);
}

std::vector<double> pairwise_matrix(const std::vector<WeightedKeywordCloud>& clusters) {
  const std::size_t k = clusters.size();
  std::vector<double> m(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) m[i * k + j] = m[j * k + i] = sym_set_wmd(clusters[i], clusters[j]);
  }
  return m;
}

}  // namespace redsense::setdistance
