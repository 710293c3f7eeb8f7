#pragma once

// Incremental farthest-point clustering of document embeddings, growing the
// number of clusters while the average pairwise keyword-set distance (chi)
// keeps increasing.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "redsense/embeddings.hpp"
#include "redsense/keywords.hpp"
#include "redsense/setdistance.hpp"

namespace redsense::clustering {

// Document vectors stored row-major with their ids.
class DocPoints {
 public:
  DocPoints() = default;
  explicit DocPoints(std::size_t dim) : dim_(dim) {}

  void add(std::string id, std::span<const double> vector);
  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> coords() const { return coords_; }
  std::optional<std::size_t> index_of(const std::string& id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> coords_;
};

// Cluster centers, row-major k x dim.
struct Centers {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> row(std::size_t c) const { return {coords.data() + c * dim, dim}; }
  void push(std::span<const double> v) { coords.insert(coords.end(), v.begin(), v.end()); }
};

enum class DeltaMode {
  paper,  // next center maximizes the largest distance to any center
  minmax  // next center maximizes the distance to its nearest center
};

// Uniform draw from the seeded generator. Throws PreconditionError for an
// empty list.
std::string pick_first_center(const std::vector<std::string>& doc_ids, std::uint64_t seed);

// Document farthest from `first_center`, ties by smallest id. The document
// named `exclude` (the first center) is never returned. Throws
// PreconditionError with fewer than two documents.
std::string pick_second_center(std::span<const double> first_center, const DocPoints& docs,
                               const std::string& exclude);

struct Assignment {
  std::vector<std::size_t> labels;  // per document
  std::vector<std::size_t> sizes;   // per cluster
  Centers centers;                  // member means; empty clusters keep their old center
};

// Nearest center by Euclidean distance, ties to the lowest cluster index
// unless the document is listed in `pinned` (document index -> cluster) and
// that cluster is among the nearest. Centers are then recomputed as member
// means.
Assignment assign_and_recenter(const DocPoints& docs, const Centers& centers,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pinned = {});

// Next center among documents not in `taken` that do not coincide with an
// existing center; ties by smallest id. Throws PreconditionError when no
// such document exists.
std::string next_center(const DocPoints& docs, const Centers& centers, DeltaMode mode,
                        const std::set<std::string>& taken = {});

struct ClusterConfig {
  std::size_t max_k = 25;
  DeltaMode mode = DeltaMode::paper;
  // Lloyd iterations to a fixed point after each added center instead of a
  // single assign/recenter pass.
  bool iterate_to_convergence = false;
  std::size_t max_refinements = 100;
  setdistance::ChiNormalization chi_normalization = setdistance::ChiNormalization::pair_mean;
  keywords::KeywordConfig keywords;
};

struct ChiStep {
  std::size_t k = 0;
  double chi = 0;
  bool accepted = false;
};

struct ClusterDoc {
  std::string id;
  std::string text;
};

struct Clustering {
  std::vector<std::string> doc_ids;  // clustered documents, input order
  std::vector<std::size_t> labels;   // parallel to doc_ids
  Centers centers;
  std::map<std::string, std::size_t> assignments;
  std::vector<ChiStep> chi_trace;  // every evaluated state, in order
  std::uint64_t seed = 0;
  std::vector<keywords::KeywordSet> keywords;  // final state, one per cluster
  std::vector<double> distances;               // final pairwise sym distances, k x k
  std::vector<std::string> skipped;            // documents without an embedding
  std::vector<std::string> warnings;

  std::size_t k() const { return centers.size(); }
  std::vector<std::vector<std::string>> members() const;
};

// Runs the full procedure on one topic's representative posts. With fewer
// than three embeddable documents a single cluster is returned with an empty
// chi trace and a warning.
Clustering incremental_cluster(const std::vector<ClusterDoc>& docs, const embeddings::EmbeddingStore& store,
                               std::uint64_t seed, const ClusterConfig& config = {});

// Chi of a given partition: keyword sets per cluster, then the average
// pairwise set distance. `members` holds document indices per cluster.
double evaluate_chi(const std::vector<ClusterDoc>& docs, const std::vector<std::vector<std::size_t>>& members,
                    const embeddings::EmbeddingSpace& words, const ClusterConfig& config,
                    std::vector<keywords::KeywordSet>* sets_out = nullptr,
                    std::vector<setdistance::WeightedKeywordCloud>* clouds_out = nullptr);

nlohmann::json to_json(const Clustering& clustering);

std::string_view mode_name(DeltaMode mode);
DeltaMode parse_mode(std::string_view name);

}  // namespace redsense::clustering
