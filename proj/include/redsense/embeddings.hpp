#pragma once

// Word-level and document-level embedding spaces.
//
// On-disk format (both spaces): JSONL, one {"key": string, "vector": [reals]}
// object per line, all vectors in a file sharing one dimension.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "redsense/text.hpp"

namespace redsense::embeddings {

using Vector = std::vector<double>;

// Deterministic vector in [-1, 1)^dim derived from (seed, key) only.
Vector synthetic_vector(std::uint64_t seed, std::string_view key, std::size_t dim);

// One embedding space. Either explicit (entries loaded or inserted) or
// synthetic (every key resolves to synthetic_vector(seed, key, dim)); explicit
// entries take precedence over the synthetic fallback.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  explicit EmbeddingSpace(std::size_t dim) : dim_(dim) {}
  static EmbeddingSpace synthetic(std::uint64_t seed, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool is_synthetic() const { return synthetic_seed_.has_value(); }

  // Throws FormatError on a dimension mismatch or non-finite component. The
  // first insert fixes the dimension of an empty default-constructed space.
  void insert(std::string key, Vector vector);

  // std::nullopt means "missing embedding": nothing is fabricated for an
  // explicit space.
  std::optional<Vector> lookup(std::string_view key) const;
  bool contains(std::string_view key) const;

  // Explicit keys in lexicographic order.
  std::vector<std::string> keys() const;

 private:
  std::size_t dim_ = 0;
  std::optional<std::uint64_t> synthetic_seed_;
  std::unordered_map<std::string, Vector> entries_;
};

// The two spaces used by the pipeline: keyword vectors and post vectors.
struct EmbeddingStore {
  EmbeddingSpace words;
  EmbeddingSpace docs;
};

// Throws IoError for unreadable files and FormatError for an empty file,
// malformed line, duplicate key, mixed dimensions or non-finite values.
EmbeddingSpace load_space(const std::filesystem::path& path);
EmbeddingStore load_store(const std::filesystem::path& word_path, const std::filesystem::path& doc_path);

// Writes explicit entries sorted by key, values in shortest round-trip form.
void write_space(const EmbeddingSpace& space, const std::filesystem::path& path);

// Synthetic words and documents, both of dimension `dim` (>= 2).
EmbeddingStore synthetic_store(std::uint64_t seed, std::size_t dim);

// Document vectors as the mean of their tokens' word vectors. Documents with
// no embeddable token get no entry.
EmbeddingSpace mean_word_documents(const EmbeddingSpace& words,
                                   const std::vector<std::pair<std::string, std::string>>& id_text,
                                   const text::TokenizerOptions& tokenizer = {});

}  // namespace redsense::embeddings
