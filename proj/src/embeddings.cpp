#include "redsense/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"
#include "redsense/simd/kernels.hpp"

namespace redsense::embeddings {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Vector synthetic_vector(std::uint64_t seed, std::string_view key, std::size_t dim) {
  std::uint64_t state = fnv1a(key);
  std::uint64_t mix = seed;
  state ^= splitmix64(mix);
  Vector v(dim);
  for (auto& x : v) {
    const double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = 2.0 * unit - 1.0;
  }
  return v;
}

EmbeddingSpace EmbeddingSpace::synthetic(std::uint64_t seed, std::size_t dim) {
  EmbeddingSpace space(dim);
  space.synthetic_seed_ = seed;
  return space;
}

void EmbeddingSpace::insert(std::string key, Vector vector) {
  if (vector.empty()) throw FormatError("embedding for '" + key + "' is empty");
  if (dim_ == 0 && entries_.empty()) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw FormatError("embedding for '" + key + "' has dimension " + std::to_string(vector.size()) +
                      ", expected " + std::to_string(dim_));
  }
  for (double x : vector) {
    if (!std::isfinite(x)) throw FormatError("embedding for '" + key + "' has a non-finite component");
  }
  entries_.insert_or_assign(std::move(key), std::move(vector));
}

std::optional<Vector> EmbeddingSpace::lookup(std::string_view key) const {
  if (auto it = entries_.find(std::string(key)); it != entries_.end()) return it->second;
  if (synthetic_seed_) return synthetic_vector(*synthetic_seed_, key, dim_);
  return std::nullopt;
}

bool EmbeddingSpace::contains(std::string_view key) const {
  return synthetic_seed_.has_value() || entries_.contains(std::string(key));
}

std::vector<std::string> EmbeddingSpace::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

EmbeddingSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EmbeddingSpace space;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (io::trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(number);
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw FormatError(where + ": not a JSON object");
    auto key = obj.find("key");
    auto vec = obj.find("vector");
    if (key == obj.end() || !key->is_string() || vec == obj.end() || !vec->is_array()) {
      throw FormatError(where + ": expected {\"key\": string, \"vector\": [numbers]}");
    }
    Vector values;
    values.reserve(vec->size());
    for (const auto& x : *vec) {
      if (!x.is_number()) throw FormatError(where + ": vector holds a non-number");
      values.push_back(x.get<double>());
    }
    auto k = key->get<std::string>();
    if (space.size() && space.lookup(k)) throw FormatError(where + ": duplicate key '" + k + "'");
    try {
      space.insert(std::move(k), std::move(values));
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  if (space.size() == 0) throw FormatError(path.string() + ": no embeddings");
  return space;
}

EmbeddingStore load_store(const std::filesystem::path& word_path, const std::filesystem::path& doc_path) {
  return EmbeddingStore{load_space(word_path), load_space(doc_path)};
}

void write_space(const EmbeddingSpace& space, const std::filesystem::path& path) {
  std::string out;
  for (const auto& key : space.keys()) {
    const auto v = *space.lookup(key);
    out += "{\"key\":" + nlohmann::json(key).dump() + ",\"vector\":[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += io::format_double(v[i]);
    }
    out += "]}\n";
  }
  io::write_file(path, out);
}

EmbeddingStore synthetic_store(std::uint64_t seed, std::size_t dim) {
  if (dim < 2) throw PreconditionError("synthetic embedding dimension must be at least 2");
  return EmbeddingStore{EmbeddingSpace::synthetic(seed, dim), EmbeddingSpace::synthetic(seed, dim)};
}

EmbeddingSpace mean_word_documents(const EmbeddingSpace& words,
                                   const std::vector<std::pair<std::string, std::string>>& id_text,
                                   const text::TokenizerOptions& tokenizer) {
  EmbeddingSpace docs(words.dim());
  for (const auto& [id, body] : id_text) {
    Vector sum(words.dim(), 0.0);
    std::size_t used = 0;
    for (const auto& token : text::model_tokens(body, tokenizer)) {
      if (auto v = words.lookup(token)) {
        simd::add_into(sum, *v);
        ++used;
      }
    }
    if (used == 0) continue;
    simd::scale(sum, 1.0 / static_cast<double>(used));
    docs.insert(id, std::move(sum));
  }
  return docs;
}

}  // namespace redsense::embeddings
