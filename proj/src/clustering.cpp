#include "redsense/clustering.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>

#include "redsense/errors.hpp"
#include "redsense/simd/kernels.hpp"

namespace redsense::clustering {

void DocPoints::add(std::string id, std::span<const double> vector) {
  if (dim_ == 0 && ids_.empty()) dim_ = vector.size();
  if (vector.size() != dim_ || dim_ == 0) throw PreconditionError("document vector has the wrong dimension");
  ids_.push_back(std::move(id));
  coords_.insert(coords_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> DocPoints::index_of(const std::string& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::string pick_first_center(const std::vector<std::string>& doc_ids, std::uint64_t seed) {
  if (doc_ids.empty()) throw PreconditionError("cannot pick a center from an empty document list");
  std::mt19937_64 rng(seed);
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const auto index = std::min(static_cast<std::size_t>(unit * static_cast<double>(doc_ids.size())), doc_ids.size() - 1);
  return doc_ids[index];
}

std::string pick_second_center(std::span<const double> first_center, const DocPoints& docs,
                               const std::string& exclude) {
  if (docs.size() < 2) throw PreconditionError("a second center needs at least two documents");
  std::vector<double> sq(docs.size());
  simd::squared_l2_rows(first_center, docs.coords(), docs.dim(), sq);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs.id(i) == exclude) continue;
    if (!best || sq[i] > sq[*best] || (sq[i] == sq[*best] && docs.id(i) < docs.id(*best))) best = i;
  }
  if (!best) throw PreconditionError("no candidate for the second center");
  return docs.id(*best);
}

Assignment assign_and_recenter(const DocPoints& docs, const Centers& centers,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pinned) {
  const std::size_t k = centers.size();
  if (k == 0) throw PreconditionError("assignment needs at least one center");
  Assignment out;
  out.labels.assign(docs.size(), 0);
  out.sizes.assign(k, 0);
  std::vector<std::size_t> pin(docs.size(), k);
  for (auto [doc, cluster] : pinned) {
    if (doc < docs.size() && cluster < k) pin[doc] = cluster;
  }

  std::vector<double> sq(k);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    simd::squared_l2_rows(docs.row(i), centers.coords, centers.dim, sq);
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (sq[c] < sq[best]) best = c;
    }
    if (pin[i] < k && sq[pin[i]] == sq[best]) best = pin[i];
    out.labels[i] = best;
    ++out.sizes[best];
  }

  out.centers.dim = centers.dim;
  out.centers.coords.assign(centers.coords.size(), 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::span<double> acc(out.centers.coords.data() + out.labels[i] * centers.dim, centers.dim);
    simd::add_into(acc, docs.row(i));
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::span<double> center(out.centers.coords.data() + c * centers.dim, centers.dim);
    if (out.sizes[c] == 0) {
      std::copy(centers.row(c).begin(), centers.row(c).end(), center.begin());
    } else {
      simd::scale(center, 1.0 / static_cast<double>(out.sizes[c]));
    }
  }
  return out;
}

std::string next_center(const DocPoints& docs, const Centers& centers, DeltaMode mode,
                        const std::set<std::string>& taken) {
  const std::size_t k = centers.size();
  if (k == 0) throw PreconditionError("next center needs at least one existing center");
  std::vector<double> sq(k);
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (taken.contains(docs.id(i))) continue;
    simd::squared_l2_rows(docs.row(i), centers.coords, centers.dim, sq);
    const auto [lo, hi] = std::minmax_element(sq.begin(), sq.end());
    if (*lo == 0.0) continue;  // coincides with a center
    const double score = mode == DeltaMode::paper ? *hi : *lo;
    if (!best || score > best_score || (score == best_score && docs.id(i) < docs.id(*best))) {
      best = i;
      best_score = score;
    }
  }
  if (!best) throw PreconditionError("all documents are centers; no further center can be added");
  return docs.id(*best);
}

std::vector<std::vector<std::string>> Clustering::members() const {
  std::vector<std::vector<std::string>> out(k());
  for (std::size_t i = 0; i < doc_ids.size(); ++i) out[labels[i]].push_back(doc_ids[i]);
  return out;
}

double evaluate_chi(const std::vector<ClusterDoc>& docs, const std::vector<std::vector<std::size_t>>& members,
                    const embeddings::EmbeddingSpace& words, const ClusterConfig& config,
                    std::vector<keywords::KeywordSet>* sets_out,
                    std::vector<setdistance::WeightedKeywordCloud>* clouds_out) {
  std::vector<keywords::DocumentSet> sets;
  for (std::size_t c = 0; c < members.size(); ++c) {
    keywords::DocumentSet set{"c" + std::to_string(c), {}};
    for (auto i : members[c]) set.docs.emplace_back(docs[i].id, docs[i].text);
    sets.push_back(std::move(set));
  }
  auto keyword_sets = keywords::represent_sets(sets, config.keywords);
  std::vector<setdistance::WeightedKeywordCloud> clouds;
  setdistance::CloudBuildStats stats;
  for (const auto& ks : keyword_sets) clouds.push_back(setdistance::build_cloud(ks, words, &stats));
  if (stats.missing > 0) spdlog::debug("{} keywords dropped for lack of an embedding", stats.missing);
  const double chi = setdistance::avg_pairwise_wmd(clouds, config.chi_normalization);
  if (sets_out) *sets_out = std::move(keyword_sets);
  if (clouds_out) *clouds_out = std::move(clouds);
  return chi;
}

namespace {

struct State {
  Centers centers;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> sizes;
  double chi = 0;
};

// Assigns, optionally refines to a fixed point, and drops empty clusters
// (re-assigning to the surviving centers).
State settle(const DocPoints& points, Centers centers, std::vector<std::pair<std::size_t, std::size_t>> pinned,
             const ClusterConfig& config) {
  for (;;) {
    auto a = assign_and_recenter(points, centers, pinned);
    if (config.iterate_to_convergence) {
      for (std::size_t it = 0; it < config.max_refinements; ++it) {
        auto next = assign_and_recenter(points, a.centers);
        const bool stable = next.labels == a.labels;
        a = std::move(next);
        if (stable) break;
      }
    }
    const bool has_empty = std::find(a.sizes.begin(), a.sizes.end(), 0) != a.sizes.end();
    if (!has_empty) return State{std::move(a.centers), std::move(a.labels), std::move(a.sizes), 0.0};

    Centers kept{centers.dim, {}};
    std::vector<std::size_t> remap(a.sizes.size(), a.sizes.size());
    for (std::size_t c = 0; c < a.sizes.size(); ++c) {
      if (a.sizes[c] == 0) continue;
      remap[c] = kept.size();
      kept.push(centers.row(c));
    }
    std::vector<std::pair<std::size_t, std::size_t>> kept_pins;
    for (auto [doc, cluster] : pinned) {
      if (cluster < remap.size() && remap[cluster] < remap.size()) kept_pins.emplace_back(doc, remap[cluster]);
    }
    centers = std::move(kept);
    pinned = std::move(kept_pins);
  }
}

std::vector<std::vector<std::size_t>> group(const std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  return members;
}

}  // namespace

Clustering incremental_cluster(const std::vector<ClusterDoc>& docs, const embeddings::EmbeddingStore& store,
                               std::uint64_t seed, const ClusterConfig& config) {
  Clustering result;
  result.seed = seed;

  // Only documents with an embedding take part.
  std::vector<ClusterDoc> usable;
  DocPoints points(store.docs.dim());
  for (const auto& d : docs) {
    if (auto v = store.docs.lookup(d.id)) {
      points.add(d.id, *v);
      usable.push_back(d);
    } else {
      result.skipped.push_back(d.id);
    }
  }
  if (!result.skipped.empty()) {
    result.warnings.push_back(std::to_string(result.skipped.size()) + " documents have no embedding");
  }
  result.doc_ids = points.ids();

  auto finish = [&](const State& s, const std::vector<std::vector<std::size_t>>& members) {
    result.centers = s.centers;
    result.labels = s.labels;
    for (std::size_t i = 0; i < result.doc_ids.size(); ++i) result.assignments[result.doc_ids[i]] = s.labels[i];
    if (members.size() >= 2) {
      try {
        std::vector<setdistance::WeightedKeywordCloud> clouds;
        evaluate_chi(usable, members, store.words, config, &result.keywords, &clouds);
        result.distances = setdistance::pairwise_matrix(clouds);
      } catch (const PreconditionError&) {
      }
    }
    for (const auto& w : result.warnings) spdlog::warn("clustering: {}", w);
    return result;
  };

  if (points.size() < 3) {
    result.warnings.push_back("fewer than three documents; returning a single cluster");
    if (points.size() == 0) return finish(State{Centers{points.dim(), {}}, {}, {}, 0.0}, {});
    Centers one{points.dim(), {}};
    std::vector<double> mean(points.dim(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) simd::add_into(mean, points.row(i));
    simd::scale(mean, 1.0 / static_cast<double>(points.size()));
    one.push(mean);
    return finish(State{one, std::vector<std::size_t>(points.size(), 0), {points.size()}, 0.0}, {});
  }
  if (config.max_k < 2) throw PreconditionError("max_k must be at least 2");

  const auto first = pick_first_center(points.ids(), seed);
  const auto first_index = *points.index_of(first);
  const auto second = pick_second_center(points.row(first_index), points, first);
  const auto second_index = *points.index_of(second);
  std::set<std::string> taken{first, second};

  Centers initial{points.dim(), {}};
  initial.push(points.row(first_index));
  initial.push(points.row(second_index));
  State best = settle(points, initial, {{first_index, 0}, {second_index, 1}}, config);
  if (best.centers.size() < 2) {
    result.warnings.push_back("initial split collapsed to one cluster");
    return finish(best, {});
  }
  try {
    best.chi = evaluate_chi(usable, group(best.labels, best.centers.size()), store.words, config);
  } catch (const PreconditionError& e) {
    result.warnings.push_back(std::string("chi undefined for the initial split: ") + e.what());
    return finish(best, group(best.labels, best.centers.size()));
  }
  result.chi_trace.push_back({best.centers.size(), best.chi, true});

  while (best.centers.size() < config.max_k) {
    std::string candidate;
    try {
      candidate = next_center(points, best.centers, config.mode, taken);
    } catch (const PreconditionError&) {
      break;
    }
    const auto index = *points.index_of(candidate);
    Centers grown = best.centers;
    grown.push(points.row(index));
    State next = settle(points, grown, {{index, best.centers.size()}}, config);
    if (next.centers.size() <= best.centers.size()) break;
    try {
      next.chi = evaluate_chi(usable, group(next.labels, next.centers.size()), store.words, config);
    } catch (const PreconditionError& e) {
      result.warnings.push_back(std::string("chi undefined at k = ") + std::to_string(next.centers.size()) + ": " +
                                e.what());
      break;
    }
    const bool accepted = next.chi > best.chi;
    result.chi_trace.push_back({next.centers.size(), next.chi, accepted});
    if (!accepted) break;
    taken.insert(candidate);
    best = std::move(next);
  }
  return finish(best, group(best.labels, best.centers.size()));
}

nlohmann::json to_json(const Clustering& clustering) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& s : clustering.chi_trace) trace.push_back({{"k", s.k}, {"chi", s.chi}, {"accepted", s.accepted}});
  nlohmann::json clusters = nlohmann::json::array();
  const auto members = clustering.members();
  for (std::size_t c = 0; c < clustering.k(); ++c) {
    nlohmann::json kws = nlohmann::json::array();
    if (c < clustering.keywords.size()) {
      for (const auto& kw : clustering.keywords[c].keywords) {
        kws.push_back({{"term", kw.term}, {"yake_score", kw.yake_score}, {"tfidf", kw.tfidf}});
      }
    }
    const auto row = clustering.centers.row(c);
    clusters.push_back({{"index", c},
                        {"members", members[c]},
                        {"center", std::vector<double>(row.begin(), row.end())},
                        {"keywords", kws}});
  }
  return nlohmann::json{{"seed", clustering.seed},
                        {"k", clustering.k()},
                        {"assignments", clustering.assignments},
                        {"chi_trace", trace},
                        {"clusters", clusters},
                        {"skipped", clustering.skipped},
                        {"warnings", clustering.warnings}};
}

std::string_view mode_name(DeltaMode mode) { return mode == DeltaMode::paper ? "paper" : "minmax"; }

DeltaMode parse_mode(std::string_view name) {
  if (name == "paper") return DeltaMode::paper;
  if (name == "minmax") return DeltaMode::minmax;
  throw PreconditionError("unknown delta_max mode '" + std::string(name) + "' (expected paper or minmax)");
}

}  // namespace redsense::clustering
