#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "redsense/clustering.hpp"
#include "redsense/errors.hpp"
#include "support/fixtures.hpp"

using namespace redsense;
using namespace redsense::clustering;

namespace {

DocPoints points(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  DocPoints p(rows.front().second.size());
  for (const auto& [id, v] : rows) p.add(id, v);
  return p;
}

Centers centers(const std::vector<std::vector<double>>& rows) {
  Centers c;
  c.dim = rows.front().size();
  for (const auto& r : rows) c.push(r);
  return c;
}

// Clusters agree with the generating blobs up to relabeling.
bool matches_blobs(const Clustering& c, const testing::BlobFixture& fx) {
  std::map<std::size_t, std::size_t> to_blob;
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < fx.docs.size(); ++i) {
    const auto label = c.assignments.at(fx.docs[i].id);
    auto [it, fresh] = to_blob.emplace(label, fx.blob[i]);
    if (fresh && !used.insert(fx.blob[i]).second) return false;
    if (it->second != fx.blob[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("first center draws") {
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  CHECK(pick_first_center(ids, 5) == pick_first_center(ids, 5));
  CHECK(pick_first_center({"only"}, 9) == "only");
  std::map<std::string, int> hits;
  for (std::uint64_t s = 0; s < 1000; ++s) ++hits[pick_first_center(ids, s)];
  CHECK(hits.size() == 4);
  CHECK_THROWS_AS(pick_first_center({}, 1), PreconditionError);
}

TEST_CASE("second center") {
  const auto docs = points({{"c1", {0, 0}}, {"near", {1, 0}}, {"far", {0, 5}}, {"mid", {3, 0}}});
  const std::vector<double> origin{0, 0};
  CHECK(pick_second_center(origin, docs, "c1") == "far");
  const auto ring = points({{"c1", {0, 0}}, {"z", {1, 0}}, {"b", {0, 1}}, {"m", {-1, 0}}});
  CHECK(pick_second_center(origin, ring, "c1") == "b");
  const auto pair = points({{"c1", {0, 0}}, {"other", {0, 0}}});
  CHECK(pick_second_center(origin, pair, "c1") == "other");
  CHECK_THROWS_AS(pick_second_center(origin, points({{"c1", {0, 0}}}), "c1"), PreconditionError);
}

TEST_CASE("assignment and recentering") {
  const auto docs = points({{"a", {0, 0}}, {"b", {0, 2}}, {"c", {20, 0}}, {"d", {22, 0}}});
  const auto r = assign_and_recenter(docs, centers({{0, 0}, {20, 0}}));
  CHECK(r.labels == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(r.sizes == std::vector<std::size_t>{2, 2});
  CHECK(r.centers.row(0)[1] == 1.0);
  CHECK(r.centers.row(1)[0] == 21.0);
  const auto one = assign_and_recenter(docs, centers({{5, 5}}));
  CHECK(one.sizes[0] == 4);
  CHECK(one.centers.row(0)[0] == 10.5);
  CHECK(one.centers.row(0)[1] == 0.5);
  const auto tie = assign_and_recenter(points({{"x", {5, 0}}}), centers({{0, 0}, {10, 0}}));
  CHECK(tie.labels[0] == 0);
  const auto pinned = assign_and_recenter(points({{"x", {5, 0}}}), centers({{0, 0}, {10, 0}}), {{0, 1}});
  CHECK(pinned.labels[0] == 1);
}

TEST_CASE("next center modes") {
  const auto single = points({{"p", {1, 0}}, {"q", {4, 0}}});
  CHECK(next_center(single, centers({{0, 0}}), DeltaMode::paper) == "q");
  CHECK(next_center(single, centers({{0, 0}}), DeltaMode::minmax) == "q");
  const auto docs = points({{"m", {5, 0}}, {"n", {-3, 0}}});
  const auto two = centers({{0, 0}, {10, 0}});
  CHECK(next_center(docs, two, DeltaMode::paper) == "n");
  CHECK(next_center(docs, two, DeltaMode::minmax) == "m");
  CHECK(next_center(docs, two, DeltaMode::paper, {"n"}) == "m");
  const auto on_centers = points({{"u", {0, 0}}, {"v", {10, 0}}});
  CHECK_THROWS_AS(next_center(on_centers, two, DeltaMode::paper), PreconditionError);
  CHECK(parse_mode("minmax") == DeltaMode::minmax);
  CHECK(mode_name(DeltaMode::paper) == "paper");
  CHECK_THROWS_AS(parse_mode("nope"), PreconditionError);
}

TEST_CASE("three blobs are recovered in both modes") {
  for (DeltaMode mode : {DeltaMode::paper, DeltaMode::minmax}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto fx = testing::make_blobs(seed);
      ClusterConfig cfg;
      cfg.mode = mode;
      const auto c = incremental_cluster(fx.docs, fx.store, seed * 31, cfg);
      CHECK(c.k() == 3);
      CHECK(matches_blobs(c, fx));
      REQUIRE(c.chi_trace.size() >= 2);
      CHECK_FALSE(c.chi_trace.back().accepted);
      for (std::size_t i = 1; i < c.chi_trace.size(); ++i) {
        if (c.chi_trace[i].accepted) CHECK(c.chi_trace[i].chi > c.chi_trace[i - 1].chi);
      }
      CHECK(c.keywords.size() == 3);
      CHECK(c.distances.size() == 9);
    }
  }
}

TEST_CASE("identical documents stop at two clusters") {
  std::vector<ClusterDoc> docs;
  embeddings::EmbeddingStore store;
  store.words.insert("savings", {1, 0});
  store.words.insert("account", {0, 1});
  for (int i = 0; i < 6; ++i) {
    docs.push_back({"d" + std::to_string(i), "Savings account."});
    store.docs.insert("d" + std::to_string(i), {1, 1});
  }
  const auto c = incremental_cluster(docs, store, 3);
  CHECK(c.k() == 2);
  REQUIRE(c.chi_trace.size() == 1);
  CHECK(c.chi_trace[0].chi == 0.0);
}

TEST_CASE("clustering is deterministic and reports skipped documents") {
  auto fx = testing::make_blobs(4, 3, 10);
  fx.docs.push_back({"orphan", "no vector for this one"});
  const auto a = incremental_cluster(fx.docs, fx.store, 77);
  const auto b = incremental_cluster(fx.docs, fx.store, 77);
  CHECK(a.assignments == b.assignments);
  CHECK(a.labels == b.labels);
  CHECK(a.skipped == std::vector<std::string>{"orphan"});
  CHECK_FALSE(a.assignments.contains("orphan"));
  const auto j = to_json(a);
  CHECK(j.at("k") == a.k());
  CHECK(j.at("seed") == 77);
}

TEST_CASE("fewer than three documents give one cluster") {
  const auto fx = testing::make_blobs(1, 2, 1);
  const auto c = incremental_cluster(fx.docs, fx.store, 1);
  CHECK(c.k() == 1);
  CHECK(c.chi_trace.empty());
  CHECK_FALSE(c.warnings.empty());
}

TEST_CASE("per-cluster normalization and refinement still recover blobs") {
  const auto fx = testing::make_blobs(2);
  ClusterConfig cfg;
  cfg.chi_normalization = setdistance::ChiNormalization::per_cluster;
  cfg.iterate_to_convergence = true;
  const auto c = incremental_cluster(fx.docs, fx.store, 5, cfg);
  CHECK(c.k() >= 3);
  CHECK(c.k() <= cfg.max_k);
}
