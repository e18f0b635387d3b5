#include <doctest.h>

#include <cmath>

#include "spinner/edge_list_io.hpp"
#include "spinner/generators.hpp"
#include "spinner/metrics.hpp"
#include "spinner/rng.hpp"
#include "spinner/tail_bound.hpp"
#include "test_support.hpp"

using namespace spinner;

namespace {

Graph two_cliques(std::size_t size) {
  std::vector<DirectedEdge> raw;
  for (VertexId offset : {VertexId{0}, static_cast<VertexId>(size)}) {
    for (VertexId i = 0; i < size; ++i) {
      for (VertexId j = i + 1; j < size; ++j) raw.push_back({offset + i, offset + j});
    }
  }
  raw.push_back({0, static_cast<VertexId>(size)});
  return to_undirected(DirectedEdgeList::from_raw(std::move(raw), true));
}

std::vector<Label> random_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Label> labels(n);
  for (auto& l : labels) l = static_cast<Label>(rng.uniform_index(k));
  return labels;
}

}  // namespace

TEST_CASE("one label everywhere is fully local and balanced") {
  const auto g = load_graph(test_data("karate.txt"), {.undirected = true});
  const std::vector<Label> labels(g.num_vertices(), 0);
  const auto q = quality(g, labels, 1);
  CHECK(q.phi == 1.0);
  CHECK(q.rho == 1.0);
  CHECK(q.local_edges == 156);
  CHECK(q.total_edges == 156);
  CHECK(q.max_load == 312);
}

TEST_CASE("quality of the identity hash on karate") {
  const auto g = load_graph(test_data("karate.txt"), {.undirected = true});
  for (auto [k, phi, rho] : {std::tuple{2, 0.5, 1.0128205128205128}, std::tuple{3, 1.0 / 3.0, 1.2307692307692308}}) {
    const auto labels = hash_baseline(g, k, HashKind::identity);
    const auto q = quality(g, labels, k);
    CHECK(q.phi == doctest::Approx(phi).epsilon(1e-12));
    CHECK(q.rho == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("weights count towards locality") {
  // Toy graph: arcs 1<->2 have weight 2, every other pair weight 1.
  const auto g = load_graph(test_data("toy.txt"));
  const auto labels = hash_baseline(g, 2, HashKind::identity);
  const auto q = quality(g, labels, 2);
  CHECK(q.total_edges == 8);
  CHECK(q.local_edges == 2);
  CHECK(q.phi == 0.25);
  CHECK(q.rho == 1.0);
  CHECK(cut_message_count(g, labels).total == 6);
}

TEST_CASE("quality rejects bad assignments") {
  const auto g = load_graph(test_data("toy.txt"));
  CHECK_THROWS_AS(quality(g, std::vector<Label>(3, 0), 2), InputError);
  CHECK_THROWS_AS(quality(g, std::vector<Label>(g.num_vertices(), 2), 2), InputError);
}

TEST_CASE("random labels with k = 64 keep about 1/64 of the edges local") {
  const auto g = to_undirected(watts_strogatz({50000, 40, 0.3, 3}));
  const auto q = quality(g, random_labels(g.num_vertices(), 64, 17), 64);
  CHECK(std::abs(q.phi - 1.0 / 64.0) <= 0.005);
  CHECK(q.rho >= 1.0);
}

TEST_CASE("partitioning difference") {
  const std::vector<Label> a = {0, 1, 2, 3, 0, 1, 2, 3, 0, 1};
  auto b = a;
  CHECK(partitioning_difference(a, b) == 0.0);
  b[4] = 3;
  CHECK(partitioning_difference(a, b) == doctest::Approx(0.1));
  CHECK(partitioning_difference(b, a) == partitioning_difference(a, b));

  const auto x = random_labels(100000, 4, 1);
  const auto y = random_labels(100000, 4, 2);
  // 1 - 1/k, with a standard error of about 0.0014.
  CHECK(std::abs(partitioning_difference(x, y) - 0.75) < 0.005);
}

TEST_CASE("partitioning difference over maps ignores vertices missing from one side") {
  const PartitionMap a({{1, 0}, {2, 1}, {3, 1}, {7, 0}});
  const PartitionMap b({{2, 1}, {3, 0}, {7, 0}, {9, 4}});
  CHECK(partitioning_difference(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(partitioning_difference(a, PartitionMap({{50, 1}})) == 0.0);
}

TEST_CASE("identity hash splits by parity") {
  std::vector<DirectedEdge> raw;
  for (VertexId i = 0; i + 1 < 10; ++i) raw.push_back({i, i + 1});
  const auto g = to_undirected(DirectedEdgeList::from_raw(raw));
  const auto labels = hash_baseline(g, 2, HashKind::identity);
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) CHECK(labels[v] == g.id(v) % 2);
}

TEST_CASE("mixed hash is stable and near one half on two cliques") {
  const auto g = two_cliques(50);
  const auto a = hash_baseline(g, 2);
  CHECK(a == hash_baseline(g, 2));
  CHECK(std::abs(quality(g, a, 2).phi - 0.5) < 0.05);
  CHECK_THROWS_AS(hash_baseline(g, 0), ConfigError);
}

TEST_CASE("cut messages") {
  const auto g = two_cliques(5);
  std::vector<Label> planted(g.num_vertices());
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) planted[v] = g.id(v) < 5 ? 0 : 1;
  const auto cut = cut_message_count(g, planted);
  // Only the bridge crosses, and it carries both directions.
  CHECK(cut.total == 2);
  CHECK(cut.by_pair.size() == 1);
  CHECK(cut.by_pair.at({0, 1}) == 2);
  CHECK(cut_message_count(g, std::vector<Label>(g.num_vertices(), 0)).total == 0);

  const auto ws = to_undirected(watts_strogatz({2000, 8, 0.5, 9}));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto labels = random_labels(ws.num_vertices(), 6, seed);
    const auto q = quality(ws, labels, 6);
    const auto c = cut_message_count(ws, labels);
    CHECK(c.total == q.total_edges - q.local_edges);
    std::uint64_t summed = 0;
    for (const auto& [pair, w] : c.by_pair) {
      CHECK(pair.first < pair.second);
      summed += w;
    }
    CHECK(summed == c.total);
  }
}

TEST_CASE("stated tail bound spot values") {
  std::vector<std::uint64_t> degrees(200);
  for (std::size_t i = 0; i < degrees.size(); ++i) degrees[i] = 1 + (499 * i + 99) / 199;
  CHECK(degrees.front() == 1);
  CHECK(degrees.back() == 500);
  double load = 0;
  for (auto d : degrees) load += static_cast<double>(d);
  const double r = load / 2;
  CHECK(stated_tail_bound(200, 0.2, r, 1, 500) < 0.2);
  CHECK(stated_tail_bound(200, 0.4, r, 1, 500) < 0.0016);
  CHECK(stated_tail_bound(200, 0.2, r, 7, 7) == 1.0);
}

TEST_CASE("binomial tail matches exact sums") {
  CHECK(binomial_upper_tail(100, 0.5, 55) == doctest::Approx(0.13562651203691736).epsilon(1e-10));
  CHECK(binomial_upper_tail(100, 0.5, 60) == doctest::Approx(0.017600100108852407).epsilon(1e-10));
  CHECK(binomial_upper_tail(10, 0.3, 10) == 0.0);
  CHECK(binomial_upper_tail(10, 1.0, 9.5) == 1.0);
  CHECK(binomial_upper_tail(10, 0.0, 0.0) == 0.0);
}

TEST_CASE("equal degrees use the exact binomial tail") {
  const std::vector<std::uint64_t> degrees(100, 10);
  const auto report = verify_tail_bound(degrees, 500.0, 20000, 3, std::vector<double>{0.1, 0.2});
  CHECK(report.probability == 0.5);
  REQUIRE(report.points.size() == 2);
  CHECK(*report.points[0].exact == doctest::Approx(0.13562651203691736).epsilon(1e-10));
  CHECK(*report.points[1].exact == doctest::Approx(0.017600100108852407).epsilon(1e-10));
  for (const auto& p : report.points) CHECK(p.stated_holds());
  // When every candidate fits, nothing can overflow.
  const auto fits = verify_tail_bound(degrees, 2000.0, 1000, 3);
  CHECK(fits.probability == 1.0);
  for (const auto& p : fits.points) CHECK(p.overflows == 0);
}

TEST_CASE("empirical overflow stays under the Hoeffding bound") {
  std::vector<std::uint64_t> degrees(200);
  for (std::size_t i = 0; i < degrees.size(); ++i) degrees[i] = 1 + (499 * i + 99) / 199;
  double load = 0;
  for (auto d : degrees) load += static_cast<double>(d);
  const auto a = verify_tail_bound(degrees, load / 2, 5000, 11);
  const auto b = verify_tail_bound(degrees, load / 2, 5000, 11);
  REQUIRE(a.points.size() == kDefaultEpsilonGrid.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].hoeffding_holds());
    CHECK(a.points[i].overflows == b.points[i].overflows);
  }
  CHECK(a.points.front().overflows >= a.points.back().overflows);
}
