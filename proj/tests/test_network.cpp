#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "urbannet/network.hpp"

using namespace urbannet;
using namespace urbannet::network;
using ingest::Dataset;
using ingest::Facility;
using ingest::FacilityKind;
using ingest::Tract;

namespace {

Dataset make_dataset(std::vector<Tract> tracts, std::vector<Facility> facilities) {
  return ingest::join_dataset(tracts, facilities, ingest::SocioTable{}, {});
}

Dataset random_instance(std::mt19937_64& rng, int n_tracts, int n_schools, int n_hospitals = 0,
                        int n_subways = 0) {
  std::uniform_real_distribution<double> lat(41.0, 42.0);
  std::uniform_real_distribution<double> lon(-88.0, -87.0);
  std::vector<Tract> tracts;
  for (int i = 0; i < n_tracts; ++i) {
    tracts.push_back(Tract{"T" + std::to_string(100 + i), geo::GeoPoint(lat(rng), lon(rng)), 0});
  }
  std::vector<Facility> facilities;
  for (int i = 0; i < n_schools; ++i) {
    facilities.push_back(
        Facility{"S" + std::to_string(100 + i), FacilityKind::School, geo::GeoPoint(lat(rng), lon(rng))});
  }
  for (int i = 0; i < n_hospitals; ++i) {
    facilities.push_back(Facility{"H" + std::to_string(100 + i), FacilityKind::Hospital,
                                  geo::GeoPoint(lat(rng), lon(rng))});
  }
  for (int i = 0; i < n_subways; ++i) {
    facilities.push_back(Facility{"C" + std::to_string(100 + i), FacilityKind::Subway,
                                  geo::GeoPoint(lat(rng), lon(rng))});
  }
  return make_dataset(std::move(tracts), std::move(facilities));
}

using EdgeTriple = std::tuple<std::string, int, std::string>;  // tract id, fac kind, fac id

// Independent construction: exhaustive per-tract full sort over all facilities.
std::set<EdgeTriple> brute_force_edges(const Dataset& ds, const std::set<FacilityKind>& kinds,
                                       int k) {
  std::set<EdgeTriple> out;
  for (const auto& t : ds.tracts) {
    for (auto kind : kinds) {
      std::vector<std::pair<double, std::string>> all;
      for (const auto& f : ds.facilities) {
        if (f.kind == kind) all.emplace_back(geo::distance_km(t.center, f.location), f.id);
      }
      std::sort(all.begin(), all.end());
      for (std::size_t i = 0; i < std::min<std::size_t>(k, all.size()); ++i) {
        out.insert({t.id, static_cast<int>(kind), all[i].second});
      }
    }
  }
  return out;
}

std::set<EdgeTriple> network_edges(const UrbanNetwork& net) {
  std::set<EdgeTriple> out;
  for (const auto& e : net.edges) {
    const NodeRef& a = net.nodes[e.u];
    const NodeRef& b = net.nodes[e.v];
    const NodeRef& tract = a.kind == NodeKind::Tract ? a : b;
    const NodeRef& fac = a.kind == NodeKind::Tract ? b : a;
    out.insert({tract.id, static_cast<int>(fac.kind) - 1, fac.id});
  }
  return out;
}

}  // namespace

TEST_CASE("urban network matches Table-1 Chicago arithmetic") {
  // 782 tracts on a dense grid, 48 hospitals on a coarse grid inside it; every
  // hospital is the top-2 of its surrounding tracts, so all 48 connect.
  std::vector<Tract> tracts;
  int made = 0;
  for (int r = 0; r < 28 && made < 782; ++r) {
    for (int c = 0; c < 28 && made < 782; ++c, ++made) {
      tracts.push_back(Tract{"T" + std::to_string(1000 + made),
                             geo::GeoPoint(41.0 + 0.03 * r, -88.0 + 0.03 * c), made < 155 ? 1 : 0});
    }
  }
  std::vector<Facility> hospitals;
  int h = 0;
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 7 && h < 48; ++c, ++h) {
      hospitals.push_back(Facility{"H" + std::to_string(100 + h), FacilityKind::Hospital,
                                   geo::GeoPoint(41.05 + 0.117 * r, -87.95 + 0.117 * c)});
    }
  }
  auto ds = make_dataset(tracts, hospitals);
  auto net = build_urban_network(ds, {FacilityKind::Hospital}, 2);
  CHECK(net.nodes.size() == 830);   // 155 + 627 + 48
  CHECK(net.edges.size() == 1564);  // (155 + 627) * 2

  auto stats = network_stats(net);
  CHECK(stats.node_count == 830);
  CHECK(stats.edge_count == 1564);
  CHECK(stats.nodes_by_kind[0] == 782);
  CHECK(stats.nodes_by_kind[2] == 48);
}

TEST_CASE("fewer facilities than k connects to all of them") {
  auto ds = make_dataset({Tract{"T1", geo::GeoPoint(41.0, -87.0), 1}},
                         {Facility{"S1", FacilityKind::School, geo::GeoPoint(41.1, -87.1)}});
  auto net = build_urban_network(ds, {FacilityKind::School}, 2);
  CHECK(net.nodes.size() == 2);
  CHECK(net.edges.size() == 1);
  CHECK(net.edges[0].weight_km ==
        geo::distance_km(geo::GeoPoint(41.0, -87.0), geo::GeoPoint(41.1, -87.1)));
}

TEST_CASE("k-nearest selection matches the brute-force oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_tracts = 1 + static_cast<int>(rng() % 50);
    const int n_schools = 1 + static_cast<int>(rng() % 20);
    const int k = 1 + static_cast<int>(rng() % 10);
    auto ds = random_instance(rng, n_tracts, n_schools);
    auto net = build_urban_network(ds, {FacilityKind::School}, k);
    CHECK(network_edges(net) == brute_force_edges(ds, {FacilityKind::School}, k));
  }
}

TEST_CASE("tie-break prefers ascending facility id") {
  // Two schools exactly equidistant from the tract.
  auto ds = make_dataset({Tract{"T1", geo::GeoPoint(0.0, 0.0), 1}},
                         {Facility{"S2", FacilityKind::School, geo::GeoPoint(0.0, 0.5)},
                          Facility{"S1", FacilityKind::School, geo::GeoPoint(0.0, -0.5)},
                          Facility{"S3", FacilityKind::School, geo::GeoPoint(0.0, 0.5)}});
  auto net = build_urban_network(ds, {FacilityKind::School}, 2);
  auto edges = network_edges(net);
  CHECK(edges.count({"T1", static_cast<int>(FacilityKind::School), "S1"}) == 1);
  CHECK(edges.count({"T1", static_cast<int>(FacilityKind::School), "S2"}) == 1);
  CHECK(edges.count({"T1", static_cast<int>(FacilityKind::School), "S3"}) == 0);
}

TEST_CASE("increasing k never removes an edge") {
  std::mt19937_64 rng(7);
  auto ds = random_instance(rng, 20, 12, 6, 4);
  std::set<FacilityKind> kinds{FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway};
  std::set<EdgeTriple> prev;
  for (int k = 1; k <= 10; ++k) {
    auto net = build_urban_network(ds, kinds, k);
    auto edges = network_edges(net);
    for (const auto& e : prev) CHECK(edges.count(e) == 1);
    prev = std::move(edges);
  }
}

TEST_CASE("algorithm-1 output is tract-facility bipartite") {
  std::mt19937_64 rng(11);
  auto ds = random_instance(rng, 25, 8, 5, 3);
  auto net = build_urban_network(
      ds, {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway}, 2);
  for (const auto& e : net.edges) {
    const bool u_tract = net.nodes[e.u].kind == NodeKind::Tract;
    const bool v_tract = net.nodes[e.v].kind == NodeKind::Tract;
    CHECK(u_tract != v_tract);
    CHECK(e.weight_km > 0.0);
    CHECK(e.weight_km == geo::distance_km(net.coords[e.u], net.coords[e.v]));
  }
  // Every tract has degree sum(min(k, |P|)).
  auto stats = network_stats(net);
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i) {
    if (net.nodes[i].kind == NodeKind::Tract) CHECK(net.degree(i) == 6);
  }
  CHECK(stats.nodes_by_kind[0] == 25);
}

TEST_CASE("requesting a kind with zero facilities fails") {
  auto ds = make_dataset({Tract{"T1", geo::GeoPoint(41.0, -87.0), 1}},
                         {Facility{"S1", FacilityKind::School, geo::GeoPoint(41.1, -87.1)}});
  CHECK_THROWS_AS(build_urban_network(ds, {FacilityKind::Hospital}, 2), NoFacilities);
}

TEST_CASE("proximity graph on three collinear nodes") {
  // Roughly 1 km spacing along a meridian; the middle node is nearest to both ends.
  auto ds = make_dataset({Tract{"T1", geo::GeoPoint(0.0, 0.0), 1},
                          Tract{"T2", geo::GeoPoint(0.009, 0.0), 0}},
                         {Facility{"S1", FacilityKind::School, geo::GeoPoint(0.018, 0.0)}});
  auto net = build_proximity_graph(ds, {FacilityKind::School}, 1);
  REQUIRE(net.nodes.size() == 3);
  CHECK(net.edges.size() == 2);
  auto t1 = *net.index_of(NodeRef{NodeKind::Tract, "T1"});
  auto t2 = *net.index_of(NodeRef{NodeKind::Tract, "T2"});
  auto s1 = *net.index_of(NodeRef{NodeKind::School, "S1"});
  std::set<std::pair<int, int>> got;
  for (const auto& e : net.edges) got.insert({e.u, e.v});
  std::set<std::pair<int, int>> want{{std::min(t1, t2), std::max(t1, t2)},
                                     {std::min(t2, s1), std::max(t2, s1)}};
  CHECK(got == want);
}

TEST_CASE("proximity graph with k_adj >= n-1 is complete") {
  std::mt19937_64 rng(3);
  auto ds = random_instance(rng, 4, 2);
  auto net = build_proximity_graph(ds, {FacilityKind::School}, 5);
  CHECK(net.edges.size() == 6 * 5 / 2);
}

TEST_CASE("proximity adjacency is symmetric") {
  std::mt19937_64 rng(17);
  auto ds = random_instance(rng, 30, 10, 4, 4);
  auto net = build_proximity_graph(
      ds, {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway}, 3);
  for (int u = 0; u < static_cast<int>(net.nodes.size()); ++u) {
    for (const auto& [v, w] : net.adj[u]) {
      bool found = false;
      for (const auto& [bv, bw] : net.adj[v]) {
        if (bv == u) {
          found = true;
          CHECK(bw == w);
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("hop counts on hand-built graphs") {
  SUBCASE("tract adjacent to a school has hops_school = 1") {
    auto ds = make_dataset({Tract{"T1", geo::GeoPoint(0.0, 0.0), 1}},
                           {Facility{"S1", FacilityKind::School, geo::GeoPoint(0.01, 0.0)}});
    auto net = build_proximity_graph(ds, {FacilityKind::School}, 1);
    auto hops = hop_counts(net, ds);
    CHECK(hops.for_tract("T1")->at(0) == 1);
    CHECK(hops.for_tract("T1")->at(1) == -1);  // no hospitals anywhere
  }
  SUBCASE("line graph tract-tract-hospital gives hops_hospital = 2") {
    auto ds = make_dataset({Tract{"T1", geo::GeoPoint(0.0, 0.0), 1},
                            Tract{"T2", geo::GeoPoint(0.009, 0.0), 0}},
                           {Facility{"H1", FacilityKind::Hospital, geo::GeoPoint(0.018, 0.0)}});
    auto net = build_proximity_graph(ds, {FacilityKind::Hospital}, 1);
    auto hops = hop_counts(net, ds);
    CHECK(hops.for_tract("T1")->at(1) == 2);
    CHECK(hops.for_tract("T2")->at(1) == 1);
  }
  SUBCASE("unreachable facility kind reports the -1 sentinel") {
    // Hand-built disconnected graph: two tracts linked to each other only.
    UrbanNetwork net;
    net.nodes = {NodeRef{NodeKind::Tract, "T1"}, NodeRef{NodeKind::Tract, "T2"},
                 NodeRef{NodeKind::School, "S1"}};
    std::sort(net.nodes.begin(), net.nodes.end());
    net.coords = {geo::GeoPoint(0, 0), geo::GeoPoint(0, 0), geo::GeoPoint(0, 0)};
    net.adj.assign(3, {});
    auto t1 = *net.index_of(NodeRef{NodeKind::Tract, "T1"});
    auto t2 = *net.index_of(NodeRef{NodeKind::Tract, "T2"});
    net.edges = {{std::min(t1, t2), std::max(t1, t2), 1.0}};
    net.adj[t1].emplace_back(t2, 1.0);
    net.adj[t2].emplace_back(t1, 1.0);
    auto ds = make_dataset({Tract{"T1", geo::GeoPoint(0, 0), 1}, Tract{"T2", geo::GeoPoint(0, 0.01), 0}},
                           {Facility{"S1", FacilityKind::School, geo::GeoPoint(0, 0.02)}});
    auto hops = hop_counts(net, ds);
    CHECK(hops.for_tract("T1")->at(0) == -1);
    CHECK(hops.for_tract("T2")->at(0) == -1);
  }
}

TEST_CASE("hop counts equal a BFS oracle on random proximity graphs") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto ds = random_instance(rng, 10 + static_cast<int>(rng() % 40),
                              2 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 4),
                              1 + static_cast<int>(rng() % 4));
    auto net = build_proximity_graph(
        ds, {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway},
        1 + static_cast<int>(rng() % 4));
    auto hops = hop_counts(net, ds);

    // Oracle: per-tract BFS from the tract node outward.
    for (std::size_t ti = 0; ti < ds.tracts.size(); ++ti) {
      const int start = *net.index_of(NodeRef{NodeKind::Tract, ds.tracts[ti].id});
      std::vector<int> dist(net.nodes.size(), -1);
      std::vector<int> queue{start};
      dist[start] = 0;
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int u = queue[qi];
        for (const auto& [v, w] : net.adj[u]) {
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            queue.push_back(v);
          }
        }
      }
      std::array<int, 3> want{-1, -1, -1};
      for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto kind = net.nodes[i].kind;
        if (kind == NodeKind::Tract || dist[i] < 0) continue;
        int& slot = want[static_cast<int>(kind) - 1];
        if (slot < 0 || dist[i] < slot) slot = dist[i];
      }
      CHECK(hops.hops[ti] == want);
    }
  }
}

TEST_CASE("empty kinds set yields zero edges") {
  std::mt19937_64 rng(5);
  auto ds = random_instance(rng, 5, 3);
  auto net = build_urban_network(ds, {}, 2);
  CHECK(net.edges.empty());
  CHECK(network_stats(net).edge_count == 0);
  CHECK(net.nodes.size() == 5);  // facilities appear only when connected
}

TEST_CASE("network export is byte-identical across runs") {
  namespace fs = std::filesystem;
  std::mt19937_64 rng(31);
  auto ds = random_instance(rng, 12, 5, 3, 2);
  auto net = build_urban_network(
      ds, {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway}, 2);
  auto dir = fs::temp_directory_path() / "urbannet_net_export";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  write_network_csv(net, ds, (dir / "n1.csv").string(), (dir / "e1.csv").string(), {"hdr"});
  write_network_csv(net, ds, (dir / "n2.csv").string(), (dir / "e2.csv").string(), {"hdr"});
  CHECK(slurp(dir / "n1.csv") == slurp(dir / "n2.csv"));
  CHECK(slurp(dir / "e1.csv") == slurp(dir / "e2.csv"));
  CHECK(slurp(dir / "e1.csv").substr(0, 2) == "# ");
}
