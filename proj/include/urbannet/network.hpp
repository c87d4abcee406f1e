#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "urbannet/geo.hpp"
#include "urbannet/ingest.hpp"

namespace urbannet::network {

/// Node kinds in one-hot order: tract, school, hospital, subway.
enum class NodeKind { Tract = 0, School = 1, Hospital = 2, Subway = 3 };

NodeKind node_kind_of(ingest::FacilityKind k);
const char* node_kind_name(NodeKind k);

struct NodeRef {
  NodeKind kind;
  std::string id;

  friend bool operator==(const NodeRef& a, const NodeRef& b) {
    return a.kind == b.kind && a.id == b.id;
  }
  friend bool operator<(const NodeRef& a, const NodeRef& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.id < b.id;
  }
};

/// Heterogeneous undirected weighted graph of tracts and facilities.
/// Nodes are stored sorted by (kind, id); edges by (u, v) with u < v.
/// Immutable after construction.
struct UrbanNetwork {
  struct Edge {
    int u;
    int v;
    double weight_km;
  };

  std::vector<NodeRef> nodes;
  std::vector<geo::GeoPoint> coords;                        // aligned with nodes
  std::vector<Edge> edges;
  std::vector<std::vector<std::pair<int, double>>> adj;     // neighbor index, weight

  std::optional<int> index_of(const NodeRef& ref) const;
  int degree(int node) const { return static_cast<int>(adj[node].size()); }
};

/// Urban network construction: each tract gains edges to the min(k, |P|)
/// closest facilities of every requested kind P; distance ties break by
/// ascending facility id. Facility nodes appear only once connected.
UrbanNetwork build_urban_network(const ingest::Dataset& dataset,
                                 const std::set<ingest::FacilityKind>& kinds, int k);

/// Symmetric k-nearest-neighbor graph over all nodes (tracts plus facilities of
/// the requested kinds together); used for shortest-path hop features.
UrbanNetwork build_proximity_graph(const ingest::Dataset& dataset,
                                   const std::set<ingest::FacilityKind>& kinds, int k_adj);

/// Per-tract shortest-path length in edges to the nearest facility of each
/// kind over a proximity graph; -1 when unreachable.
struct HopFeatures {
  std::vector<std::string> tract_ids;
  std::vector<std::array<int, 3>> hops;  // school, hospital, subway; aligned with tract_ids

  std::optional<std::array<int, 3>> for_tract(const std::string& id) const;
};

HopFeatures hop_counts(const UrbanNetwork& proximity, const ingest::Dataset& dataset);

struct NetworkStats {
  std::array<int, 4> nodes_by_kind{};   // indexed by NodeKind
  int node_count = 0;
  int edge_count = 0;
  std::map<int, int> degree_histogram;  // degree -> node count
  int connected_components = 0;
  int largest_component = 0;

  std::string to_text() const;
};

NetworkStats network_stats(const UrbanNetwork& net);

/// Edge-list and node CSV export in stable id-sorted order (bit-exact across
/// runs). Labels come from the dataset; facilities get NA.
void write_network_csv(const UrbanNetwork& net, const ingest::Dataset& dataset,
                       const std::string& nodes_path, const std::string& edges_path,
                       const std::vector<std::string>& comment = {});

}  // namespace urbannet::network
