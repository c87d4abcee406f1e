#include "urbannet/network.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "urbannet/util.hpp"

namespace urbannet::network {

NodeKind node_kind_of(ingest::FacilityKind k) {
  switch (k) {
    case ingest::FacilityKind::School: return NodeKind::School;
    case ingest::FacilityKind::Hospital: return NodeKind::Hospital;
    case ingest::FacilityKind::Subway: return NodeKind::Subway;
  }
  return NodeKind::School;
}

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Tract: return "tract";
    case NodeKind::School: return "school";
    case NodeKind::Hospital: return "hospital";
    case NodeKind::Subway: return "subway";
  }
  return "?";
}

std::optional<int> UrbanNetwork::index_of(const NodeRef& ref) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), ref);
  if (it != nodes.end() && *it == ref) return static_cast<int>(it - nodes.begin());
  return std::nullopt;
}

namespace {

/// Assembles the final sorted-node network from a node list and an edge set
/// keyed by node identity. Self-loops are rejected; duplicate undirected edges
/// collapse to one.
UrbanNetwork finalize(std::vector<std::pair<NodeRef, geo::GeoPoint>> node_list,
                      std::map<std::pair<NodeRef, NodeRef>, double> edge_set) {
  std::sort(node_list.begin(), node_list.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  UrbanNetwork net;
  net.nodes.reserve(node_list.size());
  net.coords.reserve(node_list.size());
  std::map<NodeRef, int> index;
  for (auto& [ref, pt] : node_list) {
    index.emplace(ref, static_cast<int>(net.nodes.size()));
    net.nodes.push_back(ref);
    net.coords.push_back(pt);
  }

  net.adj.assign(net.nodes.size(), {});
  for (const auto& [key, w] : edge_set) {
    int u = index.at(key.first);
    int v = index.at(key.second);
    if (u > v) std::swap(u, v);
    net.edges.push_back({u, v, w});
  }
  std::sort(net.edges.begin(), net.edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (const auto& e : net.edges) {
    net.adj[e.u].emplace_back(e.v, e.weight_km);
    net.adj[e.v].emplace_back(e.u, e.weight_km);
  }
  for (auto& row : net.adj) std::sort(row.begin(), row.end());
  return net;
}

std::pair<NodeRef, NodeRef> edge_key(NodeRef a, NodeRef b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

}  // namespace

UrbanNetwork build_urban_network(const ingest::Dataset& dataset,
                                 const std::set<ingest::FacilityKind>& kinds, int k) {
  if (k < 1 || k > 10) throw ConfigError("k must be in 1..10, got " + std::to_string(k));
  for (auto kind : kinds) {
    if (dataset.facilities_of(kind).empty()) throw NoFacilities(ingest::facility_kind_name(kind));
  }

  std::vector<std::pair<NodeRef, geo::GeoPoint>> node_list;
  std::map<std::pair<NodeRef, NodeRef>, double> edge_set;
  std::set<std::string> connected;  // facility "kind/id" keys already added

  for (const auto& t : dataset.tracts) {
    node_list.push_back({NodeRef{NodeKind::Tract, t.id}, t.center});
  }

  for (const auto& t : dataset.tracts) {
    const NodeRef tract_ref{NodeKind::Tract, t.id};
    for (auto kind : kinds) {
      auto facilities = dataset.facilities_of(kind);
      // Full sort by (distance, id): ties break to the lexicographically
      // smaller facility id.
      std::vector<std::pair<double, const ingest::Facility*>> dist;
      dist.reserve(facilities.size());
      for (const auto* f : facilities) {
        dist.emplace_back(geo::distance_km(t.center, f->location), f);
      }
      std::sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second->id < b.second->id;
      });
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
      for (std::size_t i = 0; i < take; ++i) {
        const auto* f = dist[i].second;
        const NodeRef fac_ref{node_kind_of(kind), f->id};
        const std::string key = std::string(node_kind_name(fac_ref.kind)) + "/" + f->id;
        if (connected.insert(key).second) {
          node_list.push_back({fac_ref, f->location});
        }
        edge_set.emplace(edge_key(tract_ref, fac_ref), dist[i].first);
      }
    }
  }
  return finalize(std::move(node_list), std::move(edge_set));
}

UrbanNetwork build_proximity_graph(const ingest::Dataset& dataset,
                                   const std::set<ingest::FacilityKind>& kinds, int k_adj) {
  if (k_adj < 1) throw ConfigError("k_adj must be >= 1");

  std::vector<std::pair<NodeRef, geo::GeoPoint>> node_list;
  for (const auto& t : dataset.tracts) {
    node_list.push_back({NodeRef{NodeKind::Tract, t.id}, t.center});
  }
  for (const auto& f : dataset.facilities) {
    if (kinds.count(f.kind)) {
      node_list.push_back({NodeRef{node_kind_of(f.kind), f.id}, f.location});
    }
  }
  if (node_list.size() < 2) throw TooFewSamples("proximity graph needs at least 2 nodes");

  // Directed kNN per node, then symmetrized by the shared edge set.
  std::map<std::pair<NodeRef, NodeRef>, double> edge_set;
  for (std::size_t i = 0; i < node_list.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(node_list.size() - 1);
    for (std::size_t j = 0; j < node_list.size(); ++j) {
      if (j == i) continue;
      dist.emplace_back(geo::distance_km(node_list[i].second, node_list[j].second), j);
    }
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_adj), dist.size());
    std::partial_sort(dist.begin(), dist.begin() + take, dist.end(),
                      [&](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first < b.first;
                        return node_list[a.second].first < node_list[b.second].first;
                      });
    for (std::size_t s = 0; s < take; ++s) {
      edge_set.emplace(edge_key(node_list[i].first, node_list[dist[s].second].first),
                       dist[s].first);
    }
  }
  return finalize(std::move(node_list), std::move(edge_set));
}

HopFeatures hop_counts(const UrbanNetwork& proximity, const ingest::Dataset& dataset) {
  const int n = static_cast<int>(proximity.nodes.size());

  // One multi-source BFS per facility kind gives every tract's hop distance to
  // the nearest facility of that kind.
  std::array<std::vector<int>, 3> dist_by_kind;
  for (int kind_idx = 0; kind_idx < 3; ++kind_idx) {
    const NodeKind kind = static_cast<NodeKind>(kind_idx + 1);
    std::vector<int>& dist = dist_by_kind[kind_idx];
    dist.assign(n, -1);
    std::deque<int> queue;
    for (int i = 0; i < n; ++i) {
      if (proximity.nodes[i].kind == kind) {
        dist[i] = 0;
        queue.push_back(i);
      }
    }
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& [v, w] : proximity.adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }

  HopFeatures out;
  for (const auto& t : dataset.tracts) {
    auto idx = proximity.index_of(NodeRef{NodeKind::Tract, t.id});
    if (!idx) throw ShapeMismatch("tract " + t.id + " missing from proximity graph");
    out.tract_ids.push_back(t.id);
    std::array<int, 3> h{};
    for (int kind_idx = 0; kind_idx < 3; ++kind_idx) {
      h[kind_idx] = dist_by_kind[kind_idx][*idx];
    }
    out.hops.push_back(h);
  }
  return out;
}

std::optional<std::array<int, 3>> HopFeatures::for_tract(const std::string& id) const {
  for (std::size_t i = 0; i < tract_ids.size(); ++i) {
    if (tract_ids[i] == id) return hops[i];
  }
  return std::nullopt;
}

NetworkStats network_stats(const UrbanNetwork& net) {
  NetworkStats s;
  s.node_count = static_cast<int>(net.nodes.size());
  s.edge_count = static_cast<int>(net.edges.size());
  for (const auto& node : net.nodes) {
    ++s.nodes_by_kind[static_cast<int>(node.kind)];
  }
  for (int i = 0; i < s.node_count; ++i) {
    ++s.degree_histogram[net.degree(i)];
  }
  std::vector<int> comp(s.node_count, -1);
  for (int i = 0; i < s.node_count; ++i) {
    if (comp[i] >= 0) continue;
    int size = 0;
    std::deque<int> queue{i};
    comp[i] = s.connected_components;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      ++size;
      for (const auto& [v, w] : net.adj[u]) {
        if (comp[v] < 0) {
          comp[v] = s.connected_components;
          queue.push_back(v);
        }
      }
    }
    s.largest_component = std::max(s.largest_component, size);
    ++s.connected_components;
  }
  return s;
}

std::string NetworkStats::to_text() const {
  std::ostringstream out;
  out << "nodes " << node_count << " (tract " << nodes_by_kind[0] << ", school " << nodes_by_kind[1]
      << ", hospital " << nodes_by_kind[2] << ", subway " << nodes_by_kind[3] << ")\n";
  out << "edges " << edge_count << "\n";
  out << "components " << connected_components << " (largest " << largest_component << ")\n";
  out << "degree histogram:\n";
  for (const auto& [deg, cnt] : degree_histogram) {
    out << "  " << deg << ": " << cnt << "\n";
  }
  return out.str();
}

void write_network_csv(const UrbanNetwork& net, const ingest::Dataset& dataset,
                       const std::string& nodes_path, const std::string& edges_path,
                       const std::vector<std::string>& comment) {
  std::unordered_map<std::string, const ingest::Tract*> tract_by_id;
  for (const auto& t : dataset.tracts) tract_by_id.emplace(t.id, &t);

  std::ofstream nodes_out(nodes_path);
  if (!nodes_out) throw Error("cannot write file: " + nodes_path);
  for (const auto& c : comment) nodes_out << "# " << c << "\n";
  nodes_out << "kind,id,lat,lon,label\n";
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& node = net.nodes[i];
    std::string label = "NA";
    if (node.kind == NodeKind::Tract) {
      auto it = tract_by_id.find(node.id);
      if (it != tract_by_id.end() && it->second->label) label = std::to_string(*it->second->label);
    }
    nodes_out << node_kind_name(node.kind) << ',' << node.id << ','
              << util::format_double(net.coords[i].lat()) << ','
              << util::format_double(net.coords[i].lon()) << ',' << label << '\n';
  }

  std::ofstream edges_out(edges_path);
  if (!edges_out) throw Error("cannot write file: " + edges_path);
  for (const auto& c : comment) edges_out << "# " << c << "\n";
  edges_out << "src_kind,src_id,dst_kind,dst_id,weight_km\n";
  for (const auto& e : net.edges) {
    edges_out << node_kind_name(net.nodes[e.u].kind) << ',' << net.nodes[e.u].id << ','
              << node_kind_name(net.nodes[e.v].kind) << ',' << net.nodes[e.v].id << ','
              << util::format_double(e.weight_km) << '\n';
  }
}

}  // namespace urbannet::network
