#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msi/ingest.hpp"
#include "msi/stats.hpp"

namespace msi::netcomm {

// Undirected weighted graph in CSR form (each edge stored in both rows).
struct UndirectedGraph {
  size_t n = 0;
  std::vector<size_t> offsets;
  std::vector<uint32_t> neighbors;
  std::vector<double> weights;
  std::vector<double> degree;  // weighted degree per node
  double total_weight = 0.0;   // m: sum over undirected edges (each once)

  static UndirectedGraph from_edges(
      size_t n, std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> edges);
};

// w_uv = w(u->v) + w(v->u).
UndirectedGraph symmetrize(const ingest::RetweetGraph& graph);

struct CommunityPartition {
  std::vector<uint32_t> assignment;  // node -> community, ids 0..C-1 by
                                     // descending community size
  double modularity = 0.0;
  std::vector<size_t> community_sizes;
  double resolution = 1.0;
  uint64_t seed = 0;
  size_t passes = 0;

  size_t community_count() const { return community_sizes.size(); }
};

struct LouvainOptions {
  double resolution = 1.0;
  uint64_t seed = 1;
  size_t max_passes = 64;
  double min_gain = 1e-9;  // pass-level modularity improvement threshold
};

// Blondel et al. (2008) heuristic: seeded local-move sweeps followed by
// graph aggregation, repeated until a pass improves modularity by no more
// than min_gain. Deterministic for a fixed (graph, resolution, seed).
CommunityPartition louvain(const UndirectedGraph& graph,
                           const LouvainOptions& opts = {});

// Q = sum_c [ e_c/m - resolution * (a_c/(2m))^2 ].
double modularity(const UndirectedGraph& graph,
                  std::span<const uint32_t> assignment,
                  double resolution = 1.0);

struct CommunityProfile {
  uint32_t community = 0;
  size_t size = 0;
  double fraction = 0.0;
  double mean_msi = 0.0;  // NaN when no member has a score
  double mean_iv = 0.0;
  size_t msi_members = 0, msi_skipped = 0;
  size_t iv_members = 0, iv_skipped = 0;
  stats::DensityCurve msi_density;
  stats::DensityCurve iv_density;
};

// KDE profiles of member MSI / IV for the top_n largest communities.
// Members missing a score are skipped and counted.
std::vector<CommunityProfile> profile_communities(
    const CommunityPartition& partition,
    const std::vector<std::string>& node_ids,
    const std::unordered_map<std::string, double>& user_msi,
    const std::unordered_map<std::string, double>& user_iv, size_t top_n = 2,
    double bandwidth = 0.15, size_t grid_points = 512);

}  // namespace msi::netcomm
