#include "msi/netcomm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msi/common.hpp"
#include "msi/rng.hpp"

namespace msi::netcomm {

UndirectedGraph UndirectedGraph::from_edges(
    size_t n,
    std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> edges) {
  // normalize to (min,max), accumulate duplicates
  for (auto& e : edges)
    if (e.first.first > e.first.second)
      std::swap(e.first.first, e.first.second);
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> merged;
  for (size_t p = 0; p < edges.size();) {
    size_t q = p;
    double w = 0.0;
    while (q < edges.size() && edges[q].first == edges[p].first) w += edges[q++].second;
    if (edges[p].first.first != edges[p].first.second)  // drop self-loops
      merged.push_back({edges[p].first, w});
    p = q;
  }

  UndirectedGraph g;
  g.n = n;
  g.offsets.assign(n + 1, 0);
  for (const auto& e : merged) {
    ++g.offsets[e.first.first + 1];
    ++g.offsets[e.first.second + 1];
  }
  for (size_t i = 1; i <= n; ++i) g.offsets[i] += g.offsets[i - 1];
  g.neighbors.resize(merged.size() * 2);
  g.weights.resize(merged.size() * 2);
  std::vector<size_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& e : merged) {
    auto [u, v] = e.first;
    g.neighbors[cursor[u]] = v;
    g.weights[cursor[u]++] = e.second;
    g.neighbors[cursor[v]] = u;
    g.weights[cursor[v]++] = e.second;
  }
  g.degree.assign(n, 0.0);
  for (size_t u = 0; u < n; ++u)
    for (size_t p = g.offsets[u]; p < g.offsets[u + 1]; ++p)
      g.degree[u] += g.weights[p];
  g.total_weight = 0.0;
  for (const auto& e : merged) g.total_weight += e.second;
  return g;
}

UndirectedGraph symmetrize(const ingest::RetweetGraph& graph) {
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> edges;
  edges.reserve(graph.edge_count());
  for (uint32_t u = 0; u < graph.node_count(); ++u)
    for (size_t p = graph.offsets[u]; p < graph.offsets[u + 1]; ++p)
      edges.push_back({{u, graph.targets[p]}, graph.weights[p]});
  return UndirectedGraph::from_edges(graph.node_count(), std::move(edges));
}

double modularity(const UndirectedGraph& graph,
                  std::span<const uint32_t> assignment, double resolution) {
  if (assignment.size() != graph.n)
    throw DataError("modularity: assignment does not cover all nodes");
  if (graph.n == 0) return 0.0;
  uint32_t max_c = 0;
  for (uint32_t c : assignment) max_c = std::max(max_c, c);

  std::vector<double> internal(max_c + 1, 0.0), tot(max_c + 1, 0.0);
  for (size_t u = 0; u < graph.n; ++u) {
    tot[assignment[u]] += graph.degree[u];
    for (size_t p = graph.offsets[u]; p < graph.offsets[u + 1]; ++p) {
      const uint32_t v = graph.neighbors[p];
      if (assignment[u] == assignment[v]) internal[assignment[u]] += graph.weights[p];
    }
  }
  const double two_m = 2.0 * graph.total_weight;
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (size_t c = 0; c <= max_c; ++c) {
    const double frac = tot[c] / two_m;
    q += internal[c] / two_m - resolution * frac * frac;
  }
  return q;
}

namespace {

// Working graph during aggregation. Self-loops are stored once per row with
// doubled weight, so a plain row sum is the weighted degree and the sum of
// same-community entries is 2 * e_c.
struct WorkGraph {
  size_t n = 0;
  std::vector<size_t> offsets;
  std::vector<uint32_t> neighbors;
  std::vector<double> weights;
  std::vector<double> degree;
  double two_m = 0.0;
};

WorkGraph to_work(const UndirectedGraph& g) {
  WorkGraph w;
  w.n = g.n;
  w.offsets = g.offsets;
  w.neighbors = g.neighbors;
  w.weights = g.weights;
  w.degree = g.degree;
  w.two_m = 2.0 * g.total_weight;
  return w;
}

double work_modularity(const WorkGraph& g, const std::vector<uint32_t>& comm,
                       double resolution) {
  uint32_t max_c = 0;
  for (uint32_t c : comm) max_c = std::max(max_c, c);
  std::vector<double> internal(max_c + 1, 0.0), tot(max_c + 1, 0.0);
  for (size_t u = 0; u < g.n; ++u) {
    tot[comm[u]] += g.degree[u];
    for (size_t p = g.offsets[u]; p < g.offsets[u + 1]; ++p) {
      const uint32_t v = g.neighbors[p];
      if (v == uint32_t(u))
        internal[comm[u]] += g.weights[p];  // stored doubled
      else if (comm[u] == comm[v])
        internal[comm[u]] += g.weights[p];
    }
  }
  double q = 0.0;
  for (size_t c = 0; c <= max_c; ++c) {
    const double frac = tot[c] / g.two_m;
    q += internal[c] / g.two_m - resolution * frac * frac;
  }
  return q;
}

// One local-move phase: repeated seeded sweeps until a sweep moves nothing.
// Candidates are evaluated as (current community first, then neighbor
// communities in adjacency order); a move happens only on strictly larger
// gain, so the first community achieving the maximum wins.
std::vector<uint32_t> local_moves(const WorkGraph& g, double resolution,
                                  Rng& rng) {
  std::vector<uint32_t> comm(g.n);
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<double> tot(g.degree);  // community degree sums

  std::vector<uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> cand_w(g.n, 0.0);
  std::vector<uint32_t> touched;

  const double inv_two_m = 1.0 / g.two_m;
  for (size_t sweep = 0; sweep < 100; ++sweep) {
    // Fisher-Yates reshuffle each sweep, all driven by the caller's rng.
    for (size_t i = g.n; i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);

    size_t moved = 0;
    for (uint32_t u : order) {
      const uint32_t old_c = comm[u];
      const double k_u = g.degree[u];

      touched.clear();
      double self_w = 0.0;
      for (size_t p = g.offsets[u]; p < g.offsets[u + 1]; ++p) {
        const uint32_t v = g.neighbors[p];
        if (v == u) {
          self_w += g.weights[p];
          continue;
        }
        const uint32_t c = comm[v];
        if (cand_w[c] == 0.0 && c != old_c) touched.push_back(c);
        cand_w[c] += g.weights[p];
      }
      (void)self_w;  // stays with u wherever it goes; no effect on gains

      tot[old_c] -= k_u;
      const double stay_gain =
          cand_w[old_c] - resolution * tot[old_c] * k_u * inv_two_m;
      double best_gain = stay_gain;
      uint32_t best_c = old_c;
      for (uint32_t c : touched) {
        const double gain = cand_w[c] - resolution * tot[c] * k_u * inv_two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      tot[best_c] += k_u;
      if (best_c != old_c) {
        comm[u] = best_c;
        ++moved;
      }

      cand_w[old_c] = 0.0;
      for (uint32_t c : touched) cand_w[c] = 0.0;
    }
    if (moved == 0) break;
  }

  // dense renumber by first appearance
  std::vector<uint32_t> remap(g.n, UINT32_MAX);
  uint32_t next = 0;
  for (size_t u = 0; u < g.n; ++u) {
    if (remap[comm[u]] == UINT32_MAX) remap[comm[u]] = next++;
    comm[u] = remap[comm[u]];
  }
  return comm;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<uint32_t>& comm) {
  uint32_t n_comm = 0;
  for (uint32_t c : comm) n_comm = std::max(n_comm, c + 1);

  // members per community (counting sort keeps node order)
  std::vector<size_t> head(n_comm + 1, 0);
  for (uint32_t c : comm) ++head[c + 1];
  for (size_t c = 1; c <= n_comm; ++c) head[c] += head[c - 1];
  std::vector<uint32_t> members(g.n);
  {
    std::vector<size_t> cursor(head.begin(), head.end() - 1);
    for (uint32_t u = 0; u < g.n; ++u) members[cursor[comm[u]]++] = u;
  }

  WorkGraph out;
  out.n = n_comm;
  out.two_m = g.two_m;
  out.offsets.assign(n_comm + 1, 0);
  out.degree.assign(n_comm, 0.0);

  std::vector<double> acc(n_comm, 0.0);
  std::vector<uint32_t> touched;
  std::vector<std::pair<uint32_t, double>> row;
  for (uint32_t c = 0; c < n_comm; ++c) {
    touched.clear();
    double self = 0.0;
    for (size_t mi = head[c]; mi < head[c + 1]; ++mi) {
      const uint32_t u = members[mi];
      for (size_t p = g.offsets[u]; p < g.offsets[u + 1]; ++p) {
        const uint32_t v = g.neighbors[p];
        if (v == u) {
          self += g.weights[p];  // already doubled
          continue;
        }
        const uint32_t cv = comm[v];
        if (cv == c) {
          self += g.weights[p];  // both directions seen -> doubled
        } else {
          if (acc[cv] == 0.0) touched.push_back(cv);
          acc[cv] += g.weights[p];
        }
      }
    }
    row.clear();
    if (self != 0.0) row.push_back({c, self});
    std::sort(touched.begin(), touched.end());
    for (uint32_t cv : touched) {
      row.push_back({cv, acc[cv]});
      acc[cv] = 0.0;
    }
    out.offsets[c + 1] = out.offsets[c] + row.size();
    for (auto& [v, w] : row) {
      out.neighbors.push_back(v);
      out.weights.push_back(w);
      out.degree[c] += w;
    }
  }
  return out;
}

}  // namespace

CommunityPartition louvain(const UndirectedGraph& graph,
                           const LouvainOptions& opts) {
  if (graph.n == 0) throw DataError("louvain: empty graph");
  if (graph.total_weight <= 0.0)
    throw DataError("louvain: graph has no edge weight");

  WorkGraph work = to_work(graph);
  std::vector<uint32_t> flat(graph.n);
  std::iota(flat.begin(), flat.end(), 0);

  std::vector<uint32_t> singleton(work.n);
  std::iota(singleton.begin(), singleton.end(), 0);
  double q_prev = work_modularity(work, singleton, opts.resolution);

  size_t passes = 0;
  for (; passes < opts.max_passes; ++passes) {
    Rng rng(Rng::mix(opts.seed, passes));
    std::vector<uint32_t> comm = local_moves(work, opts.resolution, rng);
    const double q_after = work_modularity(work, comm, opts.resolution);
    if (q_after - q_prev <= opts.min_gain) break;
    q_prev = q_after;
    for (uint32_t& f : flat) f = comm[f];
    work = aggregate(work, comm);
    if (work.n == 1) {
      ++passes;
      break;
    }
  }

  // community ids by descending size, ties by previous id
  uint32_t n_comm = 0;
  for (uint32_t c : flat) n_comm = std::max(n_comm, c + 1);
  std::vector<size_t> sizes(n_comm, 0);
  for (uint32_t c : flat) ++sizes[c];
  std::vector<uint32_t> order(n_comm);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return sizes[a] > sizes[b];
  });
  std::vector<uint32_t> rank(n_comm);
  for (uint32_t i = 0; i < n_comm; ++i) rank[order[i]] = i;

  CommunityPartition part;
  part.assignment.resize(graph.n);
  for (size_t u = 0; u < graph.n; ++u) part.assignment[u] = rank[flat[u]];
  part.community_sizes.resize(n_comm);
  for (uint32_t i = 0; i < n_comm; ++i) part.community_sizes[i] = sizes[order[i]];
  part.modularity = q_prev;
  part.resolution = opts.resolution;
  part.seed = opts.seed;
  part.passes = passes;
  return part;
}

std::vector<CommunityProfile> profile_communities(
    const CommunityPartition& partition,
    const std::vector<std::string>& node_ids,
    const std::unordered_map<std::string, double>& user_msi,
    const std::unordered_map<std::string, double>& user_iv, size_t top_n,
    double bandwidth, size_t grid_points) {
  if (partition.assignment.size() != node_ids.size())
    throw DataError("profile_communities: partition/node id size mismatch");
  if (!(bandwidth > 0.0))
    throw DataError("profile_communities: bandwidth must be > 0");

  const size_t n_comm = partition.community_count();
  const size_t take = std::min(top_n, n_comm);
  std::vector<CommunityProfile> profiles(take);
  const double n_nodes = double(node_ids.size());

  for (size_t c = 0; c < take; ++c) {
    profiles[c].community = uint32_t(c);
    profiles[c].size = partition.community_sizes[c];
    profiles[c].fraction = double(partition.community_sizes[c]) / n_nodes;
  }

  std::vector<std::vector<double>> msi_vals(take), iv_vals(take);
  for (size_t u = 0; u < node_ids.size(); ++u) {
    const uint32_t c = partition.assignment[u];
    if (c >= take) continue;
    auto m = user_msi.find(node_ids[u]);
    if (m != user_msi.end())
      msi_vals[c].push_back(m->second);
    else
      ++profiles[c].msi_skipped;
    auto v = user_iv.find(node_ids[u]);
    if (v != user_iv.end())
      iv_vals[c].push_back(v->second);
    else
      ++profiles[c].iv_skipped;
  }

  auto summarize = [&](const std::vector<double>& vals, double& mean,
                       size_t& count, stats::DensityCurve& density) {
    count = vals.size();
    if (vals.empty()) {
      mean = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double s = 0.0;
    for (double v : vals) s += v;
    mean = s / double(vals.size());
    density = stats::kde_1d(vals, bandwidth,
                            stats::default_grid(vals, bandwidth, grid_points));
  };

  for (size_t c = 0; c < take; ++c) {
    summarize(msi_vals[c], profiles[c].mean_msi, profiles[c].msi_members,
              profiles[c].msi_density);
    summarize(iv_vals[c], profiles[c].mean_iv, profiles[c].iv_members,
              profiles[c].iv_density);
  }
  return profiles;
}

}  // namespace msi::netcomm
