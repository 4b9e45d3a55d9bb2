#include "msi/pipeline.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "msi/ca.hpp"
#include "msi/common.hpp"
#include "msi/ideology.hpp"
#include "msi/ingest.hpp"
#include "msi/io.hpp"
#include "msi/kernels.hpp"
#include "msi/netcomm.hpp"
#include "msi/parallel.hpp"
#include "msi/sha256.hpp"
#include "msi/stats.hpp"

namespace msi::pipeline {

using nlohmann::ordered_json;

void RunConfig::validate() const {
  if (top_k < 2) throw DataError("config: top_k must be >= 2");
  if (!(bandwidth > 0.0)) throw DataError("config: bandwidth must be > 0");
  if (convention != "standard" && convention != "paper_literal")
    throw DataError("config: convention must be standard or paper_literal");
  if (svd_k < 1 || svd_k > 3)
    throw DataError("config: svd_k must be between 1 and 3");
  if (grid_points < 2 || grid2d_points < 2)
    throw DataError("config: grids need at least 2 points");
  if (!(resolution > 0.0)) throw DataError("config: resolution must be > 0");
}

void RunConfig::apply_runtime() const {
  set_max_threads(threads);
  kernels::select(kernel);
}

namespace {

// Manifest: parameters + seeds + input digests, enough to replay the stage
// bit-exactly. Environment facts that do not influence artifact bytes
// (thread cap) live in their own section.
class Manifest {
public:
  Manifest(const RunConfig& config, const std::string& command)
      : out_dir_(config.out_dir) {
    j_["artifact_version"] = kArtifactVersion;
    j_["command"] = command;
    j_["environment"] = {{"threads", config.threads},
                         {"kernel", kernels::active_name()}};
  }

  template <typename T>
  void param(const std::string& name, const T& value) {
    j_["parameters"][name] = value;
  }

  void input(const std::string& path) {
    if (path.empty()) return;
    struct stat st;
    if (::stat(path.c_str(), &st) != 0)
      throw DataError("cannot stat input file: " + path);
    j_["inputs"].push_back({{"path", path},
                            {"sha256", Sha256::of_file(path)},
                            {"bytes", size_t(st.st_size)}});
  }

  void output(const std::string& name) { outputs_.push_back(name); }

  std::vector<std::string> write() {
    ordered_json outs = ordered_json::array();
    for (const auto& o : outputs_) outs.push_back(o);
    j_["outputs"] = outs;
    const std::string path = out_dir_ + "/manifest.json";
    write_file(path, j_.dump(2) + "\n");
    std::vector<std::string> files;
    for (const auto& o : outputs_) files.push_back(out_dir_ + "/" + o);
    files.push_back(path);
    return files;
  }

private:
  std::string out_dir_;
  ordered_json j_;
  std::vector<std::string> outputs_;
};

std::set<std::string> load_allowlist(const std::string& path) {
  std::set<std::string> allow;
  for_each_line(path, [&](size_t, std::string_view line) {
    if (!line.empty()) allow.insert(std::string(line));
  });
  if (allow.empty()) throw DataError("allowlist is empty: " + path);
  return allow;
}

struct IngestedCounts {
  ingest::BipartiteCounts counts;
  std::vector<std::string> outlets;
  ingest::ParseStats stats;
  size_t total_events = 0;
};

IngestedCounts ingest_counts(const RunConfig& config) {
  if (config.shares_path.empty())
    throw DataError("no shares file given (--shares)");
  IngestedCounts out;
  ingest::ParseOptions opts;
  opts.strict = config.strict;
  auto events = ingest::parse_shares(config.shares_path, opts, &out.stats);
  out.total_events = events.size();

  std::set<std::string> allow;
  const std::set<std::string>* allow_ptr = nullptr;
  if (!config.allowlist_path.empty()) {
    allow = load_allowlist(config.allowlist_path);
    allow_ptr = &allow;
  }
  out.outlets = ingest::select_top_outlets(events, config.top_k, allow_ptr);
  if (out.outlets.empty()) throw DataError("no outlets selected");
  out.counts = ingest::build_counts(events, out.outlets);
  return out;
}

ordered_json curve_json(const stats::DensityCurve& curve) {
  return {{"bandwidth", curve.bandwidth},
          {"grid", curve.grid},
          {"density", curve.density}};
}

void write_density_csv(const std::string& path,
                       const stats::DensityCurve& curve) {
  FileWriter w(path);
  w.write("x,density\n");
  for (size_t i = 0; i < curve.grid.size(); ++i) {
    w.write_double(curve.grid[i]);
    w.write(",");
    w.write_double(curve.density[i]);
    w.write("\n");
  }
  w.close();
}

}  // namespace

ScoreColumn load_score_column(const std::string& path,
                              const std::string& column, bool allow_empty) {
  ScoreColumn out;
  std::vector<std::string_view> fields;
  size_t col_index = SIZE_MAX;
  size_t n_fields = 0;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    if (col_index == SIZE_MAX && line_no == 1) {
      std::vector<std::string_view> header;
      split_fields(line, SIZE_MAX, header);  // count unknown: just split
      n_fields = header.size();
      for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) col_index = i;
      if (col_index == SIZE_MAX)
        throw DataError(path + ": no column named '" + column + "'");
      if (header[0] != "user_id" && header[0] != "outlet_id")
        throw DataError(path + ": first column must be an id column");
      return;
    }
    if (line.empty()) return;
    if (!split_fields(line, n_fields, fields))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed row");
    auto value = parse_double(fields[col_index]);
    if (!value)
      throw DataError(path + ":" + std::to_string(line_no) + ": bad number in '" +
                      column + "'");
    out.ids.emplace_back(fields[0]);
    out.values.push_back(*value);
    out.by_id[out.ids.back()] = *value;
  });
  if (out.ids.empty() && !allow_empty)
    throw DataError(path + ": no data rows");
  return out;
}

CommunitiesFile load_communities(const std::string& path) {
  CommunitiesFile out;
  std::vector<std::string_view> fields;
  bool saw_header = false;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != "user_id,community")
        throw DataError(path + ": expected header 'user_id,community'");
      saw_header = true;
      return;
    }
    if (line.empty()) return;
    if (!split_fields(line, 2, fields))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed row");
    auto c = parse_int(fields[1]);
    if (!c || *c < 0)
      throw DataError(path + ":" + std::to_string(line_no) + ": bad community id");
    out.node_ids.emplace_back(fields[0]);
    out.assignment.push_back(uint32_t(*c));
    out.community_count = std::max(out.community_count, size_t(*c) + 1);
  });
  if (out.node_ids.empty()) throw DataError(path + ": no data rows");
  return out;
}

std::vector<std::string> run_ingest(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  Manifest manifest(config, "ingest");
  manifest.input(config.shares_path);
  manifest.input(config.allowlist_path);
  manifest.param("top_k", config.top_k);
  manifest.param("strict", config.strict);

  IngestedCounts in = ingest_counts(config);
  const auto& bc = in.counts;

  {
    FileWriter w(config.out_dir + "/counts.csv");
    w.write("user_id,outlet_id,count\n");
    for (size_t i = 0; i < bc.rows(); ++i)
      for (size_t p = bc.row_ptr[i]; p < bc.row_ptr[i + 1]; ++p) {
        w.write(bc.user_ids[i]);
        w.write(",");
        w.write(bc.outlet_ids[bc.col_idx[p]]);
        w.write(",");
        w.write(std::to_string(bc.counts[p]));
        w.write("\n");
      }
    w.close();
    manifest.output("counts.csv");
  }
  {
    auto cs = bc.col_sums();
    FileWriter w(config.out_dir + "/outlets.csv");
    w.write("outlet_id,total_shares,rank\n");
    for (size_t j = 0; j < bc.cols(); ++j) {
      w.write(bc.outlet_ids[j]);
      w.write(",");
      w.write(std::to_string(cs[j]));
      w.write(",");
      w.write(std::to_string(j));
      w.write("\n");
    }
    w.close();
    manifest.output("outlets.csv");
  }
  {
    ordered_json j;
    j["events_parsed"] = in.stats.parsed;
    j["events_skipped"] = in.stats.skipped;
    j["events_retained"] = bc.grand_total;
    j["users"] = bc.rows();
    j["outlets"] = bc.cols();
    j["outlets_dropped_empty"] = bc.dropped_columns;
    write_file(config.out_dir + "/ingest_summary.json", j.dump(2) + "\n");
    manifest.output("ingest_summary.json");
  }
  return manifest.write();
}

std::vector<std::string> run_msi(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  Manifest manifest(config, "msi");
  manifest.input(config.shares_path);
  manifest.input(config.allowlist_path);
  manifest.param("top_k", config.top_k);
  manifest.param("convention", config.convention);
  manifest.param("sign_reference",
                 config.sign_reference.empty() ? "(auto)" : config.sign_reference);
  manifest.param("svd_k", config.svd_k);
  manifest.param("svd_tol", config.svd_tol);
  manifest.param("svd_max_iter", config.svd_max_iter);
  manifest.param("svd_seed", config.svd_seed);
  manifest.param("strict", config.strict);

  IngestedCounts in = ingest_counts(config);

  ca::MsiOptions opts;
  opts.convention = config.convention == "standard"
                        ? ca::Convention::standard
                        : ca::Convention::paper_literal;
  if (!config.sign_reference.empty()) opts.sign_reference = config.sign_reference;
  opts.svd.k = config.svd_k;
  opts.svd.tol = config.svd_tol;
  opts.svd.max_iter = config.svd_max_iter;
  opts.svd.seed = config.svd_seed;

  ca::CaDecomposition dec;
  ca::MsiScores scores = ca::compute_msi(in.counts, opts, &dec);

  {
    FileWriter w(config.out_dir + "/user_msi.csv");
    w.write("user_id,msi\n");
    for (size_t i = 0; i < scores.user_ids.size(); ++i) {
      w.write(scores.user_ids[i]);
      w.write(",");
      w.write_double(scores.user_msi[i]);
      w.write("\n");
    }
    w.close();
    manifest.output("user_msi.csv");
  }
  {
    FileWriter w(config.out_dir + "/outlet_msi.csv");
    w.write("outlet_id,msi,column_mass\n");
    for (size_t j = 0; j < scores.outlet_ids.size(); ++j) {
      w.write(scores.outlet_ids[j]);
      w.write(",");
      w.write_double(scores.outlet_msi[j]);
      w.write(",");
      w.write_double(scores.column_mass[j]);
      w.write("\n");
    }
    w.close();
    manifest.output("outlet_msi.csv");
  }
  {
    ordered_json j;
    j["singular_values"] = dec.singular_values;
    j["total_inertia"] = dec.total_inertia;
    j["k"] = dec.k;
    j["rows"] = dec.rows;
    j["cols"] = dec.cols;
    j["grand_total"] = in.counts.grand_total;
    j["convention"] = config.convention;
    j["sign_reference"] = scores.sign_reference;
    j["events_skipped"] = in.stats.skipped;
    write_file(config.out_dir + "/decomposition.json", j.dump(2) + "\n");
    manifest.output("decomposition.json");
  }
  return manifest.write();
}

std::vector<std::string> run_iv(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  if (config.shares_path.empty() || config.labels_path.empty())
    throw DataError("iv needs --shares and --labels");
  Manifest manifest(config, "iv");
  manifest.input(config.shares_path);
  manifest.input(config.labels_path);
  manifest.param("strict", config.strict);

  ingest::ParseOptions opts;
  opts.strict = config.strict;
  ingest::ParseStats share_stats, label_stats;
  auto shares = ingest::parse_shares(config.shares_path, opts, &share_stats);
  auto labels = ingest::parse_labels(config.labels_path, opts, &label_stats);
  auto timelines = ideology::build_timelines(labels);
  auto scores = ideology::ideology_valence(shares, timelines);

  FileWriter w(config.out_dir + "/iv.csv");
  w.write("user_id,cr_count,cl_count,iv\n");
  for (const auto& s : scores) {
    w.write(s.user_id);
    w.write(",");
    w.write(std::to_string(s.cr_count));
    w.write(",");
    w.write(std::to_string(s.cl_count));
    w.write(",");
    w.write_double(s.iv);
    w.write("\n");
  }
  w.close();
  manifest.output("iv.csv");
  return manifest.write();
}

std::vector<std::string> run_dip(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  if (config.user_msi_path.empty())
    throw DataError("dip needs --input (a CSV with the score column)");
  Manifest manifest(config, "dip");
  manifest.input(config.user_msi_path);
  manifest.param("column", config.dip_column);
  manifest.param("B", config.dip_b);
  manifest.param("seed", config.dip_seed);

  ScoreColumn column = load_score_column(config.user_msi_path, config.dip_column);
  stats::DipResult res =
      stats::dip_pvalue(column.values, config.dip_b, config.dip_seed);

  ordered_json j;
  j["n"] = res.n;
  j["dip"] = res.dip;
  j["p_value"] = res.p_value;
  j["B"] = res.replicates;
  j["seed"] = res.seed;
  write_file(config.out_dir + "/dip.json", j.dump(2) + "\n");
  manifest.output("dip.json");
  return manifest.write();
}

std::vector<std::string> run_communities(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  if (config.retweets_path.empty()) throw DataError("communities needs --retweets");
  Manifest manifest(config, "communities");
  manifest.input(config.retweets_path);
  manifest.param("resolution", config.resolution);
  manifest.param("seed", config.louvain_seed);
  manifest.param("max_passes", config.max_passes);
  manifest.param("exclude_news_links", !config.include_news_links);
  manifest.param("strict", config.strict);

  ingest::ParseOptions opts;
  opts.strict = config.strict;
  ingest::ParseStats stats;
  auto events = ingest::parse_retweets(config.retweets_path, opts, &stats);
  auto graph = ingest::build_retweet_graph(events, !config.include_news_links);
  auto undirected = netcomm::symmetrize(graph);

  netcomm::LouvainOptions lopts;
  lopts.resolution = config.resolution;
  lopts.seed = config.louvain_seed;
  lopts.max_passes = config.max_passes;
  auto partition = netcomm::louvain(undirected, lopts);

  {
    FileWriter w(config.out_dir + "/communities.csv");
    w.write("user_id,community\n");
    for (size_t u = 0; u < graph.node_count(); ++u) {
      w.write(graph.node_ids[u]);
      w.write(",");
      w.write(std::to_string(partition.assignment[u]));
      w.write("\n");
    }
    w.close();
    manifest.output("communities.csv");
  }
  {
    ordered_json j;
    j["Q"] = partition.modularity;
    j["C"] = partition.community_count();
    j["resolution"] = partition.resolution;
    j["seed"] = partition.seed;
    j["passes"] = partition.passes;
    j["node_count"] = graph.node_count();
    j["directed_edge_count"] = graph.edge_count();
    j["total_retweets"] = graph.total_weight();
    ordered_json sizes = ordered_json::array();
    for (size_t c = 0; c < std::min<size_t>(partition.community_count(), 32); ++c)
      sizes.push_back(partition.community_sizes[c]);
    j["largest_community_sizes"] = sizes;
    write_file(config.out_dir + "/partition.json", j.dump(2) + "\n");
    manifest.output("partition.json");
  }
  return manifest.write();
}

std::vector<std::string> run_profile(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  std::vector<std::string> missing;
  if (config.communities_path.empty()) missing.push_back("--communities");
  if (config.user_msi_path.empty()) missing.push_back("--user-msi");
  if (!missing.empty()) {
    std::string msg = "profile: missing inputs:";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }
  Manifest manifest(config, "profile");
  manifest.input(config.communities_path);
  manifest.input(config.user_msi_path);
  manifest.input(config.iv_path);
  manifest.param("top_n", config.top_n);
  manifest.param("bandwidth", config.bandwidth);
  manifest.param("grid_points", config.grid_points);

  CommunitiesFile comms = load_communities(config.communities_path);
  ScoreColumn msi = load_score_column(config.user_msi_path, "msi");
  std::unordered_map<std::string, double> iv_map;
  if (!config.iv_path.empty())
    iv_map = load_score_column(config.iv_path, "iv").by_id;

  netcomm::CommunityPartition partition;
  partition.assignment = comms.assignment;
  partition.community_sizes.assign(comms.community_count, 0);
  for (uint32_t c : comms.assignment) ++partition.community_sizes[c];

  auto profiles = netcomm::profile_communities(
      partition, comms.node_ids, msi.by_id, iv_map, config.top_n,
      config.bandwidth, config.grid_points);

  ordered_json arr = ordered_json::array();
  for (const auto& p : profiles) {
    ordered_json j;
    j["community"] = p.community;
    j["size"] = p.size;
    j["fraction"] = p.fraction;
    j["msi_members"] = p.msi_members;
    j["msi_skipped"] = p.msi_skipped;
    j["iv_members"] = p.iv_members;
    j["iv_skipped"] = p.iv_skipped;
    j["mean_msi"] = p.msi_members ? ordered_json(p.mean_msi) : ordered_json(nullptr);
    j["mean_iv"] = p.iv_members ? ordered_json(p.mean_iv) : ordered_json(nullptr);
    j["msi_density"] = p.msi_members ? curve_json(p.msi_density) : ordered_json(nullptr);
    j["iv_density"] = p.iv_members ? curve_json(p.iv_density) : ordered_json(nullptr);
    arr.push_back(j);
  }
  write_file(config.out_dir + "/community_profiles.json", arr.dump(2) + "\n");
  manifest.output("community_profiles.json");
  return manifest.write();
}

std::vector<std::string> run_synth(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  Manifest manifest(config, "synth");
  const auto& s = config.synth;
  manifest.param("n_users_cr", s.n_users_cr);
  manifest.param("n_users_cl", s.n_users_cl);
  manifest.param("outlets_right", s.outlets_right);
  manifest.param("outlets_left", s.outlets_left);
  manifest.param("shares_per_user", s.shares_per_user);
  manifest.param("cr_own_bias", s.cr_own_bias);
  manifest.param("cl_own_bias", s.cl_own_bias);
  manifest.param("label_noise", s.label_noise);
  manifest.param("retweet_p_in", s.retweet_p_in);
  manifest.param("retweet_p_out", s.retweet_p_out);
  manifest.param("seed", s.seed);
  manifest.param("t_start", s.t_start);
  manifest.param("t_end", s.t_end);

  synth::generate(s, config.out_dir);
  manifest.output("shares.csv");
  manifest.output("labels.csv");
  manifest.output("retweets.csv");
  manifest.output("ground_truth.csv");
  return manifest.write();
}

std::vector<std::string> run_report(const RunConfig& config) {
  config.validate();
  config.apply_runtime();
  ensure_dir(config.out_dir);
  {
    std::vector<std::string> missing;
    if (config.user_msi_path.empty()) missing.push_back("--user-msi");
    if (!config.skip_network) {
      if (config.communities_path.empty()) missing.push_back("--communities");
      if (config.partition_path.empty()) missing.push_back("--partition");
    }
    if (!missing.empty()) {
      std::string msg = "report: missing inputs:";
      for (const auto& m : missing) msg += " " + m;
      throw DataError(msg);
    }
  }

  Manifest manifest(config, "report");
  manifest.input(config.user_msi_path);
  manifest.input(config.iv_path);
  if (!config.skip_network) {
    manifest.input(config.communities_path);
    manifest.input(config.partition_path);
  }
  manifest.param("bandwidth", config.bandwidth);
  manifest.param("grid_points", config.grid_points);
  manifest.param("grid2d_points", config.grid2d_points);
  manifest.param("dip_B", config.dip_b);
  manifest.param("dip_seed", config.dip_seed);
  manifest.param("top_n", config.top_n);
  manifest.param("skip_network", config.skip_network);

  ScoreColumn msi = load_score_column(config.user_msi_path, "msi");

  ordered_json report;
  report["artifact_version"] = kArtifactVersion;

  // MSI density + dip
  stats::DensityCurve msi_density = stats::kde_1d(
      msi.values, config.bandwidth,
      stats::default_grid(msi.values, config.bandwidth, config.grid_points));
  stats::DipResult dip =
      stats::dip_pvalue(msi.values, config.dip_b, config.dip_seed);
  report["msi"] = {{"users", msi.values.size()}};
  report["msi"]["density"] = curve_json(msi_density);
  report["dip"] = {{"n", dip.n},
                   {"dip", dip.dip},
                   {"p_value", dip.p_value},
                   {"B", dip.replicates},
                   {"seed", dip.seed}};
  write_density_csv(config.out_dir + "/density.csv", msi_density);
  manifest.output("density.csv");

  // IV density + joint grid (when labels were processed upstream)
  bool have_iv = false;
  ScoreColumn iv;
  if (!config.iv_path.empty()) {
    iv = load_score_column(config.iv_path, "iv", /*allow_empty=*/true);
    have_iv = !iv.ids.empty();  // empty labels upstream -> sections absent
  }
  if (have_iv) {
    stats::DensityCurve iv_density = stats::kde_1d(
        iv.values, config.bandwidth,
        stats::default_grid(iv.values, config.bandwidth, config.grid_points));
    report["iv"] = {{"users", iv.values.size()}};
    report["iv"]["density"] = curve_json(iv_density);

    // joint density over users that have both scores
    std::vector<double> jx, jy;
    for (size_t i = 0; i < msi.ids.size(); ++i) {
      auto it = iv.by_id.find(msi.ids[i]);
      if (it == iv.by_id.end()) continue;
      jx.push_back(msi.values[i]);
      jy.push_back(it->second);
    }
    if (!jx.empty()) {
      stats::DensityGrid joint = stats::kde_2d(
          jx, jy, config.bandwidth, config.bandwidth,
          stats::default_grid(jx, config.bandwidth, config.grid2d_points),
          stats::default_grid(jy, config.bandwidth, config.grid2d_points));
      report["joint"] = {{"users", jx.size()},
                         {"bandwidths", {joint.bandwidth_x, joint.bandwidth_y}},
                         {"x_grid", joint.x_grid},
                         {"y_grid", joint.y_grid},
                         {"density", joint.density}};
      FileWriter w(config.out_dir + "/density2d.csv");
      w.write("x,y,density\n");
      for (size_t ix = 0; ix < joint.x_grid.size(); ++ix)
        for (size_t iy = 0; iy < joint.y_grid.size(); ++iy) {
          w.write_double(joint.x_grid[ix]);
          w.write(",");
          w.write_double(joint.y_grid[iy]);
          w.write(",");
          w.write_double(joint.at(ix, iy));
          w.write("\n");
        }
      w.close();
      manifest.output("density2d.csv");
    } else {
      report["joint"] = nullptr;
    }
  } else {
    report["iv"] = nullptr;
    report["joint"] = nullptr;
  }

  // partition + community profiles
  if (!config.skip_network && !config.communities_path.empty()) {
    CommunitiesFile comms = load_communities(config.communities_path);
    ordered_json pj =
        ordered_json::parse(read_file(config.partition_path));
    report["partition"] = pj;

    netcomm::CommunityPartition partition;
    partition.assignment = comms.assignment;
    partition.community_sizes.assign(comms.community_count, 0);
    for (uint32_t c : comms.assignment) ++partition.community_sizes[c];

    std::unordered_map<std::string, double> iv_map =
        have_iv ? iv.by_id : std::unordered_map<std::string, double>{};
    auto profiles = netcomm::profile_communities(
        partition, comms.node_ids, msi.by_id, iv_map, config.top_n,
        config.bandwidth, config.grid_points);
    ordered_json arr = ordered_json::array();
    for (const auto& p : profiles) {
      ordered_json j;
      j["community"] = p.community;
      j["size"] = p.size;
      j["fraction"] = p.fraction;
      j["msi_members"] = p.msi_members;
      j["msi_skipped"] = p.msi_skipped;
      j["iv_members"] = p.iv_members;
      j["iv_skipped"] = p.iv_skipped;
      j["mean_msi"] = p.msi_members ? ordered_json(p.mean_msi) : ordered_json(nullptr);
      j["mean_iv"] = p.iv_members ? ordered_json(p.mean_iv) : ordered_json(nullptr);
      arr.push_back(j);
    }
    report["profiles"] = arr;
  } else {
    report["partition"] = nullptr;
    report["profiles"] = nullptr;
  }

  write_file(config.out_dir + "/report.json", report.dump(2) + "\n");
  manifest.output("report.json");
  return manifest.write();
}

}  // namespace msi::pipeline
