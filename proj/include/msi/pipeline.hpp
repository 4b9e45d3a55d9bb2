#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "msi/synth.hpp"

namespace msi::pipeline {

inline constexpr const char* kArtifactVersion = "0.1.0";

// One configuration object drives every subcommand; each stage reads the
// fields it needs and records them in its manifest.
struct RunConfig {
  // raw inputs
  std::string shares_path;
  std::string retweets_path;
  std::string labels_path;
  std::string allowlist_path;

  // upstream artifacts (profile / dip / report)
  std::string user_msi_path;
  std::string iv_path;
  std::string communities_path;
  std::string partition_path;

  std::string out_dir = "out";

  // ingest / ca
  size_t top_k = 12;
  std::string convention = "standard";  // or "paper_literal"
  std::string sign_reference;           // empty -> largest column mass
  size_t svd_k = 1;
  double svd_tol = 1e-12;
  size_t svd_max_iter = 1000;
  uint64_t svd_seed = 20190811;

  // stats
  size_t dip_b = 2000;
  uint64_t dip_seed = 20190811;
  double bandwidth = 0.15;
  size_t grid_points = 512;
  size_t grid2d_points = 128;

  // netcomm
  double resolution = 1.0;
  uint64_t louvain_seed = 20190811;
  size_t max_passes = 64;
  size_t top_n = 2;
  bool include_news_links = false;

  // io / execution
  bool strict = false;
  bool skip_network = false;
  int threads = 0;            // 0 = hardware
  std::string kernel = "auto";
  std::string dip_column = "msi";

  synth::SynthConfig synth;

  void validate() const;   // throws DataError on invariant violations
  void apply_runtime() const;  // threads + kernel selection
};

// Stage runners; each writes its artifacts plus manifest.json into
// config.out_dir and returns the list of files written.
std::vector<std::string> run_ingest(const RunConfig& config);
std::vector<std::string> run_msi(const RunConfig& config);
std::vector<std::string> run_iv(const RunConfig& config);
std::vector<std::string> run_dip(const RunConfig& config);
std::vector<std::string> run_communities(const RunConfig& config);
std::vector<std::string> run_profile(const RunConfig& config);
std::vector<std::string> run_synth(const RunConfig& config);
std::vector<std::string> run_report(const RunConfig& config);

// Artifact readers shared by stages and tests.
struct ScoreColumn {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::unordered_map<std::string, double> by_id;
};
ScoreColumn load_score_column(const std::string& path,
                              const std::string& column,
                              bool allow_empty = false);

struct CommunitiesFile {
  std::vector<std::string> node_ids;
  std::vector<uint32_t> assignment;
  size_t community_count = 0;
};
CommunitiesFile load_communities(const std::string& path);

}  // namespace msi::pipeline
