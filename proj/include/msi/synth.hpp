#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "msi/netcomm.hpp"

namespace msi::synth {

// Two-population generator with planted structure: group-biased outlet
// choice, whole-range label timelines, and a two-block SBM retweet graph.
// Deterministic: the same config produces byte-identical files.
struct SynthConfig {
  size_t n_users_cr = 1000;
  size_t n_users_cl = 1000;
  std::vector<std::string> outlets_right;  // preferred by CR users
  std::vector<std::string> outlets_left;   // preferred by CL users
  double shares_per_user = 8.0;            // Poisson mean, min 1 per user
  double cr_own_bias = 0.95;  // P(a CR share goes to a right-group outlet)
  double cl_own_bias = 0.6;   // P(a CL share goes to a left-group outlet)
  double label_noise = 0.0;   // P(a user's label timeline is flipped)
  double retweet_p_in = 0.02;
  double retweet_p_out = 0.0005;
  uint64_t seed = 1;
  int64_t t_start = 1551398400;  // 2019-03-01
  int64_t t_end = 1566864000;    // 2019-08-27

  void validate() const;  // throws DataError on violated invariants
};

struct GeneratedFiles {
  std::string shares;
  std::string labels;
  std::string retweets;
  std::string ground_truth;
};

// Writes shares.csv, labels.csv, retweets.csv, ground_truth.csv into out_dir.
GeneratedFiles generate(const SynthConfig& config, const std::string& out_dir);

// user id -> planted group (0 = CR, 1 = CL)
using GroundTruth = std::unordered_map<std::string, int>;

GroundTruth load_ground_truth(const std::string& path);

// Fraction of partition nodes whose community, relabeled to best match the
// two planted groups, agrees with the ground truth. Every node must have a
// ground-truth entry.
double evaluate_recovery(const GroundTruth& truth,
                         const netcomm::CommunityPartition& partition,
                         const std::vector<std::string>& node_ids);

}  // namespace msi::synth
