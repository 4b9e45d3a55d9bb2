#include "msi/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "msi/common.hpp"
#include "msi/io.hpp"
#include "msi/rng.hpp"

namespace msi::synth {

void SynthConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError(std::string("synth: ") + name + " must be in [0,1]");
  };
  prob(cr_own_bias, "cr_own_bias");
  prob(cl_own_bias, "cl_own_bias");
  prob(label_noise, "label_noise");
  prob(retweet_p_in, "retweet_p_in");
  prob(retweet_p_out, "retweet_p_out");
  if (n_users_cr < 2 || n_users_cl < 2)
    throw DataError("synth: need at least 2 users per group");
  if (outlets_right.empty() || outlets_left.empty())
    throw DataError("synth: both outlet groups must be non-empty");
  if (!(shares_per_user > 0.0))
    throw DataError("synth: shares_per_user must be > 0");
  if (t_start >= t_end) throw DataError("synth: t_start must be < t_end");
}

namespace {

std::string user_name(size_t global_index, bool is_cr) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%s%06zu", is_cr ? "cr" : "cl", global_index);
  return buf;
}

// Emits each success index of a Bernoulli(p) process over [0, total) via
// geometric gap sampling, O(successes).
template <typename Fn>
void sample_bernoulli_indices(Rng& rng, uint64_t total, double p, Fn emit) {
  if (p <= 0.0 || total == 0) return;
  if (p >= 1.0) {
    for (uint64_t t = 0; t < total; ++t) emit(t);
    return;
  }
  const double log_q = std::log1p(-p);
  double skip = std::floor(std::log(1.0 - rng.next_double()) / log_q);
  uint64_t t = skip >= double(total) ? total : uint64_t(skip);
  while (t < total) {
    emit(t);
    skip = std::floor(std::log(1.0 - rng.next_double()) / log_q);
    if (skip >= double(total)) break;
    t += 1 + uint64_t(skip);
  }
}

// Linear index -> (i, j) with i < j < n over the upper triangle.
std::pair<uint64_t, uint64_t> triangle_pair(uint64_t t, uint64_t n) {
  // row i owns (n - 1 - i) pairs; invert the cumulative count
  double nd = double(n);
  double i_guess = std::floor(
      (2.0 * nd - 1.0 - std::sqrt((2.0 * nd - 1.0) * (2.0 * nd - 1.0) -
                                  8.0 * double(t))) /
      2.0);
  uint64_t i = i_guess < 0.0 ? 0 : uint64_t(i_guess);
  auto row_start = [&](uint64_t r) { return r * (2 * n - r - 1) / 2; };
  while (i > 0 && row_start(i) > t) --i;
  while (row_start(i + 1) <= t) ++i;
  uint64_t j = i + 1 + (t - row_start(i));
  return {i, j};
}

}  // namespace

GeneratedFiles generate(const SynthConfig& config, const std::string& out_dir) {
  config.validate();
  ensure_dir(out_dir);

  const size_t n_cr = config.n_users_cr;
  const size_t n_cl = config.n_users_cl;
  const size_t n = n_cr + n_cl;

  std::vector<std::string> users(n);
  for (size_t i = 0; i < n; ++i) users[i] = user_name(i, i < n_cr);

  GeneratedFiles files;
  files.shares = out_dir + "/shares.csv";
  files.labels = out_dir + "/labels.csv";
  files.retweets = out_dir + "/retweets.csv";
  files.ground_truth = out_dir + "/ground_truth.csv";

  const int64_t span = config.t_end - config.t_start;

  {
    Rng rng(Rng::mix(config.seed, 1));
    FileWriter w(files.shares);
    w.write("user_id,outlet_id,timestamp\n");
    for (size_t i = 0; i < n; ++i) {
      const bool is_cr = i < n_cr;
      const double own_bias = is_cr ? config.cr_own_bias : config.cl_own_bias;
      const auto& own = is_cr ? config.outlets_right : config.outlets_left;
      const auto& other = is_cr ? config.outlets_left : config.outlets_right;
      const uint64_t count =
          std::max<uint64_t>(1, rng.poisson(config.shares_per_user));
      for (uint64_t s = 0; s < count; ++s) {
        const auto& group = rng.bernoulli(own_bias) ? own : other;
        const std::string& outlet = group[rng.next_below(group.size())];
        const int64_t ts = config.t_start + int64_t(rng.next_below(uint64_t(span)));
        w.write(users[i]);
        w.write(",");
        w.write(outlet);
        w.write(",");
        w.write(std::to_string(ts));
        w.write("\n");
      }
    }
    w.close();
  }

  {
    Rng rng(Rng::mix(config.seed, 2));
    FileWriter w(files.labels);
    w.write("user_id,start,end,label\n");
    for (size_t i = 0; i < n; ++i) {
      bool is_cr = i < n_cr;
      if (rng.bernoulli(config.label_noise)) is_cr = !is_cr;
      w.write(users[i]);
      w.write(",");
      w.write(std::to_string(config.t_start));
      w.write(",");
      w.write(std::to_string(config.t_end));
      w.write(is_cr ? ",CR\n" : ",CL\n");
    }
    w.close();
  }

  {
    Rng rng(Rng::mix(config.seed, 3));
    FileWriter w(files.retweets);
    w.write("retweeted_user,retweeting_user,timestamp,has_news_link\n");
    auto emit_edge = [&](uint64_t a, uint64_t b) {
      if (rng.bernoulli(0.5)) std::swap(a, b);
      const int64_t ts = config.t_start + int64_t(rng.next_below(uint64_t(span)));
      w.write(users[a]);
      w.write(",");
      w.write(users[b]);
      w.write(",");
      w.write(std::to_string(ts));
      w.write(",0\n");
    };
    // within-block pairs
    sample_bernoulli_indices(rng, uint64_t(n_cr) * (n_cr - 1) / 2,
                             config.retweet_p_in, [&](uint64_t t) {
                               auto [i, j] = triangle_pair(t, n_cr);
                               emit_edge(i, j);
                             });
    sample_bernoulli_indices(rng, uint64_t(n_cl) * (n_cl - 1) / 2,
                             config.retweet_p_in, [&](uint64_t t) {
                               auto [i, j] = triangle_pair(t, n_cl);
                               emit_edge(n_cr + i, n_cr + j);
                             });
    // cross-block pairs
    sample_bernoulli_indices(rng, uint64_t(n_cr) * n_cl, config.retweet_p_out,
                             [&](uint64_t t) {
                               emit_edge(t / n_cl, n_cr + t % n_cl);
                             });
    w.close();
  }

  {
    FileWriter w(files.ground_truth);
    w.write("user_id,group\n");
    for (size_t i = 0; i < n; ++i) {
      w.write(users[i]);
      w.write(i < n_cr ? ",CR\n" : ",CL\n");
    }
    w.close();
  }

  return files;
}

GroundTruth load_ground_truth(const std::string& path) {
  GroundTruth truth;
  bool saw_header = false;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != "user_id,group")
        throw DataError(path + ": expected header 'user_id,group'");
      saw_header = true;
      return;
    }
    if (line.empty()) return;
    size_t comma = line.find(',');
    if (comma == std::string_view::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed line");
    std::string user(line.substr(0, comma));
    std::string_view group = line.substr(comma + 1);
    if (group != "CR" && group != "CL")
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": group must be CR or CL");
    truth[user] = group == "CR" ? 0 : 1;
  });
  return truth;
}

double evaluate_recovery(const GroundTruth& truth,
                         const netcomm::CommunityPartition& partition,
                         const std::vector<std::string>& node_ids) {
  if (partition.assignment.size() != node_ids.size())
    throw DataError("evaluate_recovery: partition/node id size mismatch");
  if (node_ids.empty()) throw DataError("evaluate_recovery: empty partition");

  uint32_t n_comm = 0;
  for (uint32_t c : partition.assignment) n_comm = std::max(n_comm, c + 1);
  std::vector<std::array<size_t, 2>> counts(n_comm, {0, 0});
  for (size_t u = 0; u < node_ids.size(); ++u) {
    auto it = truth.find(node_ids[u]);
    if (it == truth.end())
      throw DataError("evaluate_recovery: node missing from ground truth: " +
                      node_ids[u]);
    ++counts[partition.assignment[u]][it->second];
  }
  size_t agree = 0;
  for (const auto& c : counts) agree += std::max(c[0], c[1]);
  return double(agree) / double(node_ids.size());
}

}  // namespace msi::synth
