// Command-line driver for the media-sharing analysis pipeline.
//
// Subcommands: synth, ingest, msi, iv, dip, communities, profile, report.
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "msi/common.hpp"
#include "msi/io.hpp"
#include "msi/pipeline.hpp"

namespace {

using msi::pipeline::RunConfig;

bool g_print_config = false;
std::string g_config_path;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--config", g_config_path,
                  "Key=value config file; explicit flags win over the file");
  cmd->add_flag("--print-config", g_print_config,
                "Print the effective configuration and exit");
  cmd->add_option("--out-dir", cfg.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads,
                  "Worker thread cap (0 = hardware concurrency)")
      ->capture_default_str();
  cmd->add_option("--kernel", cfg.kernel, "Kernel variant: auto|scalar|avx2")
      ->capture_default_str();
  cmd->add_flag("--strict", cfg.strict,
                "Treat malformed input lines as fatal instead of skipping");
}

// key=value lines; '#' starts a comment. Values apply only to options the
// command line left untouched, so explicit flags always win. Keys that do
// not name an option of the active subcommand are ignored (shared files may
// carry keys for several subcommands).
void apply_config_file(CLI::App* sub, const std::string& path) {
  const std::string text = msi::read_file(path);
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw msi::DataError(path + ": config line is not key=value: " + line);
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    std::string value = line.substr(eq + 1);
    const size_t vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);

    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Media sharing index pipeline"};
  app.require_subcommand(1);

  RunConfig cfg;

  auto* synth = app.add_subcommand("synth", "Generate synthetic event files");
  add_common(synth, cfg);
  synth->add_option("--users-cr", cfg.synth.n_users_cr, "CR-group user count")
      ->capture_default_str();
  synth->add_option("--users-cl", cfg.synth.n_users_cl, "CL-group user count")
      ->capture_default_str();
  synth
      ->add_option("--outlets-right", cfg.synth.outlets_right,
                   "Right-group outlet ids")
      ->delimiter(',');
  synth
      ->add_option("--outlets-left", cfg.synth.outlets_left,
                   "Left-group outlet ids")
      ->delimiter(',');
  synth
      ->add_option("--shares-per-user", cfg.synth.shares_per_user,
                   "Poisson mean share count (minimum 1 per user)")
      ->capture_default_str();
  synth->add_option("--cr-own-bias", cfg.synth.cr_own_bias,
                    "P(CR share goes to a right-group outlet)")
      ->capture_default_str();
  synth->add_option("--cl-own-bias", cfg.synth.cl_own_bias,
                    "P(CL share goes to a left-group outlet)")
      ->capture_default_str();
  synth->add_option("--label-noise", cfg.synth.label_noise,
                    "P(a user's label timeline is flipped)")
      ->capture_default_str();
  synth->add_option("--retweet-p-in", cfg.synth.retweet_p_in,
                    "Within-group retweet edge probability")
      ->capture_default_str();
  synth->add_option("--retweet-p-out", cfg.synth.retweet_p_out,
                    "Cross-group retweet edge probability")
      ->capture_default_str();
  synth->add_option("--seed", cfg.synth.seed, "Generator seed")
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Parse and filter share events");
  add_common(ingest, cfg);
  ingest->add_option("--shares", cfg.shares_path, "Shares CSV/JSONL file");
  ingest->add_option("--allowlist", cfg.allowlist_path,
                     "Outlet allowlist (one id per line)");
  ingest->add_option("--top-k", cfg.top_k, "Outlets to keep, ranked by shares")
      ->check(CLI::Range(size_t(2), size_t(1) << 20))
      ->capture_default_str();

  auto* msi_cmd = app.add_subcommand(
      "msi", "Correspondence analysis and media sharing index");
  add_common(msi_cmd, cfg);
  msi_cmd->add_option("--shares", cfg.shares_path, "Shares CSV/JSONL file");
  msi_cmd->add_option("--allowlist", cfg.allowlist_path, "Outlet allowlist");
  msi_cmd->add_option("--top-k", cfg.top_k, "Outlets to keep")
      ->check(CLI::Range(size_t(2), size_t(1) << 20))
      ->capture_default_str();
  msi_cmd
      ->add_option("--convention", cfg.convention,
                   "Row coordinate convention: standard|paper_literal")
      ->check(CLI::IsMember({"standard", "paper_literal"}))
      ->capture_default_str();
  msi_cmd->add_option("--sign-reference", cfg.sign_reference,
                      "Outlet whose score is oriented positive");
  msi_cmd->add_option("--svd-k", cfg.svd_k, "Retained dimensions (1-3)")
      ->check(CLI::Range(size_t(1), size_t(3)))
      ->capture_default_str();
  msi_cmd->add_option("--svd-tol", cfg.svd_tol, "SVD relative tolerance")
      ->capture_default_str();
  msi_cmd->add_option("--svd-max-iter", cfg.svd_max_iter, "SVD iteration cap")
      ->capture_default_str();
  msi_cmd->add_option("--svd-seed", cfg.svd_seed, "SVD start-vector seed")
      ->capture_default_str();

  auto* iv = app.add_subcommand("iv", "Ideology valence from labeled shares");
  add_common(iv, cfg);
  iv->add_option("--shares", cfg.shares_path, "Shares CSV/JSONL file");
  iv->add_option("--labels", cfg.labels_path, "Label intervals CSV");

  auto* dip = app.add_subcommand("dip", "Dip test of unimodality");
  add_common(dip, cfg);
  dip->add_option("--input", cfg.user_msi_path, "CSV with the score column");
  dip->add_option("--column", cfg.dip_column, "Column to test")
      ->capture_default_str();
  dip->add_option("--replicates", cfg.dip_b, "Monte Carlo replicates (>= 100)")
      ->check(CLI::Range(size_t(100), size_t(1) << 30))
      ->capture_default_str();
  dip->add_option("--seed", cfg.dip_seed, "Replicate seed")
      ->capture_default_str();

  auto* communities =
      app.add_subcommand("communities", "Louvain communities of the retweet graph");
  add_common(communities, cfg);
  communities->add_option("--retweets", cfg.retweets_path, "Retweets CSV file");
  communities->add_flag("--include-news-links", cfg.include_news_links,
                        "Keep retweets that contain news links");
  communities->add_option("--resolution", cfg.resolution, "Modularity resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  communities->add_option("--seed", cfg.louvain_seed, "Visit-order seed")
      ->capture_default_str();
  communities->add_option("--max-passes", cfg.max_passes, "Louvain pass cap")
      ->capture_default_str();

  auto* profile = app.add_subcommand("profile", "Per-community MSI/IV profiles");
  add_common(profile, cfg);
  profile->add_option("--communities", cfg.communities_path, "communities.csv");
  profile->add_option("--user-msi", cfg.user_msi_path, "user_msi.csv");
  profile->add_option("--iv", cfg.iv_path, "iv.csv");
  profile->add_option("--top-n", cfg.top_n, "Largest communities to profile")
      ->capture_default_str();
  profile->add_option("--bandwidth", cfg.bandwidth, "KDE bandwidth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  profile->add_option("--grid-points", cfg.grid_points, "KDE grid points")
      ->capture_default_str();

  auto* report = app.add_subcommand("report", "Aggregate plot-ready report");
  add_common(report, cfg);
  report->add_option("--user-msi", cfg.user_msi_path, "user_msi.csv");
  report->add_option("--iv", cfg.iv_path, "iv.csv");
  report->add_option("--communities", cfg.communities_path, "communities.csv");
  report->add_option("--partition", cfg.partition_path, "partition.json");
  report->add_flag("--skip-network", cfg.skip_network,
                   "Omit the partition/profile sections");
  report->add_option("--bandwidth", cfg.bandwidth, "KDE bandwidth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  report->add_option("--grid-points", cfg.grid_points, "1D KDE grid points")
      ->capture_default_str();
  report->add_option("--grid2d-points", cfg.grid2d_points,
                     "Joint density grid points per axis")
      ->capture_default_str();
  report->add_option("--replicates", cfg.dip_b, "Dip Monte Carlo replicates")
      ->capture_default_str();
  report->add_option("--dip-seed", cfg.dip_seed, "Dip replicate seed")
      ->capture_default_str();
  report->add_option("--top-n", cfg.top_n, "Communities to profile")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!g_config_path.empty())
      for (CLI::App* sub : app.get_subcommands())
        apply_config_file(sub, g_config_path);
  } catch (const msi::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  if (g_print_config) {
    for (CLI::App* sub : app.get_subcommands())
      std::fputs(sub->config_to_str(true, true).c_str(), stdout);
    return 0;
  }

  try {
    std::vector<std::string> files;
    if (synth->parsed()) files = msi::pipeline::run_synth(cfg);
    if (ingest->parsed()) files = msi::pipeline::run_ingest(cfg);
    if (msi_cmd->parsed()) files = msi::pipeline::run_msi(cfg);
    if (iv->parsed()) files = msi::pipeline::run_iv(cfg);
    if (dip->parsed()) files = msi::pipeline::run_dip(cfg);
    if (communities->parsed()) files = msi::pipeline::run_communities(cfg);
    if (profile->parsed()) files = msi::pipeline::run_profile(cfg);
    if (report->parsed()) files = msi::pipeline::run_report(cfg);
    for (const auto& f : files) std::fprintf(stdout, "wrote %s\n", f.c_str());
    return 0;
  } catch (const msi::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const msi::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
