#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "msi/common.hpp"
#include "msi/io.hpp"
#include "msi/pipeline.hpp"
#include "oracles.hpp"

using json = nlohmann::json;
using namespace msi;

namespace {

// one shared synthetic dataset for the CLI tests
struct Fixture {
  std::string data;
  Fixture() {
    data = oracle::make_temp_dir("cli_data");
    const int rc = oracle::run_cli(
        "synth --out-dir " + data +
        " --users-cr 120 --users-cl 120"
        " --outlets-right r1,r2,r3,r4,r5,r6,r7,r8 --outlets-left l1,l2,l3,l4"
        " --shares-per-user 2 --cr-own-bias 0.95 --cl-own-bias 0.6"
        " --retweet-p-in 0.12 --retweet-p-out 0.004 --seed 2019");
    REQUIRE(rc == 0);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

bool same_file(const std::string& a, const std::string& b) {
  return oracle::slurp(a) == oracle::slurp(b);
}

}  // namespace

TEST_CASE("msi stage: artifacts, manifest, reruns byte-identical") {
  auto& f = fixture();
  auto out1 = oracle::make_temp_dir("cli_msi1");
  auto out2 = oracle::make_temp_dir("cli_msi2");

  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --out-dir " +
                          out1 + " --threads 1") == 0);
  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --out-dir " +
                          out2 + " --threads 2") == 0);

  for (const char* name : {"user_msi.csv", "outlet_msi.csv", "decomposition.json"})
    CHECK(same_file(out1 + "/" + name, out2 + "/" + name));

  json manifest = json::parse(oracle::slurp(out1 + "/manifest.json"));
  CHECK(manifest["command"] == "msi");
  CHECK(manifest["inputs"].size() == 1);
  CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(manifest["parameters"]["top_k"] == 12);
  CHECK(manifest["parameters"]["svd_seed"].is_number());
  CHECK(manifest["outputs"].size() == 3);

  // manifests agree on everything except the recorded thread cap
  json m2 = json::parse(oracle::slurp(out2 + "/manifest.json"));
  CHECK(manifest["parameters"] == m2["parameters"]);
  CHECK(manifest["inputs"] == m2["inputs"]);

  json dec = json::parse(oracle::slurp(out1 + "/decomposition.json"));
  CHECK(dec["cols"] == 12);
  CHECK(dec["k"] == 1);
  CHECK(dec["singular_values"][0].get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("block-diagonal input produces a strongly bimodal msi") {
  auto dir = oracle::make_temp_dir("cli_block");
  REQUIRE(oracle::run_cli("synth --out-dir " + dir +
                          " --users-cr 100 --users-cl 100"
                          " --outlets-right a1,a2 --outlets-left b1,b2"
                          " --cr-own-bias 1.0 --cl-own-bias 1.0"
                          " --shares-per-user 4 --seed 5") == 0);
  auto out = oracle::make_temp_dir("cli_block_out");
  REQUIRE(oracle::run_cli("msi --shares " + dir + "/shares.csv --top-k 4 --out-dir " +
                          out) == 0);
  REQUIRE(oracle::run_cli("dip --input " + out + "/user_msi.csv --replicates 200"
                          " --out-dir " + out) == 0);
  json dip = json::parse(oracle::slurp(out + "/dip.json"));
  CHECK(dip["p_value"].get<double>() < 0.01);
  CHECK(dip["n"] == 200);
  CHECK(dip["B"] == 200);
}

TEST_CASE("error contract: exit codes and messages") {
  auto out = oracle::make_temp_dir("cli_err");

  // missing file -> data error (2), path named on stderr
  CHECK(oracle::run_cli("msi --shares /no/such/file.csv --out-dir " + out +
                        " 2> " + out + "/err.txt") == 2);
  CHECK(oracle::slurp(out + "/err.txt").find("/no/such/file.csv") !=
        std::string::npos);

  // usage error -> 1
  CHECK(oracle::run_cli("msi --no-such-flag 2> /dev/null") == 1);
  CHECK(oracle::run_cli("2> /dev/null") == 1);  // missing subcommand

  // config invariant violations -> usage errors
  auto& f = fixture();
  CHECK(oracle::run_cli("msi --shares " + f.data + "/shares.csv --top-k 1" +
                        " --out-dir " + out + " 2> /dev/null") == 1);
  CHECK(oracle::run_cli("report --user-msi x.csv --bandwidth 0 --skip-network" +
                        std::string(" --out-dir ") + out + " 2> /dev/null") == 1);
  CHECK(oracle::run_cli("dip --input x.csv --replicates 50 --out-dir " + out +
                        " 2> /dev/null") == 1);
}

TEST_CASE("strict mode turns malformed lines into failures") {
  auto dir = oracle::make_temp_dir("cli_strict");
  msi::write_file(dir + "/shares.csv",
                  "user_id,outlet_id,timestamp\nu1,a,1\n,broken,2\nu2,b,3\n");
  auto out = oracle::make_temp_dir("cli_strict_out");
  CHECK(oracle::run_cli("ingest --shares " + dir + "/shares.csv --top-k 2" +
                        " --out-dir " + out + " 2> /dev/null") == 0);
  CHECK(oracle::run_cli("ingest --shares " + dir + "/shares.csv --top-k 2" +
                        " --strict --out-dir " + out + " 2> /dev/null") == 2);
}

TEST_CASE("config file provides defaults, flags win") {
  auto& f = fixture();
  auto out = oracle::make_temp_dir("cli_cfg");
  msi::write_file(out + "/run.cfg", "top-k=6\n");

  REQUIRE(oracle::run_cli("msi --config " + out + "/run.cfg --shares " + f.data +
                          "/shares.csv --out-dir " + out) == 0);
  json dec = json::parse(oracle::slurp(out + "/decomposition.json"));
  CHECK(dec["cols"] == 6);  // config file value used

  REQUIRE(oracle::run_cli("msi --config " + out + "/run.cfg --top-k 8 --shares " +
                          f.data + "/shares.csv --out-dir " + out) == 0);
  dec = json::parse(oracle::slurp(out + "/decomposition.json"));
  CHECK(dec["cols"] == 8);  // flag overrides file
}

TEST_CASE("print-config exits cleanly") {
  auto out = oracle::make_temp_dir("cli_pc");
  CHECK(oracle::run_cli("msi --print-config > " + out + "/cfg.txt") == 0);
  auto text = oracle::slurp(out + "/cfg.txt");
  CHECK(text.find("top-k") != std::string::npos);
}

TEST_CASE("iv + report: full chain and degraded inputs") {
  auto& f = fixture();
  auto out = oracle::make_temp_dir("cli_report");

  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("iv --shares " + f.data + "/shares.csv --labels " +
                          f.data + "/labels.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("communities --retweets " + f.data +
                          "/retweets.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("report --user-msi " + out + "/user_msi.csv --iv " +
                          out + "/iv.csv --communities " + out +
                          "/communities.csv --partition " + out +
                          "/partition.json --replicates 200 --grid2d-points 32"
                          " --out-dir " + out) == 0);

  json report = json::parse(oracle::slurp(out + "/report.json"));
  CHECK(report["dip"]["p_value"].is_number());
  CHECK(report["iv"]["users"].get<size_t>() == 240);
  CHECK(report["joint"]["density"].is_array());
  CHECK(report["partition"]["Q"].is_number());
  CHECK(report["profiles"].size() == 2);
  CHECK(msi::file_exists(out + "/density.csv"));
  CHECK(msi::file_exists(out + "/density2d.csv"));

  // without --skip-network the network inputs are mandatory and named
  auto out2 = oracle::make_temp_dir("cli_report2");
  CHECK(oracle::run_cli("report --user-msi " + out + "/user_msi.csv --out-dir " +
                        out2 + " 2> " + out2 + "/err.txt") == 2);
  auto err = oracle::slurp(out2 + "/err.txt");
  CHECK(err.find("--communities") != std::string::npos);
  CHECK(err.find("--partition") != std::string::npos);

  // --skip-network: valid report without the partition section
  REQUIRE(oracle::run_cli("report --user-msi " + out + "/user_msi.csv --iv " +
                          out + "/iv.csv --skip-network --replicates 200"
                          " --grid2d-points 32 --out-dir " + out2) == 0);
  report = json::parse(oracle::slurp(out2 + "/report.json"));
  CHECK(report["partition"].is_null());
  CHECK(report["profiles"].is_null());
  CHECK(report["msi"]["density"]["grid"].is_array());

  // empty labels file: IV and joint sections absent, MSI intact
  auto out3 = oracle::make_temp_dir("cli_report3");
  msi::write_file(out3 + "/labels.csv", "user_id,start,end,label\n");
  REQUIRE(oracle::run_cli("iv --shares " + f.data + "/shares.csv --labels " +
                          out3 + "/labels.csv --out-dir " + out3) == 0);
  REQUIRE(oracle::run_cli("report --user-msi " + out + "/user_msi.csv --iv " +
                          out3 + "/iv.csv --skip-network --replicates 200"
                          " --out-dir " + out3) == 0);
  report = json::parse(oracle::slurp(out3 + "/report.json"));
  CHECK(report["iv"].is_null());
  CHECK(report["joint"].is_null());
  CHECK(report["msi"]["users"].get<size_t>() == 240);
}

TEST_CASE("profile stage reads prior artifacts") {
  auto& f = fixture();
  auto out = oracle::make_temp_dir("cli_profile");
  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("iv --shares " + f.data + "/shares.csv --labels " +
                          f.data + "/labels.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("communities --retweets " + f.data +
                          "/retweets.csv --out-dir " + out) == 0);
  REQUIRE(oracle::run_cli("profile --communities " + out +
                          "/communities.csv --user-msi " + out +
                          "/user_msi.csv --iv " + out + "/iv.csv --out-dir " +
                          out) == 0);
  json profiles = json::parse(oracle::slurp(out + "/community_profiles.json"));
  REQUIRE(profiles.is_array());
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0]["size"].get<size_t>() >= profiles[1]["size"].get<size_t>());
  CHECK(profiles[0]["fraction"].get<double>() > 0.0);

  // missing inputs listed by name
  auto out2 = oracle::make_temp_dir("cli_profile2");
  CHECK(oracle::run_cli("profile --user-msi " + out + "/user_msi.csv --out-dir " +
                        out2 + " 2> " + out2 + "/err.txt") == 2);
  CHECK(oracle::slurp(out2 + "/err.txt").find("--communities") !=
        std::string::npos);
}

TEST_CASE("kernel variants agree at the pipeline level") {
  auto& f = fixture();
  auto out_a = oracle::make_temp_dir("cli_kern_a");
  auto out_s = oracle::make_temp_dir("cli_kern_s");
  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --kernel auto"
                          " --out-dir " + out_a + " > /dev/null") == 0);
  REQUIRE(oracle::run_cli("msi --shares " + f.data + "/shares.csv --kernel scalar"
                          " --out-dir " + out_s + " > /dev/null") == 0);
  auto a = msi::pipeline::load_score_column(out_a + "/user_msi.csv", "msi");
  auto s = msi::pipeline::load_score_column(out_s + "/user_msi.csv", "msi");
  REQUIRE(a.ids == s.ids);
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(std::abs(a.values[i] - s.values[i]) <= 1e-12);

  // the manifest records which variant produced the artifacts
  json m = json::parse(oracle::slurp(out_s + "/manifest.json"));
  CHECK(m["environment"]["kernel"] == "scalar");

  // an explicit kernel request that the machine cannot honor must fail loudly
  // (on AVX2 machines this exercises the unknown-name branch instead)
  CHECK(oracle::run_cli("msi --shares " + f.data + "/shares.csv --kernel avx9"
                        " --out-dir " + out_s + " 2> /dev/null") == 2);
}

TEST_CASE("determinism across stages and thread counts") {
  auto& f = fixture();
  auto out1 = oracle::make_temp_dir("cli_det1");
  auto out2 = oracle::make_temp_dir("cli_det2");
  for (const auto& [out, threads] :
       std::vector<std::pair<std::string, std::string>>{{out1, "1"}, {out2, "2"}}) {
    REQUIRE(oracle::run_cli("iv --shares " + f.data + "/shares.csv --labels " +
                            f.data + "/labels.csv --out-dir " + out +
                            " --threads " + threads) == 0);
    REQUIRE(oracle::run_cli("communities --retweets " + f.data +
                            "/retweets.csv --out-dir " + out + " --threads " +
                            threads) == 0);
  }
  CHECK(same_file(out1 + "/iv.csv", out2 + "/iv.csv"));
  CHECK(same_file(out1 + "/communities.csv", out2 + "/communities.csv"));
  CHECK(same_file(out1 + "/partition.json", out2 + "/partition.json"));
}
