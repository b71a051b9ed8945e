#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tabcurate_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run cli(const std::string& args, const fs::path& dir) {
  const auto err_path = dir / "stderr.txt";
  // The key is always stripped so no test can reach a live provider.
  const std::string cmd = "env -u LLM_API_KEY " + std::string(TABCURATE_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                          " 2> " + err_path.string();
  Run r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string data(const std::string& file) { return (fs::path(TABCURATE_DATA_DIR) / file).string(); }

std::size_t csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += line.empty() ? 0 : 1;
  return n == 0 ? 0 : n - 1;
}

}  // namespace

TEST(Cli, TranscriptPipelineEndToEnd) {
  const auto dir = scratch("pipeline");
  const std::string common = " --schema " + data("adult_like.json") + " --seeds 1 --out " + dir.string();
  ASSERT_EQ(cli("split --data " + data("adult_like.csv") + common, dir).status, 0);
  const auto seed = dir / "adult_like" / "20" / "0";
  EXPECT_EQ(csv_rows(seed / "train.csv"), 20u);
  EXPECT_TRUE(fs::exists(dir / "adult_like" / "schema.json"));

  auto g = cli("generate --generator llm --n-target 200 --transcript " + data("adult_like_transcript.json") + common,
               dir);
  ASSERT_EQ(g.status, 0) << g.err;
  EXPECT_EQ(csv_rows(seed / "synthetic.csv"), 200u);
  const auto gen = nlohmann::json::parse(std::ifstream(seed / "generation.json"));
  EXPECT_TRUE(gen.contains("parse"));
  std::ifstream prompt(seed / "prompt.txt");
  std::stringstream ps;
  ps << prompt.rdbuf();
  EXPECT_NE(ps.str().find("DO NOT COPY THE EXAMPLES"), std::string::npos);

  ASSERT_EQ(cli("baseline --method smote --n-target 100" + common, dir).status, 0);
  EXPECT_EQ(csv_rows(seed / "smote.csv"), 100u);
  ASSERT_EQ(cli("curate" + common, dir).status, 0);
  const auto cur = nlohmann::json::parse(std::ifstream(seed / "curation.json"));
  EXPECT_EQ(csv_rows(seed / "curated.csv") + csv_rows(seed / "discarded.csv"), 200u);
  EXPECT_EQ(cur["n_synthetic"], 200);

  ASSERT_EQ(cli("evaluate --models logistic_regression decision_tree" + common, dir).status, 0);
  EXPECT_TRUE(fs::exists(seed / "eval_curated.json"));
  EXPECT_TRUE(fs::exists(seed / "eval_smote.json"));
  ASSERT_EQ(cli("report" + common, dir).status, 0);
  const auto summary = nlohmann::json::parse(std::ifstream(dir / "adult_like" / "20" / "summary.json"));
  EXPECT_TRUE(summary["sources"].contains("curated"));
  EXPECT_TRUE(fs::exists(dir / "adult_like" / "20" / "results.csv"));
  fs::remove_all(dir);
}

TEST(Cli, BiasDemoWritesJson) {
  const auto dir = scratch("bias");
  const auto r = cli("bias-demo --seeds 2 --n-target 300 --n-test 300 --out " + dir.string(), dir);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "bias_demo.json"));
  fs::remove_all(dir);
}

TEST(Cli, ErrorsAreStructuredJson) {
  const auto dir = scratch("errors");
  const auto r = cli("split --schema " + data("adult_like.json") + " --data /nonexistent.csv --out " + dir.string(),
                     dir);
  EXPECT_EQ(r.status, 2);
  const auto doc = nlohmann::json::parse(r.err.substr(r.err.find('{')));
  EXPECT_EQ(doc["error"], "IoError");
  EXPECT_TRUE(doc.contains("message"));

  const auto big = cli("split --schema " + data("adult_like.json") + " --data " + data("adult_like.csv") +
                           " --n-train 5000 --out " + dir.string(),
                       dir);
  EXPECT_EQ(big.status, 2);
  EXPECT_NE(big.err.find("NTooLarge"), std::string::npos);

  // A live run without the key fails before any network traffic.
  ASSERT_EQ(cli("split --schema " + data("adult_like.json") + " --data " + data("adult_like.csv") +
                    " --seeds 1 --out " + dir.string(),
                dir)
                .status,
            0);
  const auto live = cli("generate --generator llm --name adult_like --seeds 1 --out " + dir.string(), dir);
  EXPECT_EQ(live.status, 2);
  EXPECT_NE(live.err.find("AuthError"), std::string::npos);
  fs::remove_all(dir);
}
