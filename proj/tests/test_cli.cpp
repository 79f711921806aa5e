// End-to-end checks that drive the installed binaries as subprocesses:
// exit-code conventions, file outputs, and pipeline plumbing between
// subcommands. Numerical behavior is covered by the library suites.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "crosscooc/harness.hpp"
#include "crosscooc/models.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ccooc;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& command) {
  RunResult r;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 512> buf;
  while (std::fgets(buf.data(), int(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

// Shared scratch tree built once: dataset -> corpus -> trained checkpoint.
class CliPipeline : public ::testing::Test {
 protected:
  static fs::path root() {
    return fs::temp_directory_path() / "ccooc_cli_tests";
  }
  static fs::path dataset() { return root() / "dataset"; }
  static fs::path corpus() { return root() / "corpus"; }
  static fs::path model() { return root() / "model.ccnw"; }

  static void SetUpTestSuite() {
    fs::remove_all(root());
    fs::create_directories(root());
    RunResult r = run(std::string(SYNTH_BINARY) + " --out " + q(dataset()) +
                      " --per-class 4 --size 24 --seed 11");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run(std::string(CLI_BINARY) + " extract --in " + q(dataset()) +
            " --out " + q(corpus()) + " --net crossconet");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run(std::string(CLI_BINARY) + " train --corpus " + q(corpus()) +
            " --out " + q(model()) +
            " --net crossconet --width-factor 0.05 --batch 4 --epochs 1"
            " --seed 3");
    ASSERT_EQ(r.exit_code, 0) << r.output;
  }
};

}  // namespace

TEST(CliUsage, MissingSubcommandOrFlagsExitOne) {
  EXPECT_EQ(run(std::string(CLI_BINARY)).exit_code, 1);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " extract").exit_code, 1);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " no-such-command").exit_code, 1);
  EXPECT_EQ(
      run(std::string(CLI_BINARY) + " extract --in a --out b --net vgg")
          .exit_code,
      1);
  EXPECT_EQ(run(std::string(SYNTH_BINARY)).exit_code, 1);
}

TEST(CliUsage, HelpExitsZero) {
  const RunResult top = run(std::string(CLI_BINARY) + " --help");
  EXPECT_EQ(top.exit_code, 0);
  EXPECT_NE(top.output.find("extract"), std::string::npos);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " train --help").exit_code, 0);
}

TEST(CliUsage, DataErrorsExitTwo) {
  const fs::path tmp = fs::temp_directory_path() / "ccooc_cli_tests_err";
  fs::create_directories(tmp);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " extract --in " +
                q(tmp / "missing") + " --out " + q(tmp / "out"))
                .exit_code,
            2);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " attack --spec sepia:1 --in x.png"
                " --out y.png")
                .exit_code,
            2);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " eval --model " +
                q(tmp / "absent.ccnw") + " --corpus " + q(tmp))
                .exit_code,
            2);
}

TEST_F(CliPipeline, SeedResolutionPrefersFlagOverEnvironment) {
  const fs::path out = root() / "seed_probe.png";
  const std::string base = std::string(CLI_BINARY) + " attack --spec noise:1" +
                           " --in " + q(dataset() / "real" / "r00000.png") +
                           " --out " + q(out);
  RunResult r = run("CROSSCOOC_SEED=77 " + base);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("seed=77"), std::string::npos) << r.output;
  r = run("CROSSCOOC_SEED=77 " + base + " --seed 5");
  EXPECT_NE(r.output.find("seed=5"), std::string::npos) << r.output;
  r = run(base);
  EXPECT_NE(r.output.find("seed=0"), std::string::npos) << r.output;
}

TEST_F(CliPipeline, ExtractWroteMirroredCorpus) {
  EXPECT_TRUE(fs::exists(corpus() / "index.tsv"));
  EXPECT_TRUE(fs::exists(corpus() / "real" / "r00003.cbco"));
  EXPECT_TRUE(fs::exists(corpus() / "gan" / "g00000.cbco"));
  const FeatureCorpus c = load_corpus(corpus().string());
  EXPECT_EQ(c.size(), 8u);
  EXPECT_EQ(c.plane_count, 6);
}

TEST_F(CliPipeline, TrainWroteCheckpointAndSidecar) {
  ASSERT_TRUE(fs::exists(model()));
  Network<float> net = load_checkpoint(model().string());
  EXPECT_EQ(net.spec().input_planes, 6);

  const fs::path sidecar = model().string() + ".json";
  ASSERT_TRUE(fs::exists(sidecar));
  std::ifstream in(sidecar);
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j["format"], "ccnw-1");
  EXPECT_EQ(j["net"], "crossconet");
  EXPECT_EQ(j["input_planes"], 6);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_DOUBLE_EQ(double(j["width_factor"]), 0.05);
}

TEST_F(CliPipeline, GammaOneAttackIsIdentityOnPixels) {
  const fs::path in = dataset() / "real" / "r00000.png";
  const fs::path out = root() / "identity.png";
  const RunResult r = run(std::string(CLI_BINARY) + " attack --spec gamma:1" +
                          " --in " + q(in) + " --out " + q(out));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(load_image(in.string()).data, load_image(out.string()).data);
}

TEST_F(CliPipeline, NoiseAttackIsSeedAndStreamAddressable) {
  const fs::path in = dataset() / "real" / "r00001.png";
  const std::string base = std::string(CLI_BINARY) + " attack --spec noise:2" +
                           " --in " + q(in) + " --seed 9 --out ";
  run(base + q(root() / "n1.png"));
  run(base + q(root() / "n2.png"));
  run(base + q(root() / "n3.png") + " --stream 1");
  EXPECT_EQ(slurp(root() / "n1.png"), slurp(root() / "n2.png"));
  EXPECT_NE(slurp(root() / "n1.png"), slurp(root() / "n3.png"));
}

TEST_F(CliPipeline, JpegEncodeDecodeAndTranscodeRefusal) {
  const fs::path in = dataset() / "gan" / "g00000.png";
  const fs::path jpg = root() / "x.jpg";
  const fs::path back = root() / "x.png";
  ASSERT_EQ(run(std::string(CLI_BINARY) + " jpeg --in " + q(in) + " --out " +
                q(jpg) + " --qf 90")
                .exit_code,
            0);
  const std::string bytes = slurp(jpg);
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::uint8_t(bytes[0]), 0xff);
  EXPECT_EQ(std::uint8_t(bytes[1]), 0xd8);

  ASSERT_EQ(run(std::string(CLI_BINARY) + " jpeg --in " + q(jpg) + " --out " +
                q(back))
                .exit_code,
            0);
  const RgbImage round = load_image(back.string());
  EXPECT_EQ(round.width, 24);
  EXPECT_EQ(round.height, 24);

  EXPECT_EQ(run(std::string(CLI_BINARY) + " jpeg --in " + q(jpg) + " --out " +
                q(root() / "y.jpg"))
                .exit_code,
            2);
  EXPECT_EQ(run(std::string(CLI_BINARY) + " jpeg --in " + q(in) + " --out " +
                q(jpg) + " --qf 0")
                .exit_code,
            1);
}

TEST_F(CliPipeline, EvalPrintsMetricsAndWritesSingleRow) {
  const fs::path rep = root() / "clean.csv";
  const RunResult r =
      run(std::string(CLI_BINARY) + " eval --model " + q(model()) +
          " --corpus " + q(corpus()) + " --dataset-label synthetic --out " +
          q(rep));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("accuracy "), std::string::npos);
  EXPECT_NE(r.output.find("recall-gan"), std::string::npos);

  const std::string body = slurp(rep);
  EXPECT_EQ(line_count(body), 2);
  EXPECT_NE(body.find("operation,parameter,dataset,network,accuracy"),
            std::string::npos);
  EXPECT_NE(body.find("Clean,-,synthetic,"), std::string::npos);
}

TEST_F(CliPipeline, RobustnessEmitsOneRowPerAttack) {
  const fs::path rep = root() / "attacks.csv";
  const RunResult r =
      run(std::string(CLI_BINARY) + " robustness --model " + q(model()) +
          " --in " + q(dataset()) + " --attacks gamma:0.9,median:3" +
          " --out " + q(rep));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string body = slurp(rep);
  EXPECT_EQ(line_count(body), 3);  // header + two attacks
  EXPECT_NE(body.find("Gamma correction,0.9"), std::string::npos);
  EXPECT_NE(body.find("Median filter,3 x 3"), std::string::npos);
}

TEST_F(CliPipeline, RobustnessJpegModeSweepsQualities) {
  const fs::path rep = root() / "qf.json";
  const RunResult r =
      run(std::string(CLI_BINARY) + " robustness --model " + q(model()) +
          " --in " + q(dataset()) + " --mode jpeg --qf-eval 80,90" +
          " --format json --out " + q(rep));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::ifstream in(rep);
  const nlohmann::json j = nlohmann::json::parse(in);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["operation"], "JPEG compression");
  EXPECT_EQ(j[0]["parameter"], "80");
  EXPECT_EQ(j[1]["parameter"], "90");
}

TEST_F(CliPipeline, ReportMergesMixedFormats) {
  const fs::path merged = root() / "merged.csv";
  const RunResult r =
      run(std::string(CLI_BINARY) + " report --in " + q(root() / "clean.csv") +
          " --in " + q(root() / "qf.json") + " --out " + q(merged));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string body = slurp(merged);
  EXPECT_EQ(line_count(body), 4);  // header + 1 clean + 2 jpeg rows
  EXPECT_NE(body.find("Clean,-"), std::string::npos);
  EXPECT_NE(body.find("JPEG compression,90"), std::string::npos);
}

TEST_F(CliPipeline, HeatmapWritesPgm) {
  const fs::path out = root() / "heat.pgm";
  const RunResult r = run(std::string(CLI_BINARY) + " heatmap --in " +
                          q(dataset() / "real" / "r00002.png") +
                          " --plane rg --out " + q(out));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string body = slurp(out);
  ASSERT_GE(body.size(), 2u);
  EXPECT_EQ(body.substr(0, 2), "P5");
  EXPECT_NE(body.find("256 256"), std::string::npos);
}

TEST_F(CliPipeline, NumericFaultsExitThree) {
  // A checkpoint with a poisoned bias makes every forward pass non-finite.
  NetworkSpec spec;
  spec.input_planes = 6;
  spec.input_size = kCoocBins;
  spec.layers = {{LayerKind::kFlatten},
                 {LayerKind::kDense, 0, 0, 1},
                 {LayerKind::kSigmoid}};
  Network<float> net(spec);
  net.parameters().back()->data[0] = std::numeric_limits<float>::quiet_NaN();
  const fs::path bad = root() / "poisoned.ccnw";
  save_checkpoint(net, bad.string());

  const RunResult r = run(std::string(CLI_BINARY) + " eval --model " + q(bad) +
                          " --corpus " + q(corpus()));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("error"), std::string::npos);
}
