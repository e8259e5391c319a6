// Runs the raterid executable end to end in a scratch directory.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("raterid_cli_" +
            std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("synth.conf",
          "households_size2 = 8\nhouseholds_size3 = 2\nhouseholds_size4 = 1\n"
          "events_per_user = 60\noverlap = 0.1\nrank = 2\nnoise_sigma = 5\n"
          "seed = 3\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  bool exists(const std::string& name) const { return fs::exists(dir_ / name); }

  // Exit status of `raterid args`, run inside the scratch directory; stdout
  // goes to out.txt and stderr to err.txt.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" RATERID_CLI_PATH
                            "' " + args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void synth() { ASSERT_EQ(run("synth --config synth.conf --out data"), 0); }

  static std::string data_flags() {
    return "--train data/train.tsv --households data/households.tsv ";
  }

  static std::size_t lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
  }

  fs::path dir_;
};

TEST_F(Cli, SynthWritesThreeFiles) {
  synth();
  EXPECT_TRUE(exists("data/train.tsv"));
  EXPECT_TRUE(exists("data/households.tsv"));
  EXPECT_TRUE(exists("data/test.tsv"));
}

TEST_F(Cli, SynthMissingConfigIsUsageError) {
  EXPECT_EQ(run("synth --config nowhere.conf --out data"), 2);
  EXPECT_FALSE(exists("data"));
}

TEST_F(Cli, SynthBadConfigFails) {
  write("bad.conf", "households_size2 = 3\n");
  EXPECT_NE(run("synth --config bad.conf --out data"), 0);
  EXPECT_FALSE(read("err.txt").empty());
}

TEST_F(Cli, SynthSameSeedSameFiles) {
  synth();
  const std::string first = read("data/train.tsv") + read("data/test.tsv");
  ASSERT_EQ(run("synth --config synth.conf --out data"), 0);
  EXPECT_EQ(read("data/train.tsv") + read("data/test.tsv"), first);
}

TEST_F(Cli, FitPrintsOneCostLinePerIteration) {
  synth();
  ASSERT_EQ(run("fit " + data_flags() + "--model model.txt --iterations 7"), 0);
  EXPECT_TRUE(exists("model.txt"));
  EXPECT_EQ(lines(read("out.txt")), 8u);  // header plus K lines
}

TEST_F(Cli, FitDefaults) {
  synth();
  ASSERT_EQ(run("fit " + data_flags() + "--model model.txt"), 0);
  EXPECT_EQ(lines(read("out.txt")), 51u);
}

TEST_F(Cli, FitZeroIterationsIsUsageError) {
  synth();
  EXPECT_EQ(run("fit " + data_flags() + "--model model.txt --iterations 0"), 2);
  EXPECT_FALSE(exists("model.txt"));
}

TEST_F(Cli, FitIsReproducible) {
  synth();
  ASSERT_EQ(run("fit " + data_flags() + "--model a.txt --iterations 5"), 0);
  ASSERT_EQ(run("fit " + data_flags() + "--model b.txt --iterations 5"), 0);
  EXPECT_EQ(read("a.txt"), read("b.txt"));
}

TEST_F(Cli, ClassifyPriorDay) {
  synth();
  ASSERT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier prior-day --output p.tsv"),
            0);
  const std::string text = read("p.tsv");
  EXPECT_EQ(text.rfind("household\tmovie\ttimestamp", 0), 0u);
  EXPECT_EQ(lines(text), 1 + lines(read("data/test.tsv")));
}

TEST_F(Cli, ClassifyUnifiedWithoutModelFails) {
  synth();
  EXPECT_NE(run("classify " + data_flags() +
                "--test data/test.tsv --classifier unified --features abcd "
                "--output p.tsv"),
            0);
  EXPECT_FALSE(exists("p.tsv"));
  // Without block (c) no factor model is needed.
  EXPECT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier unified --features abd "
                "--output p.tsv"),
            0);
}

TEST_F(Cli, ClassifyResidualOneSetPerAlpha) {
  synth();
  ASSERT_EQ(run("fit " + data_flags() + "--model m.txt --iterations 5"), 0);
  ASSERT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier residual --model m.txt "
                "--alpha 0.5,1,2 --output r.tsv"),
            0);
  const std::size_t events = lines(read("data/test.tsv"));
  EXPECT_EQ(lines(read("r.tsv")), 1 + 3 * events);
}

TEST_F(Cli, EvaluatePredictionsAgainstTruth) {
  synth();
  ASSERT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier prior-day --output p.tsv"),
            0);
  ASSERT_EQ(run("evaluate --predictions p.tsv --truth data/test.tsv "
                "--households data/households.tsv --output report.tsv"),
            0);
  const std::string report = read("report.tsv");
  EXPECT_NE(report.find("## per_household"), std::string::npos);
  EXPECT_NE(report.find("\nsummary classifier="), std::string::npos);
  EXPECT_NE(read("err.txt").find("summary classifier="), std::string::npos);
}

TEST_F(Cli, EvaluateCvReportsMeanAndSpread) {
  synth();
  ASSERT_EQ(run("evaluate --cv " + data_flags() +
                "--classifier prior-day,prior-bin --seeds 1,2,3,4,5 "
                "--output cv.tsv"),
            0);
  const std::string text = read("cv.tsv");
  EXPECT_NE(text.find("prior-day\tP\t"), std::string::npos);
  EXPECT_NE(text.find(" ± "), std::string::npos);
  EXPECT_NE(text.find("\t5\n"), std::string::npos);
}

TEST_F(Cli, EvaluateExportsHistograms) {
  synth();
  ASSERT_EQ(run("fit " + data_flags() + "--model m.txt --iterations 3"), 0);
  ASSERT_EQ(run("evaluate " + data_flags() +
                "--model m.txt --export-histograms hist"),
            0);
  EXPECT_TRUE(exists("hist/weekday_histogram.tsv"));
  EXPECT_TRUE(exists("hist/tv_histogram.tsv"));
  EXPECT_TRUE(exists("hist/residual_histogram.tsv"));
}

TEST_F(Cli, RunConfigFileWithCommandLineOverride) {
  synth();
  write("run.toml", "[classify]\nclassifier = \"prior-bin\"\nepsilon = 0.25\n");
  const std::string base =
      "--run-config run.toml classify " + data_flags() + "--test data/test.tsv ";
  ASSERT_EQ(run(base + "--output from_file.tsv"), 0);
  ASSERT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier prior-bin --epsilon 0.25 "
                "--output explicit.tsv"),
            0);
  EXPECT_EQ(read("from_file.tsv"), read("explicit.tsv"));
  ASSERT_EQ(run(base + "--classifier prior-day --output override.tsv"), 0);
  ASSERT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier prior-day --epsilon 0.25 "
                "--output expected.tsv"),
            0);
  EXPECT_EQ(read("override.tsv"), read("expected.tsv"));
}

TEST_F(Cli, RocAndBaseline) {
  synth();
  ASSERT_EQ(run("roc " + data_flags() +
                "--test data/test.tsv --classifier prior-day --points 5"),
            0);
  EXPECT_EQ(lines(read("out.txt")), 7u);
  ASSERT_EQ(run("baseline --size2 272 --size3 14 --size4 4"), 0);
  EXPECT_NE(read("out.txt").find("0.511"), std::string::npos);
}

TEST_F(Cli, UnknownClassifierIsUsageError) {
  synth();
  EXPECT_EQ(run("classify " + data_flags() +
                "--test data/test.tsv --classifier psychic"),
            2);
}

}  // namespace
