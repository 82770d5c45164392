// Copyright 2026 The VTLayout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vtlayout_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the tool with `args`, returning its exit status; stdout goes to `out`.
int RunTool(const std::string& args, const fs::path& out = "/dev/null") {
  const std::string cmd = std::string(VTLAYOUT_CLI_PATH) + " -q " + args + " > '" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = Slurp(e.path());
  }
  return out;
}

int CountLinesStartingWith(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

const std::string kSmall =
    "--set corpus.pages=20 dvfe.pretrain_epochs=0 train.epochs=5 train.batch_size=32 -j 1";

TEST(Cli, SynthWritesAReproducibleCorpus) {
  const fs::path root = Scratch("synth");
  ASSERT_EQ(RunTool("synth -o " + (root / "a").string() + " --pages 4"), 0);
  ASSERT_EQ(RunTool("synth -o " + (root / "b").string() + " --pages 4"), 0);
  const auto a = Tree(root / "a");
  EXPECT_EQ(a, Tree(root / "b"));
  int pngs = 0;
  for (const auto& [name, bytes] : a) pngs += name.size() > 4 && name.substr(name.size() - 4) == ".png";
  EXPECT_EQ(pngs, 4);
  EXPECT_TRUE(a.count("train.json"));
  EXPECT_TRUE(a.count("val.json"));
  EXPECT_TRUE(a.count("texts.json"));
  fs::remove_all(root);
}

TEST(Cli, SynthRefusesBadInput) {
  const fs::path root = Scratch("synth_bad");
  EXPECT_EQ(RunTool("synth -o " + (root / "zero").string() + " --pages 0"), 1);
  ASSERT_EQ(RunTool("synth -o " + (root / "x").string() + " --pages 2"), 0);
  EXPECT_EQ(RunTool("synth -o " + (root / "x").string() + " --pages 2"), 1);
  EXPECT_EQ(RunTool("synth -o " + (root / "x").string() + " --pages 2 --force"), 0);
  EXPECT_EQ(RunTool("synth"), 1);
  EXPECT_EQ(RunTool("--set nosuch.key=1 ablate -o " + root.string()), 1);
  fs::remove_all(root);
}

TEST(Cli, ExtractTrainEvaluateOnADiskCorpus) {
  const fs::path root = Scratch("staged");
  const std::string corpus = (root / "corpus").string();
  const std::string cache = "--cache-dir " + (root / "cache").string();
  const std::string common = cache + " " + kSmall + " ";
  ASSERT_EQ(RunTool("synth -o " + corpus + " --pages 10"), 0);
  // Training before extraction is a cache miss.
  EXPECT_EQ(RunTool(common + "train --corpus " + corpus + " -m " + (root / "m.vtlm").string()), 2);
  const fs::path log = root / "extract.txt";
  ASSERT_EQ(RunTool(common + "extract --corpus " + corpus, log), 0);
  EXPECT_NE(Slurp(log).find("computed"), std::string::npos);
  ASSERT_EQ(RunTool(common + "extract --corpus " + corpus, log), 0);
  EXPECT_NE(Slurp(log).find("computed 0 "), std::string::npos);
  ASSERT_EQ(RunTool(common + "train --corpus " + corpus + " -m " + (root / "m.vtlm").string()), 0);
  EXPECT_TRUE(fs::exists(root / "m.vtlm.trace.json"));
  ASSERT_EQ(RunTool(common + "evaluate --corpus " + corpus + " -m " + (root / "m.vtlm").string() + " -o " +
                (root / "report").string()),
            0);
  EXPECT_TRUE(fs::exists(root / "report" / "evaluate.json"));
  const fs::path printed = root / "printed.txt";
  ASSERT_EQ(RunTool("report " + (root / "report" / "evaluate.json").string(), printed), 0);
  EXPECT_NE(Slurp(printed).find("Figure"), std::string::npos);
  // A model file that is not one.
  std::ofstream(root / "junk.vtlm") << "not a model";
  EXPECT_EQ(RunTool(common + "evaluate --corpus " + corpus + " -m " + (root / "junk.vtlm").string() + " -o " +
                (root / "r2").string()),
            2);
  fs::remove_all(root);
}

TEST(Cli, AblateEmitsSevenRows) {
  const fs::path root = Scratch("ablate");
  ASSERT_EQ(RunTool("--cache-dir " + (root / "cache").string() + " " + kSmall + " ablate -o " + (root / "out").string()),
            0);
  const std::string text = Slurp(root / "out" / "ablation.txt");
  int rows = 0;
  for (const char* label : {"DVFE+SVFE+TFE ", "DVFE+SVFE ", "DVFE+TFE ", "SVFE+TFE ", "DVFE ", "TFE ", "SVFE "}) {
    rows += CountLinesStartingWith(text, label);
  }
  EXPECT_EQ(rows, 7);
  fs::remove_all(root);
}

TEST(Cli, CrossValidationEmitsFiveFoldsAndAMean) {
  const fs::path root = Scratch("cv");
  ASSERT_EQ(RunTool("--cache-dir " + (root / "cache").string() + " " + kSmall + " --set corpus.pages=30 cv -o " +
                (root / "out").string()),
            0);
  const std::string text = Slurp(root / "out" / "cv.txt");
  int folds = 0;
  for (int k = 1; k <= 5; ++k) folds += CountLinesStartingWith(text, "Fold" + std::to_string(k));
  EXPECT_EQ(folds, 5) << text;
  EXPECT_NE(text.find("Average"), std::string::npos);
  fs::remove_all(root);
}

}  // namespace
