// Copyright 2026 The clawsat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clawsat/checkpoint.hpp"
#include "clawsat/cli.hpp"
#include "json.hpp"

namespace clawsat {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"clawsat"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("clawsat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  std::size_t entries() const {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir_), fs::directory_iterator()));
  }
  fs::path dir_;
};

const std::vector<std::string> kSmall = {"--embed", "8", "--hidden", "8", "--proj", "8",
                                                   "--dec-hidden", "8", "--batch-size", "8",
                                                   "--epochs", "1", "--attack-iterations", "1"};

TEST_F(CliTest, Help) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"gen-corpus", "pretrain", "finetune", "attack", "eval", "sweep", "landscape", "ebe",
                          "reproduce-desk"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_EQ(cli({"pretrain", "--help"}).code, 0);
}

TEST_F(CliTest, UnknownSubcommand) {
  const CliRun r = cli({"bogus", "--out", path("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  EXPECT_EQ(entries(), 0u);
}

TEST_F(CliTest, UsageErrorsHaveNoSideEffects) {
  EXPECT_EQ(cli({"pretrain", "--out", path("p")}).code, 2);
  EXPECT_EQ(cli({"gen-corpus", "--out", path("c"), "--size", "30"}).code, 0);
  const std::size_t before = entries();
  EXPECT_EQ(cli({"pretrain", "--corpus", path("c"), "--out", path("p"), "--tau", "0"}).code, 2);
  EXPECT_EQ(cli({"pretrain", "--corpus", path("c"), "--out", path("p"), "--mode", "nope"}).code, 2);
  EXPECT_EQ(cli({"finetune", "--corpus", path("c"), "--out", path("f")}).code, 2);
  EXPECT_EQ(cli({"eval", "--ckpt", path("missing.ckpt"), "--corpus", path("c"), "--out", path("e.json")}).code, 1);
  EXPECT_EQ(entries(), before);
  EXPECT_FALSE(fs::exists(path("e.json")));
}

TEST_F(CliTest, Pipeline) {
  ASSERT_EQ(cli({"gen-corpus", "--out", path("c"), "--size", "60", "--seed", "2"}).code, 0);
  for (const char* f : {"train.jsonl", "valid.jsonl", "test.jsonl", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "c" / f)) << f;
  }

  std::vector<std::string> pre{"pretrain", "--corpus", path("c"), "--out", path("p"), "--mode", "claw"};
  pre.insert(pre.end(), kSmall.begin(), kSmall.end());
  std::vector<const char*> argv{"clawsat"};
  for (const auto& s : pre) argv.push_back(s.c_str());
  std::ostringstream o, e;
  ASSERT_EQ(run(static_cast<int>(argv.size()), argv.data(), o, e), 0) << e.str();
  EXPECT_TRUE(fs::exists(dir_ / "p" / "checkpoint.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "p" / "train_log.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "p" / "epoch-001.ckpt"));
  const auto pm = nlohmann::json::parse(slurp(dir_ / "p" / "manifest.json"));
  EXPECT_EQ(pm.at("command").get<std::string>().rfind("pretrain ", 0), 0u);
  EXPECT_EQ(pm.at("config").at("mode"), "pretrain_claw");

  std::vector<std::string> ft{"finetune", "--corpus", path("c"), "--out", path("f"), "--from",
                              path("p/checkpoint.ckpt"), "--mode", "sat", "--tau", "1"};
  ft.insert(ft.end(), kSmall.begin(), kSmall.end());
  argv = {"clawsat"};
  for (const auto& s : ft) argv.push_back(s.c_str());
  ASSERT_EQ(run(static_cast<int>(argv.size()), argv.data(), o, e), 0) << e.str();
  const Checkpoint fck = load_checkpoint(dir_ / "f" / "checkpoint.ckpt");
  EXPECT_EQ(fck.config.at("mode"), "finetune_sat");
  const auto fm = nlohmann::json::parse(slurp(dir_ / "f" / "manifest.json"));
  EXPECT_FALSE(fm.at("lineage").empty());

  const std::string ck = path("f/checkpoint.ckpt");
  ASSERT_EQ(cli({"eval", "--ckpt", ck, "--corpus", path("c"), "--out", path("eval.json")}).code, 0);
  const auto ev = nlohmann::json::parse(slurp(dir_ / "eval.json"));
  EXPECT_GE(ev.at("gen_f1").get<double>(), 0.0);
  EXPECT_LE(ev.at("rob_f1").get<double>(), 100.0);
  EXPECT_TRUE(fs::exists(path("eval.json.manifest.json")));

  ASSERT_EQ(cli({"attack", "--ckpt", ck, "--corpus", path("c"), "--out", path("att.jsonl"), "--objective",
                 "contrastive", "--k", "2"}).code, 0);
  std::istringstream rows(slurp(dir_ / "att.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(rows, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_GE(j.at("objective_after").get<double>(), j.at("objective_before").get<double>() - 1e-6);
    ++n;
  }
  EXPECT_EQ(n, 6u);

  ASSERT_EQ(cli({"landscape", "--ckpt", ck, "--corpus", path("c"), "--out", path("l.csv"), "--steps", "3",
                 "--fraction", "0.5"}).code, 0);
  EXPECT_NE(slurp(dir_ / "l.csv").find("0,0,"), std::string::npos);
  ASSERT_EQ(cli({"ebe", "--ckpt", ck, "--corpus", path("c"), "--out", path("ebe.json"), "--sample", "5"}).code, 0);
  ASSERT_EQ(cli({"sweep", "--ckpt", ck, "--corpus", path("c"), "--out", path("sweep.json"), "--iterations",
                 "1"}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "sweep.json")).at("cells").size(), 9u);
}

TEST_F(CliTest, Idempotent) {
  ASSERT_EQ(cli({"gen-corpus", "--out", path("a"), "--size", "40", "--seed", "3"}).code, 0);
  ASSERT_EQ(cli({"gen-corpus", "--out", path("b"), "--size", "40", "--seed", "3"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "train.jsonl"), slurp(dir_ / "b" / "train.jsonl"));
  for (const char* out : {"p1", "p2"}) {
    std::vector<std::string> args{"pretrain", "--corpus", path("a"), "--out", path(out), "--mode",
                                  "random-views"};
    args.insert(args.end(), kSmall.begin(), kSmall.end());
    std::vector<const char*> argv{"clawsat"};
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream o, e;
    ASSERT_EQ(run(static_cast<int>(argv.size()), argv.data(), o, e), 0) << e.str();
  }
  EXPECT_EQ(slurp(dir_ / "p1" / "checkpoint.ckpt"), slurp(dir_ / "p2" / "checkpoint.ckpt"));
  EXPECT_EQ(slurp(dir_ / "p1" / "train_log.jsonl"), slurp(dir_ / "p2" / "train_log.jsonl"));
}

TEST_F(CliTest, BooleanFlagCanBeTurnedOff) {
  ASSERT_EQ(cli({"gen-corpus", "--out", path("c"), "--size", "30"}).code, 0);
  std::vector<std::string> args{"pretrain", "--corpus", path("c"), "--out", path("p"), "--adv-random-start=false"};
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  std::vector<const char*> argv{"clawsat"};
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream o, e;
  ASSERT_EQ(run(static_cast<int>(argv.size()), argv.data(), o, e), 0) << e.str();
  EXPECT_EQ(load_checkpoint(dir_ / "p" / "checkpoint.ckpt").config.at("adv_random_start"), "false");
}

}  // namespace
}  // namespace clawsat
