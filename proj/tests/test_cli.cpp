/* Copyright 2026 The polyglot-ctc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "pctc/model.hpp"

using namespace pctc;
namespace fs = std::filesystem;

#ifndef PCTC_CLI
#error "PCTC_CLI must point at the polyglot-ctc binary"
#endif

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pctc_cli_tests";

int run_cli(const std::string& args) {
  std::string cmd = std::string(PCTC_CLI) + " " + args + " > " +
                    (kRoot / "stdout.txt").string() + " 2> " +
                    (kRoot / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string cli_stdout() {
  std::ifstream in(kRoot / "stdout.txt");
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Byte-wise comparison of two directory trees.
bool trees_identical(const fs::path& a, const fs::path& b) {
  std::map<std::string, std::string> left, right;
  for (auto& entry : fs::recursive_directory_iterator(a))
    if (entry.is_regular_file())
      left[fs::relative(entry.path(), a).string()] =
          read_file(entry.path());
  for (auto& entry : fs::recursive_directory_iterator(b))
    if (entry.is_regular_file())
      right[fs::relative(entry.path(), b).string()] =
          read_file(entry.path());
  return left == right;
}

std::string gen_config(const fs::path& out_dir) {
  return "out_dir = " + out_dir.string() + "\n" +
         "seed = 1\n"
         "feature_dim = 4\n"
         "pool_size = 12\n"
         "pool_seed = 5\n"
         "utterances = 30\n"
         "phones_per_utterance = 2 4\n"
         "frames_per_phone = 2 3\n"
         "noise_std = 0.3\n"
         "languages = L1,L2,L3\n"
         "L1.phones = 0 1 2 3 4 5\n"
         "L2.phones = 0 1 2 3 6 7\n"
         "L3.phones = 0 1 2 3 8 9\n";
}

struct Fixture {
  fs::path dir;
  explicit Fixture(const std::string& name) : dir(kRoot / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
};

void gen_corpora(const Fixture& fx) {
  write_file(fx.dir / "gen.conf", gen_config(fx.dir / "data"));
  REQUIRE(run_cli("gen-synth " + (fx.dir / "gen.conf").string()) == 0);
}

std::string base_train_config(const Fixture& fx) {
  return "layers = 1\n"
         "hidden = 8\n"
         "learning_rate = 0.3\n"
         "epochs = 6\n"
         "batch_size = 4\n"
         "seed = 31\n"
         "out_dir = " +
         (fx.dir / "run").string() + "\n";
}

}  // namespace

TEST_CASE("gen-synth writes one corpus directory per language") {
  Fixture fx("gen");
  gen_corpora(fx);
  for (const char* lang : {"L1", "L2", "L3"}) {
    CHECK(fs::is_directory(fx.dir / "data" / lang));
    CHECK(fs::is_regular_file(fx.dir / "data" / lang / "inventory.txt"));
    CHECK(fs::is_regular_file(fx.dir / "data" / lang / "transcripts.tsv"));
  }
  CHECK(cli_stdout().find("L1: 30 utterances") != std::string::npos);
}

TEST_CASE("gen-synth rejects duplicate language ids") {
  Fixture fx("gen_dup");
  std::string config = gen_config(fx.dir / "data");
  config.replace(config.find("L1,L2,L3"), 8, "L1,L1,L3");
  write_file(fx.dir / "gen.conf", config);
  CHECK(run_cli("gen-synth " + (fx.dir / "gen.conf").string()) == 2);
}

TEST_CASE("gen-synth reruns are byte identical") {
  Fixture fx("gen_det");
  write_file(fx.dir / "gen.conf", gen_config(fx.dir / "a"));
  write_file(fx.dir / "gen2.conf", gen_config(fx.dir / "b"));
  REQUIRE(run_cli("gen-synth " + (fx.dir / "gen.conf").string()) == 0);
  REQUIRE(run_cli("gen-synth " + (fx.dir / "gen2.conf").string()) == 0);
  CHECK(trees_identical(fx.dir / "a", fx.dir / "b"));
}

TEST_CASE("unknown config keys are rejected before any work") {
  Fixture fx("gen_unknown");
  write_file(fx.dir / "gen.conf",
             gen_config(fx.dir / "data") + "mystery_knob = 7\n");
  CHECK(run_cli("gen-synth " + (fx.dir / "gen.conf").string()) == 2);
  CHECK(!fs::exists(fx.dir / "data"));
}

TEST_CASE("train writes a model and loss curves deterministically") {
  Fixture fx("train");
  gen_corpora(fx);
  std::string config = "mode = monolingual\n"
                       "corpora = " +
                       (fx.dir / "data" / "L1").string() + "\n" +
                       base_train_config(fx);
  write_file(fx.dir / "train.conf", config);
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string()) == 0);
  CHECK(fs::is_regular_file(fx.dir / "run" / "model.pctc"));
  CHECK(fs::is_regular_file(fx.dir / "run" / "curves.csv"));
  std::string head = read_file(fx.dir / "run" / "curves.csv");
  CHECK(head.rfind("epoch,language,mean_loss,dev_per\n", 0) == 0);

  // Identical rerun into a second directory: byte-identical outputs.
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string() + " --out " +
                  (fx.dir / "run2").string()) == 0);
  CHECK(trees_identical(fx.dir / "run", fx.dir / "run2"));
}

TEST_CASE("multilingual training requires at least two corpora") {
  Fixture fx("train_multi_one");
  gen_corpora(fx);
  write_file(fx.dir / "train.conf",
             "mode = multilingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "\n" +
                 base_train_config(fx));
  CHECK(run_cli("train " + (fx.dir / "train.conf").string()) == 2);
}

TEST_CASE("adapt keeps the donor encoder bitwise and writes outputs") {
  Fixture fx("adapt");
  gen_corpora(fx);
  write_file(fx.dir / "donor.conf",
             "mode = multilingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "," +
                 (fx.dir / "data" / "L2").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "donor.conf").string() + " --out " +
                  (fx.dir / "donor").string()) == 0);

  write_file(fx.dir / "adapt.conf",
             "model = " + (fx.dir / "donor" / "model.pctc").string() + "\n" +
                 "target = " + (fx.dir / "data" / "L3").string() + "\n" +
                 "mode = adapt_softmax\n"
                 "fraction = 0.5\n"
                 "learning_rate = 2.0\n"
                 "epochs = 5\n"
                 "batch_size = 4\n"
                 "seed = 37\n"
                 "out_dir = " +
                 (fx.dir / "adapted").string() + "\n");
  REQUIRE(run_cli("adapt " + (fx.dir / "adapt.conf").string()) == 0);

  MultiHeadModel donor =
      load_model((fx.dir / "donor" / "model.pctc").string());
  MultiHeadModel adapted =
      load_model((fx.dir / "adapted" / "model.pctc").string());
  REQUIRE(donor.encoder.layers.size() == adapted.encoder.layers.size());
  for (std::size_t l = 0; l < donor.encoder.layers.size(); ++l) {
    CHECK(donor.encoder.layers[l].fwd.w_input ==
          adapted.encoder.layers[l].fwd.w_input);
    CHECK(donor.encoder.layers[l].bwd.w_recurrent ==
          adapted.encoder.layers[l].bwd.w_recurrent);
    CHECK(donor.encoder.layers[l].fwd.bias ==
          adapted.encoder.layers[l].fwd.bias);
  }
  CHECK(adapted.heads.size() == 1);
  CHECK(adapted.heads.count("L3") == 1);
}

TEST_CASE("a missing donor model is a validation error") {
  Fixture fx("adapt_missing");
  gen_corpora(fx);
  write_file(fx.dir / "adapt.conf",
             "model = " + (fx.dir / "nope.pctc").string() + "\n" +
                 "target = " + (fx.dir / "data" / "L3").string() + "\n" +
                 "mode = adapt_softmax\nout_dir = " +
                 (fx.dir / "adapted").string() + "\n");
  CHECK(run_cli("adapt " + (fx.dir / "adapt.conf").string()) == 2);
}

TEST_CASE("decode and eval run against a trained model") {
  Fixture fx("eval");
  gen_corpora(fx);
  write_file(fx.dir / "train.conf",
             "mode = monolingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string()) == 0);
  std::string model = (fx.dir / "run" / "model.pctc").string();
  std::string corpus = (fx.dir / "data" / "L1").string();

  REQUIRE(run_cli("decode " + model + " " + corpus + " --out " +
                  (fx.dir / "hyp.tsv").string()) == 0);
  std::string hyp = read_file(fx.dir / "hyp.tsv");
  CHECK(hyp.find("L1_0000\t") != std::string::npos);

  REQUIRE(run_cli("eval " + model + " " + corpus + " --out " +
                  (fx.dir / "per_utt.tsv").string()) == 0);
  CHECK(cli_stdout().rfind("PER ", 0) == 0);
  CHECK(read_file(fx.dir / "per_utt.tsv")
            .rfind("utterance_id\tref_len", 0) == 0);

  // Unknown language routes to exit 2.
  CHECK(run_cli("eval " + model + " " + corpus + " --language martian") ==
        2);
}

TEST_CASE("eval of an empty corpus is a validation error") {
  Fixture fx("eval_empty");
  gen_corpora(fx);
  write_file(fx.dir / "train.conf",
             "mode = monolingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string()) == 0);

  fs::create_directories(fx.dir / "empty" / "features");
  fs::copy_file(fx.dir / "data" / "L1" / "inventory.txt",
                fx.dir / "empty" / "inventory.txt");
  write_file(fx.dir / "empty" / "corpus.meta", "language_id=L1\n");
  write_file(fx.dir / "empty" / "transcripts.tsv", "");
  CHECK(run_cli("eval " + (fx.dir / "run" / "model.pctc").string() + " " +
                (fx.dir / "empty").string()) == 2);
}

TEST_CASE("sweep validates fractions and writes the grid") {
  Fixture fx("sweep");
  gen_corpora(fx);
  write_file(fx.dir / "donor.conf",
             "mode = multilingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "," +
                 (fx.dir / "data" / "L2").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "donor.conf").string() + " --out " +
                  (fx.dir / "donor").string()) == 0);

  std::string sweep_base =
      "donors = " + (fx.dir / "donor" / "model.pctc").string() + "\n" +
      "donor_names = bi\n" + "target = " +
      (fx.dir / "data" / "L3").string() + "\n" +
      "mode = adapt_softmax\n"
      "learning_rate = 2.0\n"
      "epochs = 4\n"
      "batch_size = 4\n"
      "seed = 37\n"
      "out_dir = " +
      (fx.dir / "sweepout").string() + "\n";

  write_file(fx.dir / "bad.conf", sweep_base + "fractions = 0.5,0.25\n");
  CHECK(run_cli("sweep " + (fx.dir / "bad.conf").string()) == 2);

  write_file(fx.dir / "sweep.conf", sweep_base + "fractions = 0.25,0.5\n");
  REQUIRE(run_cli("sweep " + (fx.dir / "sweep.conf").string()) == 0);
  std::string csv = read_file(fx.dir / "sweepout" / "sweep.csv");
  CHECK(csv.rfind("donor,mode,fraction,seed,dev_per,epochs,wall_seconds\n",
                  0) == 0);
  // Header + baseline + 1 donor x 2 fractions.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(cli_stdout().find("crossover bi:") != std::string::npos);
}

TEST_CASE("an overfit toy model scores its own training corpus cleanly") {
  Fixture fx("overfit_eval");
  // Generator defaults: 200 utterances at noise 0.3.
  write_file(fx.dir / "gen.conf",
             "out_dir = " + (fx.dir / "data").string() + "\n" +
                 "seed = 11\npool_seed = 11\n"
                 "languages = L1\n"
                 "L1.phones = 0 1 2 3 4 5 6 7 8 9\n"
                 "L1.seed = 12\n");
  REQUIRE(run_cli("gen-synth " + (fx.dir / "gen.conf").string()) == 0);
  write_file(fx.dir / "train.conf",
             "mode = monolingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() +
                 "\nlearning_rate = 0.3\nepochs = 25\nseed = 13\n"
                 "out_dir = " +
                 (fx.dir / "run").string() + "\n");
  auto start = std::chrono::steady_clock::now();
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string()) == 0);
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  CHECK(seconds < 300.0);

  REQUIRE(run_cli("eval " + (fx.dir / "run" / "model.pctc").string() + " " +
                  (fx.dir / "data" / "L1").string()) == 0);
  std::string line = cli_stdout();
  REQUIRE(line.rfind("PER ", 0) == 0);
  double per = std::stod(line.substr(4));
  INFO(line);
  CHECK(per < 0.05);
}

TEST_CASE("the workers environment override does not change results") {
  Fixture fx("workers");
  gen_corpora(fx);
  write_file(fx.dir / "train.conf",
             "mode = monolingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "train.conf").string()) == 0);

  std::string env_cmd =
      "POLYGLOT_CTC_WORKERS=2 " + std::string(PCTC_CLI) + " train " +
      (fx.dir / "train.conf").string() + " --out " +
      (fx.dir / "run_mt").string() + " > " +
      (kRoot / "stdout.txt").string() + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(trees_identical(fx.dir / "run", fx.dir / "run_mt"));
}

TEST_CASE("opting into wall-clock timing fills the sweep column") {
  Fixture fx("timing");
  gen_corpora(fx);
  write_file(fx.dir / "donor.conf",
             "mode = multilingual\ncorpora = " +
                 (fx.dir / "data" / "L1").string() + "," +
                 (fx.dir / "data" / "L2").string() + "\n" +
                 base_train_config(fx));
  REQUIRE(run_cli("train " + (fx.dir / "donor.conf").string() + " --out " +
                  (fx.dir / "donor").string()) == 0);
  write_file(fx.dir / "sweep.conf",
             "donors = " + (fx.dir / "donor" / "model.pctc").string() +
                 "\ntarget = " + (fx.dir / "data" / "L3").string() +
                 "\nfractions = 1.0\nmode = adapt_softmax\n"
                 "learning_rate = 2.0\nepochs = 6\nbatch_size = 4\n"
                 "seed = 37\ntiming = wall\nout_dir = " +
                 (fx.dir / "sweepout").string() + "\n");
  REQUIRE(run_cli("sweep " + (fx.dir / "sweep.conf").string()) == 0);

  std::ifstream csv(fx.dir / "sweepout" / "sweep.csv");
  std::string line;
  REQUIRE(std::getline(csv, line));  // header
  bool any_positive = false;
  while (std::getline(csv, line)) {
    auto pos = line.rfind(',');
    REQUIRE(pos != std::string::npos);
    double wall = std::stod(line.substr(pos + 1));
    CHECK(wall >= 0.0);
    any_positive = any_positive || wall > 0.0;
  }
  CHECK(any_positive);
}
