// Copyright 2026 The semaug Authors. All Rights Reserved.
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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest_torch.hpp"
#include "json.hpp"
#include "semaug/augment/synthesis.hpp"
#include "semaug/data.hpp"
#include "semaug/image_io.hpp"
#include "semaug/vaegan/model.hpp"
#include "test_util.hpp"

using namespace semaug;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kSmall =
    " --classes 3 --head 12 --tail 3 --decay 0.5 --image-size 16 --test-per-class 4";
const std::string kVae = " --steps 10 --latent-dim 8 --base-channels 4 --vae-batch-size 8";
const std::string kCls = " --epochs 2 --tail-epochs 1 --width 4 --cls-batch-size 8";

struct Outcome {
  int code = -1;
  std::string err;
};

Outcome run(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + " " + SEMAUG_CLI_PATH + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream text;
  text << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json summary(const fs::path& out) { return json::parse(slurp(out / "run_summary.json")); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen-data writes manifests and a summary; reruns are identical") {
    const auto dir = test_util::scratch_dir("cli_gen");
    const auto out = dir / "a";
    REQUIRE(run("gen-data --seed 1 --out " + out.string() + kSmall, dir).code == 0);
    const auto m = data::load_manifest(out / "data" / "train" / "manifest.jsonl");
    CHECK(m.histogram() == std::vector<std::int64_t>{12, 6, 3});
    const auto s = summary(out);
    CHECK(s.at("command") == "gen-data");
    CHECK(s.at("config").at("data").at("decay") == 0.5);
    CHECK(s.at("config_hash").get<std::string>().size() == 16);
    CHECK(!s.at("version").get<std::string>().empty());
    for (const auto& [k, v] : s.at("artifacts").items()) CHECK(fs::exists(v.get<std::string>()));

    const auto again = dir / "b";
    REQUIRE(run("gen-data --seed 1 --out " + again.string() + kSmall, dir).code == 0);
    CHECK(slurp(out / "data" / "train" / "manifest.jsonl") ==
          slurp(again / "data" / "train" / "manifest.jsonl"));
    CHECK(slurp(out / "data" / "train" / "images" / (m[0].id + ".png")) ==
          slurp(again / "data" / "train" / "images" / (m[0].id + ".png")));
  }

  TEST_CASE("invalid decay exits 1 and names the flag") {
    const auto dir = test_util::scratch_dir("cli_decay");
    const auto r = run("gen-data --decay 1.5 --out " + (dir / "o").string(), dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("--decay") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o" / "run_summary.json"));
    CHECK(run("gen-data --no-such-flag 3", dir).code == 1);
    CHECK(run("", dir).code == 1);
  }

  TEST_CASE("precedence: flag over env over config file over default") {
    const auto dir = test_util::scratch_dir("cli_config");
    std::ofstream(dir / "c.toml") << "seed = 3\n[data]\ndecay = 0.5\nhead = 20\n";
    const auto out = (dir / "o").string();
    const std::string base = "gen-data --config " + (dir / "c.toml").string() + " --out " + out +
                             " --classes 3 --tail 3 --image-size 8 --test-per-class 1";
    REQUIRE(run(base, dir).code == 0);
    auto s = summary(out);
    CHECK(s.at("config").at("seed") == 3);
    CHECK(s.at("config").at("data").at("head") == 20);
    CHECK(s.at("config").at("data").at("decay") == 0.5);
    CHECK(s.at("config").at("data").at("test-per-class") == 1);

    REQUIRE(run(base, dir, "SEMAUG_SEED=9").code == 0);
    CHECK(summary(out).at("config").at("seed") == 9);
    REQUIRE(run(base + " --seed 11 --head 15", dir, "SEMAUG_SEED=9").code == 0);
    s = summary(out);
    CHECK(s.at("config").at("seed") == 11);
    CHECK(s.at("config").at("data").at("head") == 15);

    std::ofstream(dir / "bad.toml") << "[data]\nnot_a_key = 1\n";
    CHECK(run("gen-data --config " + (dir / "bad.toml").string() + " --out " + out, dir).code == 1);
  }

  TEST_CASE("pipeline: train-vaegan, augment at zero strength, compare") {
    const auto dir = test_util::scratch_dir("cli_pipeline");
    const auto out = dir / "o";
    const std::string o = " --out " + out.string();
    REQUIRE(run("gen-data" + o + kSmall, dir).code == 0);

    REQUIRE(run("compare" + o + kCls, dir).code == 2);
    CHECK_FALSE(fs::exists(out / "run_summary.json"));

    REQUIRE(run("train-vaegan" + o + kVae, dir).code == 0);
    CHECK(vaegan::read_loss_log(out / "vaegan" / "loss_log.csv").size() == 10);
    const auto model = vaegan::VaeGan::load(out / "vaegan" / "model.pt");
    const auto again = vaegan::VaeGan::load(out / "vaegan" / "model.pt");
    const auto train = data::load_manifest(out / "data" / "train" / "manifest.jsonl");
    const auto probe = train.stack_all();
    CHECK(test_util::bit_identical(model.reconstruct(probe), again.reconstruct(probe)));

    REQUIRE(run("augment --strength 0 --grid-k 3" + o, dir).code == 0);
    const auto aug = augment::load_augmented(out / "augment" / "augmented.jsonl", train);
    CHECK(aug.size() == 2u * 12u - 6u - 3u);
    for (const auto& g : aug.samples()) {
      const auto& src = train[*train.find(g.source_id)];
      const auto expected = image_io::quantize(model.reconstruct(src.image.unsqueeze(0)).squeeze(0));
      CHECK(torch::equal(g.image, expected));
    }
    const image_io::GridGeometry sources{3, 4, 16, 16};
    const image_io::GridGeometry classes{3, 3, 16, 16};
    CHECK_NOTHROW(image_io::read_png(out / "augment" / "grid_sources.png",
                                     ImageShape{3, sources.height(), sources.width()}));
    CHECK_NOTHROW(image_io::read_png(out / "augment" / "grid_classes.png",
                                     ImageShape{3, classes.height(), classes.width()}));

    REQUIRE(run("compare" + o + kCls, dir).code == 0);
    const auto csv = slurp(out / "compare" / "runs.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
    const auto md = slurp(out / "compare" / "table.md");
    CHECK(md.find("| resnet | Ours |") != std::string::npos);
    const auto s = summary(out);
    CHECK(s.at("command") == "compare");
    CHECK(s.at("config").at("strategies").size() == 3);
    for (const auto& [k, v] : s.at("artifacts").items()) CHECK(fs::exists(v.get<std::string>()));
  }

  TEST_CASE("identical inputs reproduce identical reports") {
    const auto dir = test_util::scratch_dir("cli_repro");
    for (const char* name : {"a", "b"}) {
      const std::string o = " --out " + (dir / name).string();
      REQUIRE(run("all --seeds 4 --strategies none,ours" + o + kSmall + kVae + kCls, dir).code == 0);
    }
    CHECK(slurp(dir / "a" / "compare" / "runs.csv") == slurp(dir / "b" / "compare" / "runs.csv"));
    CHECK(slurp(dir / "a" / "compare" / "reports" / "Ours_seed4.json") ==
          slurp(dir / "b" / "compare" / "reports" / "Ours_seed4.json"));
    CHECK(slurp(dir / "a" / "augment" / "augmented.jsonl") ==
          slurp(dir / "b" / "augment" / "augmented.jsonl"));
  }
}
