#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "crossdict/model_file.hpp"
#include "crossdict/pipelines.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::current_path() / "cli_work";

int run(const std::string& args) {
  const std::string cmd = std::string(CROSSDICT_CLI) + " " + args + " >" +
                          (kWork / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string path(const std::string& name) { return (kWork / name).string(); }

void setup() {
  static bool done = false;
  if (done) return;
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  REQUIRE(run("synth image --rows 48 --cols 48 --seed 3 --out " + path("train.pgm")) == 0);
  REQUIRE(run("synth image --rows 32 --cols 32 --seed 9 --out " + path("test.pgm")) == 0);
  REQUIRE(run("train --data " + path("train.pgm") +
              " --patch 4x4 --t-low 8 --t-high 32 --k-low 2 --k-high 3 --iters 3 --seed 5 --out " +
              path("model.csd")) == 0);
  done = true;
}

std::string two_scale_train(const std::string& out) {
  return "train --data " + path("train.pgm") +
         " --patch 4x4 --t-low 8 --t-high 32 --k-low 2 --k-high 3 --iters 3 --seed 5 --out " + out;
}

}  // namespace

TEST_CASE("train writes a loadable two-scale model") {
  setup();
  const crossdict::Model m = crossdict::load_model(path("model.csd"));
  REQUIRE(std::holds_alternative<crossdict::CrossScaleModel>(m));
  const auto& cs = std::get<crossdict::CrossScaleModel>(m);
  CHECK(cs.t_low() == 8);
  CHECK(cs.t_high() == 32);
  CHECK(cs.q() == 4);
}

TEST_CASE("same seed gives byte-identical models") {
  setup();
  REQUIRE(run(two_scale_train(path("again.csd"))) == 0);
  CHECK(slurp(path("model.csd")) == slurp(path("again.csd")));
}

TEST_CASE("recover appends a metrics row") {
  setup();
  const std::string csv = path("metrics.csv");
  fs::remove(csv);
  for (const char* method : {"omp", "zerotree"}) {
    REQUIRE(run("recover denoise --model " + path("model.csd") + " --input " + path("test.pgm") +
                " --method " + method + " --noise-snr 15 --seed 2 --out " + path("est.pgm") +
                " --metrics " + csv) == 0);
  }
  std::istringstream in(slurp(csv));
  std::string header, a, b, extra;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header == crossdict::kBenchmarkCsvHeader);
  CHECK(a.rfind("denoise,omp-single,16,32,", 0) == 0);
  CHECK(b.rfind("denoise,zerotree,16,32,8,", 0) == 0);
  CHECK_FALSE(std::getline(in, extra));
  CHECK(fs::file_size(path("est.pgm")) > 0);
}

TEST_CASE("recover supports inpainting") {
  setup();
  CHECK(run("recover inpaint --model " + path("model.csd") + " --input " + path("test.pgm") +
            " --undersampling 2 --seed 4 --out " + path("inp.pgm")) == 0);
}

TEST_CASE("non-integer dictionary sizes are usage errors") {
  setup();
  CHECK(run("train --data " + path("train.pgm") + " --patch 4x4 --t-high 32.5 --out " +
            path("x.csd")) == 2);
  CHECK(run("train --data " + path("train.pgm") + " --patch 4x4 --t-low abc --out " +
            path("x.csd")) == 2);
  CHECK_FALSE(fs::exists(path("x.csd")));
}

TEST_CASE("invalid model configuration exits 2") {
  setup();
  CHECK(run("train --data " + path("train.pgm") + " --patch 4x4 --t-low 5 --t-high 32 --out " +
            path("y.csd")) == 2);
}

TEST_CASE("corrupted model is rejected") {
  setup();
  std::string bytes = slurp(path("model.csd"));
  bytes[bytes.size() / 2] ^= 0x5a;
  {
    std::ofstream out(path("bad.csd"), std::ios::binary);
    out << bytes;
  }
  CHECK(run("recover denoise --model " + path("bad.csd") + " --input " + path("test.pgm") +
            " --out " + path("bad.pgm")) == 1);
  CHECK(slurp(path("last.log")).find("checksum") != std::string::npos);
}

TEST_CASE("malformed sweep reports its location") {
  setup();
  {
    std::ofstream out(path("bad_sweep.json"));
    out << "[\n  {\"t\": 32,\n  }\n]\n";
  }
  CHECK(run("benchmark --data " + path("train.pgm") + " --patch 4x4 --sweep " +
            path("bad_sweep.json") + " --out " + path("b.csv")) == 2);
  CHECK(slurp(path("last.log")).find("bad_sweep.json:") != std::string::npos);

  {
    std::ofstream out(path("unknown.json"));
    out << "[{\"t\": 32, \"colour\": 1}]";
  }
  CHECK(run("benchmark --data " + path("train.pgm") + " --patch 4x4 --sweep " +
            path("unknown.json") + " --out " + path("b.csv")) == 2);
}

TEST_CASE("benchmark writes the documented CSV") {
  setup();
  {
    std::ofstream out(path("sweep.json"));
    out << R"({"configs": [{"t": 16, "k": 2}, {"t_high": 32, "t_low": 8, "k_low": 2, "k_high": 2}]})";
  }
  REQUIRE(run("benchmark --data " + path("train.pgm") + " --test " + path("test.pgm") +
              " --patch 4x4 --stride 2x2 --iters 2 --reps 1 --noise-snr 20 --sweep " +
              path("sweep.json") + " --out " + path("bench.csv")) == 0);
  std::istringstream in(slurp(path("bench.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line == "application,method,N,T_high,T_low,K,time_ms,snr_db,speedup_measured,speedup_predicted");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("unknown application exits 2") {
  setup();
  CHECK(run("recover sharpen --model " + path("model.csd") + " --input " + path("test.pgm") +
            " --out " + path("z.pgm")) == 2);
}
