#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using mdelta::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mdelta_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("nml prints the Shtarkov values") {
  auto r = call({"nml", "--ell", "0", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("log2_sum=1.3219280948873") != std::string::npos);
  r = call({"nml", "--ell", "1", "--past", "0", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sum=3.25") != std::string::npos);
  CHECK(call({"nml", "--ell", "0", "--n", "25"}).code == 2);
}

TEST_CASE("bounds writes one row per depth") {
  TempDir tmp;
  const auto path = tmp.file("bounds.csv");
  const auto r = call({"bounds", "--n", "1048576", "--delta", "exp:1", "--ell", "1..12", "--out", path});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(path);
  CHECK(data_rows(csv) == 12);
  CHECK(csv.find("n,ell,delta,lb_t1,ub_prop,ub_t12,r_ell,clamped") != std::string::npos);
  CHECK(r.out.find("rows=12") != std::string::npos);
  const auto two = call({"bounds", "--n", "2^10", "2^12", "--ell", "1..3", "--out", "-"});
  CHECK(two.code == 0);
  CHECK(data_rows(two.out) == 6);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"nml", "--bogus"}).code == 2);
  CHECK(call({"bounds", "--n", "100", "--delta", "gauss:1"}).code == 2);
  CHECK(call({"bounds", "--n", "100", "--ell", "5..2"}).code == 2);
  CHECK(call({"verify", "nonsense"}).code == 2);
  CHECK(call({"bounds", "--config", "/nonexistent/config.txt"}).code == 2);
}

TEST_CASE("source generation, sampling, coding and decoding") {
  TempDir tmp;
  const auto src = tmp.file("src.txt");
  const auto seq = tmp.file("x.txt");
  const auto code = tmp.file("x.md");
  const auto back = tmp.file("y.txt");
  REQUIRE(call({"gen-source", "--kind", "continuity", "--ell", "3", "--delta", "exp:1", "--seed", "5", "--out", src})
              .code == 0);
  REQUIRE(call({"sample", "--source", src, "--n", "500", "--seed", "6", "--out", seq}).code == 0);
  REQUIRE(call({"encode", "--coder", "kt", "--ell", "2", "--in", seq, "--out", code}).code == 0);
  const auto dec = call({"decode", "--coder", "kt", "--in", code, "--out", back});
  REQUIRE(dec.code == 0);
  auto strip = [](std::string s) {
    std::string bits;
    for (char c : s) {
      if (c == '0' || c == '1') bits += c;
    }
    return bits;
  };
  CHECK(strip(slurp(back)) == strip(slurp(seq)));

  // A flipped payload byte is either rejected or decodes to something else.
  std::string raw = slurp(code);
  REQUIRE(raw.size() > 9);
  raw[raw.size() - 1] = static_cast<char>(raw[raw.size() - 1] ^ 0x01);
  {
    std::ofstream o(code, std::ios::binary);
    o << raw;
  }
  const auto bad = call({"decode", "--coder", "kt", "--in", code, "--out", back});
  if (bad.code == 0) CHECK(strip(slurp(back)) != strip(slurp(seq)));
  else CHECK(bad.code == 2);

  const auto prob = call({"prob", "--source", src, "--x", "0110", "--coder", "kt", "--ell", "1"});
  CHECK(prob.code == 0);
  CHECK(prob.out.find("regret=") != std::string::npos);
}

TEST_CASE("redundancy command") {
  TempDir tmp;
  const auto src = tmp.file("src.txt");
  REQUIRE(call({"gen-source", "--kind", "iid", "--theta", "0.3", "--out", src}).code == 0);
  const auto exact = call({"redundancy", "--source", src, "--coder", "kt", "--ell", "0", "--n", "10", "--exact"});
  CHECK(exact.code == 0);
  CHECK(exact.out.find("mode=exact") != std::string::npos);
  const auto csv = tmp.file("regret.csv");
  const auto mc = call({"redundancy", "--source", src, "--coder", "mixture", "--ell", "1", "--n", "100", "--trials",
                        "20", "--seed", "3", "--out", csv});
  CHECK(mc.code == 0);
  CHECK(data_rows(slurp(csv)) == 20);
  CHECK(call({"redundancy", "--source", src, "--n", "30", "--exact"}).code == 2);
}

TEST_CASE("verify is deterministic and reports one line per harness") {
  TempDir tmp;
  const auto a = tmp.file("a.csv");
  const auto b = tmp.file("b.csv");
  const auto ra = call({"verify", "all", "--seed", "7", "--trial-scale", "0.002", "--out", a});
  const auto rb = call({"verify", "all", "--seed", "7", "--trial-scale", "0.002", "--out", b});
  CHECK(ra.code == rb.code);
  CHECK(slurp(a) == slurp(b));
  CHECK(data_rows(slurp(a)) == 14);
  const auto dom = call({"verify", "domination", "--n", "10", "--q", "0.3", "--processes", "20", "--out", "-"});
  CHECK(dom.code == 0);
  CHECK(dom.out.find("lemma,params,trials,failures,empirical,bound,slack,verdict") != std::string::npos);
  const auto fail = call({"verify", "azuma", "--n", "1", "--gamma", "1", "--rule", "fixed", "--trials", "100",
                          "--out", tmp.file("f.csv")});
  CHECK(fail.code == 1);
}

TEST_CASE("configuration files round trip and flags take precedence") {
  TempDir tmp;
  const auto cfg = tmp.file("bounds.cfg");
  const auto dump = call({"bounds", "--n", "4096", "--delta", "poly:2", "--ell", "1..4", "--dump-config"});
  REQUIRE(dump.code == 0);
  {
    std::ofstream o(cfg);
    o << dump.out;
  }
  const auto again = call({"bounds", "--config", cfg, "--dump-config"});
  CHECK(again.code == 0);
  CHECK(again.out == dump.out);
  const auto over = call({"bounds", "--config", cfg, "--delta", "exp:2", "--dump-config"});
  CHECK(over.out.find("delta=exp:2") != std::string::npos);
  CHECK(over.out.find("ell=1..4") != std::string::npos);
  const auto out = tmp.file("b.csv");
  CHECK(call({"bounds", "--config", cfg, "--out", out}).code == 0);
  CHECK(data_rows(slurp(out)) == 4);
}

TEST_CASE("experiment optimal-ell") {
  const auto r = call({"experiment", "optimal-ell", "--n", "2^14", "2^16", "--delta", "exp:1", "--regime", "refined",
                       "--out", "-"});
  CHECK(r.code == 0);
  CHECK(data_rows(r.out) == 2);
  CHECK(r.err.find("regime=refined") != std::string::npos);
}
