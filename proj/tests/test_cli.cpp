#include "doctest.h"

#include "support.hpp"

#include "cfforge/cli.hpp"

#include "json.hpp"

#include <cstdlib>
#include <map>
#include <sstream>

using json = nlohmann::json;
using testing_support::corpus_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cfforge");
  std::ostringstream out, err;
  int code = cfforge::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

bool has_tag(const cfforge::cli::Fixture& f, const std::string& tag) {
  return std::find(f.tags.begin(), f.tags.end(), tag) != f.tags.end();
}

}  // namespace

TEST_CASE("verify the bundled corpus") {
  auto fixtures = testing_support::bundled();
  Run r = run({"verify", "--corpus", corpus_path("bundled.json")});
  CHECK(r.code == 0);
  auto reports = lines(r.out);
  REQUIRE(reports.size() == fixtures.size());
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& fx = fixtures[i];
    const auto& rep = reports[i];
    CAPTURE(fx.id);
    CHECK(rep["id"] == fx.id);
    std::string status = rep["status"];
    ++counts[status];
    // rational f, g with split denominators are summed symbolically; the
    // rest only numerically
    bool symbolic = !has_tag(fx, "irreducible") && !has_tag(fx, "surd") && !has_tag(fx, "exponential");
    CHECK(status == (symbolic ? "proved_symbolic" : "verified_numeric"));
    CHECK(rep["precision_bits"] == 167);
  }
  CHECK(counts["proved_symbolic"] + counts["verified_numeric"] == static_cast<int>(fixtures.size()));
  json summary = json::parse(r.err)["summary"];
  CHECK(summary["total"] == fixtures.size());
  CHECK(summary["mismatch"] == 0);
}

TEST_CASE("verify output is deterministic") {
  std::string path = corpus_path("bundled.json");
  Run a = run({"verify", "--corpus", path, "--jobs", "1"});
  Run b = run({"verify", "--corpus", path, "--jobs", "8"});
  CHECK(a.out == b.out);
}

TEST_CASE("verify flags the perturbed closed form") {
  Run r = run({"verify", "--corpus", corpus_path("perturbed.json")});
  CHECK(r.code == 1);
  auto reports = lines(r.out);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0]["status"] == "proved_symbolic");
  CHECK(reports[1]["status"] == "mismatch");
  double err = std::stod(reports[1]["abs_err"].get<std::string>());
  CHECK(err > 1e-11);
  CHECK(err < 1e-9);
}

TEST_CASE("verify edge cases") {
  Run empty = run({"verify", "--corpus", corpus_path("empty.json")});
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());
  CHECK(json::parse(empty.err)["summary"]["total"] == 0);

  Run f0 = run({"verify", "--corpus", corpus_path("f0_nonzero.json")});
  CHECK(f0.code == 1);
  for (const auto& rep : lines(f0.out)) CHECK(rep["status"] == "error");

  CHECK(run({"verify", "--corpus", corpus_path("does_not_exist.json")}).code == 2);
  CHECK(run({"verify"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  Run text = run({"verify", "--corpus", corpus_path("perturbed.json"), "--format", "text"});
  CHECK(text.out.find("mismatch") != std::string::npos);
  Run timed = run({"verify", "--corpus", corpus_path("perturbed.json"), "--timings"});
  CHECK(lines(timed.out)[0].contains("timings"));
  CHECK_FALSE(lines(run({"verify", "--corpus", corpus_path("perturbed.json")}).out)[0].contains("timings"));
}

TEST_CASE("precision comes from the environment unless given") {
  std::string path = corpus_path("perturbed.json");
  setenv("CF_FORGE_PRECISION", "30", 1);
  Run env = run({"verify", "--corpus", path});
  Run flag = run({"verify", "--corpus", path, "--precision", "60"});
  setenv("CF_FORGE_PRECISION", "bogus", 1);
  Run bad = run({"verify", "--corpus", path});
  unsetenv("CF_FORGE_PRECISION");
  CHECK(lines(env.out)[0]["precision_bits"] == 100);
  CHECK(lines(flag.out)[0]["precision_bits"] == 200);
  CHECK(bad.code == 2);
}

TEST_CASE("prove") {
  Run ok = run({"prove", "--a", "-n^8", "--b", "n^4+(n+1)^4+2*(n^2+(n+1)^2)"});
  CHECK(ok.code == 0);
  json j = json::parse(ok.out);
  CHECK(j["status"] == "proved_symbolic");
  CHECK(j["f"] == "n^4");
  CHECK(j["g"] == "2*n+1");
  CHECK(j["residual"] == "0");
  CHECK(j["closed_form"] == "8 - 2/3*pi^2 - 1/90*pi^4");
  CHECK(j["checks"]["b0_consistent"] == true);
  CHECK(j["checks"]["functional_identity_verified_degree"] == 5);

  Run broken = run({"prove", "--a", "-n^8", "--b", "n^4"});
  CHECK(broken.code == 1);
  json k = json::parse(broken.out);
  CHECK(k["status"] == "failed");
  CHECK_FALSE(k["diagnostics"].empty());

  CHECK(run({"prove", "--a", "-n^8", "--b", "n^4+"}).code == 2);
  CHECK(run({"prove", "--a", "-n^8"}).code == 2);
}

TEST_CASE("recognize") {
  Run r = run({"recognize", "--f", "n^4", "--g", "2*n+1", "--basis", "1"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["status"] == "recognized");
  CHECK(j["closed_form"] == "8 - 4*zeta(2) - zeta(4)");

  Run z = run({"recognize", "--value", "zeta(3)", "--basis", "1"});
  CHECK(json::parse(z.out)["closed_form"] == "zeta(3)");

  Run u = run({"recognize", "--value", "tanh(1)", "--basis", "2"});
  CHECK(u.code == 0);
  CHECK(json::parse(u.out)["status"] == "unsupported");

  CHECK(run({"recognize", "--value", "n"}).code == 2);
  CHECK(run({"recognize", "--f", "n^2"}).code == 2);
  CHECK(run({"recognize"}).code == 2);
}

TEST_CASE("sum") {
  Run r = run({"sum", "--f", "n^2", "--g", "n+1", "--precision", "30"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["closed_form"] == "1 - 1/6*pi^2 + zeta(3)");
  CHECK(j["series_value"].get<std::string>().substr(0, 21) == "0.5571228363113678489");  // mpmath
  CHECK(run({"sum", "--f", "n", "--g", "1"}).code == 1);
  CHECK(run({"sum", "--f", "n+1", "--g", "1"}).code == 2);
}
