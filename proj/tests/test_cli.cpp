#include "cli_runner.hpp"
#include "doctest.h"
#include "json.hpp"

using Json = nlohmann::json;

namespace {

const std::string kDisk = R"({"rank":2,"norm":{"type":"ellipsoid","gram":[[1,0],[0,1]]}})";

}  // namespace

TEST_CASE("count") {
  const auto path = cli::write_temp("disk2.json", kDisk);
  const auto r = cli::run("count --module " + path);
  CHECK(r.status == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["result"]["count"] == 5);
  CHECK(j["result"]["log_count"] == "1.60943791243");
  CHECK(j["manifest"]["subcommand"] == "count");
  CHECK(j["manifest"]["result_digest"].get<std::string>().size() == 64);
  CHECK(!j["manifest"].contains("duration_seconds"));
  CHECK(Json::parse(cli::run("count --strict --module " + path).out)["result"]["count"] == 1);
  CHECK(Json::parse(cli::run("count --module " + path + " --timing").out)["manifest"].contains("duration_seconds"));
}

TEST_CASE("exit codes") {
  const auto path = cli::write_temp("disk2.json", kDisk);
  CHECK(cli::run("").status == 2);
  CHECK(cli::run("count").status == 2);
  CHECK(cli::run("frobnicate").status == 2);
  CHECK(cli::run("count --module /nonexistent.json").status == 2);
  CHECK(cli::run("count --module " + cli::write_temp("bad.json", "{oops")).status == 2);
  CHECK(cli::run("count --module " + path + " --budget 3").status == 3);
  CHECK(cli::run("verify --suite other").status == 2);

  const auto bad = cli::write_temp(
      "bad_ledger.json", R"({"g":2,"kappa":1,"L2_0":20,"steps":[{"d":2,"r":1,"c":0},{"d":4,"r":3,"c":1}]})");
  const auto r = cli::run("ledger eval --config " + bad);
  CHECK(r.status == 2);
  const auto j = Json::parse(r.out);
  CHECK(j["error"]["status"] == "schema_violation");
  CHECK(j.contains("manifest"));

  // consistent geometry but violates the lemma: reported, exit 1
  const auto odd = cli::write_temp(
      "odd_ledger.json", R"({"g":2,"kappa":1,"L2_0":20,"steps":[{"d":4,"r":1,"c":0,"slack":0},{"d":1,"r":1,"c":10}]})");
  const auto o = cli::run("ledger eval --config " + odd);
  CHECK(o.status == 1);
  CHECK(Json::parse(o.out)["result"]["sum_ci_bound"]["holds"] == false);
}

TEST_CASE("every error is a complete json document") {
  for (const char* args : {"", "count", "count --module /nonexistent.json", "ledger", "ledger eval --config /x",
                           "verify --max-rank 12"}) {
    const auto r = cli::run(args);
    CHECK(r.status == 2);
    CHECK(Json::accept(r.out));
    CHECK(Json::parse(r.out).contains("error"));
  }
}

TEST_CASE("verify is deterministic") {
  const auto a = cli::run("verify --suite sec2 --trials 10 --seed 7");
  const auto b = cli::run("verify --suite sec2 --trials 10 --seed 7 --threads 4");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != cli::run("verify --suite sec2 --trials 10 --seed 8").out);
}

TEST_CASE("ledger subcommands") {
  const auto sweep = cli::run("ledger sweep --g-max 30 --kappa-max 5");
  CHECK(sweep.status == 0);
  CHECK(Json::parse(sweep.out)["result"]["constant_chain"]["violations"] == 0);
  const auto sim = cli::run("ledger simulate --seed 3 --mode clifford-hyperelliptic --trials 100");
  CHECK(sim.status == 0);
  CHECK(Json::parse(sim.out)["result"]["total_violations"] == 0);
  const auto params = cli::write_temp("b.json", R"({"g":2,"d_circ":2,"kappa":1,"L2":10})");
  const auto b = cli::run("ledger eval --config " + params + " --theorem B");
  CHECK(b.status == 0);
  CHECK(Json::parse(b.out)["result"]["bound"] == "19.3340757538");
}
