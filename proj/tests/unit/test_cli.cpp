#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "sgsacc/cli.hpp"

using namespace sgsacc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFixtures = SGSACC_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sgsacc_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::vector<std::string> with_config(std::string cmd, const fs::path& out) {
  return {std::move(cmd), "--config", kFixtures + "/config.json", "--output-dir", out.string()};
}

// Twenty turns; the first `failing` of them never state their value.
fs::path write_validation_fixture(const fs::path& dir, int failing) {
  spit(dir / "schemas.json", R"([{"service_name": "Restaurants_1", "slots": [
    {"name": "city", "description": "city of the restaurant", "is_categorical": false}]}])");
  json inst = json::array();
  for (int i = 0; i < 20; ++i) {
    const std::string city = "Town" + std::string(1, static_cast<char>('a' + i));
    inst.push_back({{"instance_id", "v" + std::to_string(i)},
                    {"service", "Restaurants_1"},
                    {"actions", {{{"intent", "INFORM"}, {"slot", "city"}, {"values", {city}}}}},
                    {"ground_truth", i < failing ? "Hello there." : "City is " + city + "."}});
  }
  spit(dir / "instances.json", inst.dump());
  return dir;
}

}  // namespace

TEST_CASE("evaluate writes a summary and per-system details") {
  const auto out = scratch("eval");
  const auto r = cli(with_config("evaluate", out));
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "details_ft.json"));
  CHECK(fs::exists(out / "details_pt.json"));
  const auto summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary["systems"].size() == 2);
  CHECK(summary["backend"] == "mock");
  CHECK(summary["seed"] == 7);
  CHECK(summary["config_hash"].get<std::string>().size() == 16);
  CHECK(r.out.find("SGSAcc(all)") != std::string::npos);
  CHECK(r.err.find("missing_turn") != std::string::npos);
}

TEST_CASE("evaluate twice gives byte-identical reports") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  REQUIRE(cli(with_config("evaluate", a)).code == kExitOk);
  auto args = with_config("evaluate", b);
  args.push_back("--workers");
  args.push_back("4");
  REQUIRE(cli(args).code == kExitOk);
  for (const auto& f : {"summary.json", "details_ft.json", "details_pt.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("flags override the config file and change the hash") {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  REQUIRE(cli(with_config("evaluate", a)).code == kExitOk);
  auto args = with_config("evaluate", b);
  args.insert(args.end(), {"--seed", "8", "--no-augmentation"});
  REQUIRE(cli(args).code == kExitOk);
  const auto sa = json::parse(slurp(a / "summary.json"));
  const auto sb = json::parse(slurp(b / "summary.json"));
  CHECK(sb["seed"] == 8);
  CHECK(sb["options"]["augmentation"] == false);
  CHECK(sa["config_hash"] != sb["config_hash"]);
}

TEST_CASE("input problems exit with 2") {
  const auto out = scratch("bad");
  auto r = cli({"evaluate", "--schemas", kFixtures + "/nope.json", "--instances",
                kFixtures + "/instances.json", "--output-dir", out.string()});
  CHECK(r.code == kExitBadInput);
  CHECK_FALSE(r.err.empty());

  spit(out / "broken.json", "{");
  r = cli({"validate", "--schemas", (out / "broken.json").string(), "--instances",
           kFixtures + "/instances.json", "--output-dir", out.string()});
  CHECK(r.code == kExitBadInput);

  r = cli({"robustness", "--config", kFixtures + "/config.json", "--variants",
           kFixtures + "/no_such_variant.json", "--output-dir", out.string()});
  CHECK(r.code == kExitBadInput);

  r = cli({"robustness", "--schemas", kFixtures + "/schemas.json", "--instances",
           kFixtures + "/instances.json", "--output-dir", out.string()});
  CHECK(r.code == kExitBadInput);

  r = cli({"evaluate", "--config", kFixtures + "/config.json", "--nli", "remote",
           "--output-dir", out.string()});
  CHECK(r.code == kExitBadInput);
}

TEST_CASE("an unreachable inference service exits with 3") {
  const auto out = scratch("remote");
  const auto r = cli({"validate", "--config", kFixtures + "/config.json", "--nli", "remote",
                      "--nli-url", "http://127.0.0.1:1", "--output-dir", out.string()});
  CHECK(r.code == kExitBackend);
}

TEST_CASE("usage errors are not successes") {
  CHECK(cli({}).code != kExitOk);
  CHECK(cli({"evaluate", "--bogus"}).code != kExitOk);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("validate reports the exclusion rate") {
  for (const auto& [failing, rate] : {std::pair{1, "5.0%"}, std::pair{0, "0.0%"}}) {
    const auto dir = write_validation_fixture(scratch("val" + std::to_string(failing)), failing);
    const auto r = cli({"validate", "--schemas", (dir / "schemas.json").string(), "--instances",
                        (dir / "instances.json").string(), "--output-dir", dir.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find(rate) != std::string::npos);
    const auto doc = json::parse(slurp(dir / "validation.json"));
    CHECK(doc["excluded"] == failing);
  }
}

TEST_CASE("rerank emits an ensemble file naming the source system") {
  const auto out = scratch("rerank");
  const auto r = cli(with_config("rerank", out));
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(slurp(out / "ensemble_generations.jsonl"));
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    const auto rec = json::parse(line);
    CHECK(rec["system_id"] == "ensemble");
    CHECK(rec.contains("source_system"));
  }
  CHECK(n == 11);
  CHECK(fs::exists(out / "rerank.json"));
}

TEST_CASE("robustness prints one row per variant") {
  const auto out = scratch("robust");
  auto args = with_config("robustness", out);
  args.insert(args.end(), {"--variants", kFixtures + "/schemas.json", "--variants", kFixtures + "/schemas_v1.json"});
  const auto r = cli(args);
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(slurp(out / "robustness.json"));
  CHECK(doc["variants"].size() == 2);
  CHECK(r.out.find("schemas_v1") != std::string::npos);
}

TEST_CASE("build-refs dumps the worked examples") {
  const auto out = scratch("refs");
  REQUIRE(cli(with_config("build-refs", out)).code == kExitOk);
  const auto text = slurp(out / "references.json");
  CHECK(text.find("Whether the place is kids friendly? Yes.") != std::string::npos);
  CHECK(text.find("The name of the hair stylist is Queens.") != std::string::npos);
  CHECK(text.find("Is nonstop? No.") != std::string::npos);
}
