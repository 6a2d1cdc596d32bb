#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("GDF_CLI_BIN");
  REQUIRE_MESSAGE(env != nullptr, "GDF_CLI_BIN must point at the gdfqkd binary");
  return env;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  RunResult res;
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WEXITSTATUS(status);
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("params command emits the derived quantities") {
  const auto res = run(
      "params --n 1000000 --k 100000 --da 2.5 --db 2.5 --eps-coll 1e-10 --eps-test 1e-10 "
      "--format json");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["K"].get<std::uint64_t>() > 1000000);
  CHECK(j.contains("eta_star"));
  CHECK(j.contains("T"));
  CHECK(j.contains("eps_definetti"));
  CHECK(j.contains("eps_prime_exact"));
  CHECK(j.contains("eps_prime_envelope"));
  CHECK(j.contains("key_reduction_bits"));
  CHECK(j["definetti_applicable"].get<bool>());
}

TEST_CASE("params with zero collective epsilon returns the test budget") {
  const auto res = run(
      "params --n 1000000 --k 100000 --da 2.5 --db 2.5 --eps-coll 0 --eps-test 1e-10 "
      "--format json");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["eps_prime_exact"]["ln_magnitude"].get<double>() ==
        j["input"]["eps_test"]["ln_magnitude"].get<double>());
}

TEST_CASE("usage and infeasibility exit codes") {
  CHECK(run("params --n 1000").exit_code == 1);                       // missing flags
  CHECK(run("nonsense").exit_code == 1);
  const auto infeasible = run(
      "params --n 1000000 --k 20 --da 2.5 --db 2.5 --eps-coll 1e-10 --eps-test 1e-10");
  CHECK(infeasible.exit_code == 2);  // k below the g-factor legality bound
  CHECK(run("simulate --n 50 --k 50 --da 2 --db 2 --trials 0").exit_code == 1);
}

TEST_CASE("verify suites pass and are deterministic") {
  const std::string args =
      "verify --seed 99 definetti --n 8 --K 2 --eta 0.8 --samples 50000 --format json";
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);  // byte identical
  const json j = json::parse(a.out);
  CHECK(j["pass"].get<bool>());

  const auto gram = run("verify gram --n 2 --K 2 --format json");
  CHECK(gram.exit_code == 0);
  CHECK(json::parse(gram.out)["max_rel_deviation"].get<double>() <= 1e-9);

  const auto tails = run("verify tails --kmax 8 --nmax 40 --format json");
  CHECK(tails.exit_code == 0);

  const auto lgrc = run("verify lgrc --nmax 10 --dmax 5 --extra 80 --format json");
  CHECK(lgrc.exit_code == 0);
  CHECK(json::parse(lgrc.out)["min_margin"].get<double>() > 0.0);

  const auto inv = run("verify --seed 5 invariance --n 2 --trials 5 --format json");
  CHECK(inv.exit_code == 0);
}

TEST_CASE("formats carry identical numbers") {
  const std::string base =
      "verify --seed 31 definetti --n 8 --K 2 --eta 0.7 --samples 20000";
  const auto as_json = run(base + " --format json");
  const auto as_text = run(base + " --format text");
  const auto as_csv = run(base + " --format csv");
  CHECK(as_json.exit_code == 0);
  const json j = json::parse(as_json.out);

  // Every scalar leaf printed by text/csv round-trips to the json value.
  auto find_in = [](const std::string& body, const std::string& key) {
    std::istringstream ss(body);
    std::string line;
    while (std::getline(ss, line)) {
      if (line.rfind(key, 0) == 0) {
        const auto pos = line.find_last_of(" ,");
        return line.substr(pos + 1);
      }
    }
    return std::string();
  };
  for (const char* key : {"lambda_min", "lambda_max", "stderr_min"}) {
    const double want = j[key].get<double>();
    CHECK(std::stod(find_in(as_text.out, key)) == want);
    CHECK(std::stod(find_in(as_csv.out, key)) == want);
  }
}

TEST_CASE("simulate command") {
  const std::string args =
      "simulate --n 60 --k 60 --da 2 --db 2 --mean-photons 0.5 --eps-test 0.01 "
      "--trials 20000 --seed 12 --format json";
  const auto a = run(args);
  CHECK(a.exit_code == 0);
  const json j = json::parse(a.out);
  CHECK(j["failure"]["verdict"].get<bool>());
  CHECK(j["chi2_ratio_A"]["verdict"].get<bool>());
  const auto b = run(args);
  CHECK(a.out == b.out);

  // seed comes from GDF_SEED when the flag is absent
  const std::string noseed =
      "simulate --n 60 --k 60 --da 2 --db 2 --mean-photons 0.5 --eps-test 0.01 "
      "--trials 5000 --format json";
  const std::string env_cmd = "GDF_SEED=777 " + cli_path() + " " + noseed;
  FILE* pipe = popen(env_cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  pclose(pipe);
  CHECK(json::parse(out)["seed"].get<std::uint64_t>() == 777);
}

TEST_CASE("gram export flag writes the documented matrix format") {
  const std::string path = "gdf_cli_gram.txt";
  const auto res = run("verify gram --n 2 --K 2 --export-gram " + path + " --format json");
  CHECK(res.exit_code == 0);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "gdfqkd-matrix 1");
  std::remove(path.c_str());
}

TEST_CASE("reports can be written to files") {
  const std::string path = "gdf_cli_report.json";
  const auto res = run("verify gram --n 1 --K 2 --format json --output " + path);
  CHECK(res.exit_code == 0);
  CHECK(res.out.empty());
  const json j = json::parse(slurp(path));
  CHECK(j["pass"].get<bool>());
  std::remove(path.c_str());
}
