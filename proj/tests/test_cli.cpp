#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "ipmdro/error.hpp"
#include "report.hpp"

using namespace ipmdro;
using namespace ipmdro::cli;
using json = nlohmann::ordered_json;

namespace {

const std::filesystem::path kFixtures = IPMDRO_FIXTURE_DIR;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ipmdro_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("every subcommand has a fixture that runs") {
    for (const auto& name : subcommand_names()) {
      std::string file = name;
      std::replace(file.begin(), file.end(), '-', '_');
      const auto path = kFixtures / (file + ".json");
      REQUIRE(std::filesystem::exists(path));
      RunOptions options;
      options.config_path = path.string();
      options.out_dir = scratch(file);
      std::ostringstream err;
      INFO(name << ": " << err.str());
      CHECK(run(name, options, err) == kExitOk);
      CHECK(std::filesystem::exists(options.out_dir / (name + ".csv")));
      CHECK(std::filesystem::exists(options.out_dir / (name + ".json")));
    }
  }

  TEST_CASE("config round trip is a fixed point") {
    for (const auto& entry : std::filesystem::directory_iterator(kFixtures)) {
      INFO(entry.path().string());
      const ProblemConfig first = load_config(entry.path().string());
      const json once = to_json(first);
      const json twice = to_json(parse_config(once));
      CHECK(once == twice);
      CHECK(dump_json(once) == dump_json(twice));
    }
  }

  TEST_CASE("reports are byte-deterministic") {
    for (const std::string name : {"tightness", "critic-check", "sweep-eps"}) {
      std::string file = name;
      std::replace(file.begin(), file.end(), '-', '_');
      RunOptions a;
      a.config_path = (kFixtures / (file + ".json")).string();
      a.out_dir = scratch(file + "_a");
      RunOptions b = a;
      b.out_dir = scratch(file + "_b");
      std::ostringstream err;
      REQUIRE(run(name, a, err) == kExitOk);
      REQUIRE(run(name, b, err) == kExitOk);
      CHECK(read_file(a.out_dir / (name + ".csv")) == read_file(b.out_dir / (name + ".csv")));
      CHECK(read_file(a.out_dir / (name + ".json")) == read_file(b.out_dir / (name + ".json")));
    }
  }

  TEST_CASE("malformed metric row is a validation error naming the row") {
    const auto dir = scratch("bad_metric");
    std::filesystem::create_directories(dir);
    const auto path = dir / "bad.json";
    std::ofstream(path) << R"({
      "schema_version": 1,
      "space": {"points": ["a", "b", "c"], "metric": [[0, 1, 2], [1, 0], [2, 1, 0]]},
      "distributions": {"P": "uniform"},
      "functions": {"h": [0, 1, 2]},
      "class": {"variant": "lipschitz"},
      "epsilon": [0.5]
    })";
    RunOptions options;
    options.config_path = path.string();
    options.out_dir = dir / "out";
    std::ostringstream err;
    CHECK(run("dro-sup", options, err) == kExitValidation);
    CHECK(err.str().find("row 1") != std::string::npos);
  }

  TEST_CASE("validation failures") {
    const json base = json::parse(read_file(kFixtures / "dro_sup.json"));
    json unknown = base;
    unknown["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(unknown), Error);
    json version = base;
    version["schema_version"] = 99;
    CHECK_THROWS_AS(parse_config(version), Error);

    std::ostringstream err;
    RunOptions missing;
    missing.config_path = "/nonexistent/config.json";
    missing.out_dir = scratch("missing");
    CHECK(run("dro-sup", missing, err) == kExitValidation);
    RunOptions fine;
    fine.config_path = (kFixtures / "dro_sup.json").string();
    fine.out_dir = scratch("unknown_sub");
    CHECK(run("no-such-command", fine, err) == kExitValidation);
  }

  TEST_CASE("report shapes") {
    const ProblemConfig sweep = load_config((kFixtures / "sweep_eps.json").string());
    const Report rows = run_subcommand("sweep-eps", sweep, RunOptions{});
    CHECK(rows.rows() == 20);
    const auto& columns = rows.columns();
    CHECK(std::find(columns.begin(), columns.end(), "residual") != columns.end());
    const auto lines = csv_lines(rows.csv());
    CHECK(lines.size() == 21);

    const ProblemConfig gan = load_config((kFixtures / "gan_bound.json").string());
    const Report fleet = run_subcommand("gan-bound", gan, RunOptions{});
    for (const char* column : {"robust", "plain", "cap", "slack"})
      CHECK(std::find(fleet.columns().begin(), fleet.columns().end(), column) != fleet.columns().end());
  }

  TEST_CASE("identity and sin rows") {
    const ProblemConfig tv = load_config((kFixtures / "verify_identity.json").string());
    const Report identity = run_subcommand("verify-identity", tv, RunOptions{});
    const json doc = json::parse(identity.json_text());
    bool found = false;
    for (const auto& row : doc["rows"]) {
      if (std::abs(row["eps"].get<double>() - 0.3) > 1e-12) continue;
      found = true;
      CHECK(row["lhs"].get<double>() == doctest::Approx(1.3).epsilon(1e-9));
      CHECK(row["rhs"].get<double>() == doctest::Approx(1.3).epsilon(1e-9));
      CHECK(row["residual"].get<double>() <= 1e-6);
    }
    CHECK(found);

    const Report sin = run_subcommand("repro-sin", builtin_sin_config(), RunOptions{});
    const json sdoc = json::parse(sin.json_text());
    const auto& row = sdoc["rows"][0];
    CHECK(row["eps_lip"].get<double>() >= 2.95);
    CHECK(row["eps_lip"].get<double>() <= 3.0);
    CHECK(row["lambda_decomposition"].get<double>() <= 2.001);
    CHECK(row["lambda_lp"].get<double>() <= 2.001);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(dump_json(json{{"x", std::numeric_limits<double>::infinity()}}).find("\"inf\"") != std::string::npos);
  }
}
