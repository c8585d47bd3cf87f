#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fhnkit/commands.hpp"

namespace fs = std::filesystem;
using fhnkit::Json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fhnkit_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fhnkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fhnkit::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Structural equality; numbers within a relative tolerance.
bool json_close(const Json& a, const Json& b, double rel, std::string path, std::string& where) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    if (std::abs(x - y) <= rel * std::max({1e-9, std::abs(x), std::abs(y)})) return true;
    where = path + ": " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.type() != b.type()) {
    where = path + ": type differs";
    return false;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) {
      where = path + ": key count differs";
      return false;
    }
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        where = path + "/" + it.key() + ": missing";
        return false;
      }
      if (!json_close(it.value(), b.at(it.key()), rel, path + "/" + it.key(), where)) return false;
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      where = path + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!json_close(a[i], b[i], rel, path + "/" + std::to_string(i), where)) return false;
    }
    return true;
  }
  if (a != b) where = path + ": " + a.dump() + " vs " + b.dump();
  return a == b;
}

const fs::path kRecipes = FHN_RECIPE_DIR;

}  // namespace

TEST_CASE("simulate writes trajectory and analysis, byte-identically") {
  const fs::path d = scratch("simulate");
  const fs::path cfg = write(d / "run.json", R"({
    "params": {"b": 0, "c": -0.519935054, "k": 1, "epsilon": 0.5},
    "initial_state": [-1.5, 2],
    "integrator": {"t_end": 60, "events": [{"fold": {"cell": 1, "sign": 1}}]},
    "analyses": [{"name": "canard", "t_from": 0, "t_to": 50}, "synchrony", "oscillations", "residual"]
  })");
  REQUIRE(cli({"--config", cfg.string(), "--out", (d / "a").string(), "simulate"}).code == 0);
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", (d / "b").string()}).code == 0);
  for (const char* f : {"trajectory.csv", "analysis.json", "events.json", "oscillations.csv"}) {
    CHECK_MESSAGE(fs::exists(d / "a" / f), f);
    CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
  }
  const Json a = Json::parse(slurp(d / "a" / "analysis.json"));
  CHECK(a["analyses"]["canard"]["verdict"] == true);
  CHECK(slurp(d / "a" / "trajectory.csv").find('\r') == std::string::npos);
}

TEST_CASE("simulate exit codes") {
  const fs::path d = scratch("exit");
  CHECK(cli({"simulate", "--config", write(d / "bad.json", "{not json").string()}).code == 2);
  CHECK(cli({"simulate", "--config", (d / "missing.json").string()}).code == 2);
  CHECK(cli({"simulate"}).code == 2);
  CHECK(cli({"simulate", "--config",
             write(d / "unknown.json", R"({"params": {}, "initial_state": [2, 2], "analyses": ["lyapunov"]})").string()})
            .code == 2);
  CHECK(cli({"simulate", "--config",
             write(d / "eps.json", R"({"params": {"epsilon": -1}, "initial_state": [2, 2]})").string()})
            .code == 2);
  const auto r = cli({"simulate", "--out", (d / "o").string(), "--config",
                      write(d / "steps.json", R"({"params": {"b": 0.3, "c": 0.01, "k": 0.1},
                        "initial_state": [1.5, 1.4], "integrator": {"t_end": 100, "max_steps": 10}})")
                          .string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("MaxStepsExceeded") != std::string::npos);
  CHECK(cli({"bogus"}).code == 2);
}

TEST_CASE("folds: four sigma/variable combinations at b = 0, c = 0, k = 1") {
  const auto r = cli({"folds", "--b", "0", "--c", "0", "--k", "1"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j["folded_equilibria"].size() == 4);
  for (const auto& g : j["folded_equilibria"]) {
    CHECK(g["roots"].size() == 3);
    for (const auto& root : g["roots"]) CHECK(root["class"].is_string());
  }
  CHECK(j["double_folds"].size() == 4);
  CHECK(j["folded_equilibria"][0]["roots"][2]["condition_row"] == 1);
}

TEST_CASE("folds: degenerate root at the double fold") {
  const auto r = cli({"folds", "--b", "0", "--c", "1.1547005383792515", "--k", "1"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  bool found = false;
  for (const auto& root : j["folded_equilibria"][0]["roots"]) {
    if (root["at_double_fold"] == true) {
      found = true;
      CHECK(root["class"] == "Degenerate");
    }
  }
  CHECK(found);
}

TEST_CASE("folds: opposite-sign double folds admit canards for b + 2k < 3/8") {
  const auto r = cli({"folds", "--b", "0.2", "--c", "0", "--k", "0.05"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  int opposite = 0;
  for (const auto& df : j["double_folds"]) {
    if (df["same_sign"] == false) {
      ++opposite;
      CHECK(df["canard_verdict"] == "CanardPossible");
      CHECK(df["condition"] == "ii");
    }
  }
  CHECK(opposite == 2);
}

TEST_CASE("folds: k = 0 is a configuration error; --config is read") {
  CHECK(cli({"folds", "--k", "0"}).code == 2);
  const fs::path d = scratch("folds");
  const fs::path cfg = write(d / "p.json", R"({"params": {"b": 0, "c": 0, "k": 1}})");
  const auto a = cli({"folds", "--config", cfg.string()});
  const auto b = cli({"folds", "--b", "0", "--c", "0", "--k", "1"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  // flags override the file
  CHECK(cli({"folds", "--config", cfg.string(), "--k", "0"}).code == 2);
}

TEST_CASE("equilibria command") {
  const auto r = cli({"equilibria", "--b", "0", "--c", "-2", "--k", "1"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j["equilibria"].size() == 1);
  CHECK(j["equilibria"][0]["stability"] == "sink");
  CHECK(j["synchrony_attracting"] == true);
}

TEST_CASE("sweep: one-point grid matches folds, k-sweep flips once, empty grid fails") {
  const fs::path d = scratch("sweep");
  REQUIRE(cli({"sweep", "--config", write(d / "one.json", R"({"params": {"b": 0, "c": 0, "k": 1}})").string(),
               "--out", (d / "one").string()})
              .code == 0);
  const std::string one = slurp(d / "one" / "sweep.csv");
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  const Json folds = Json::parse(cli({"folds", "--b", "0", "--c", "0", "--k", "1"}).out);
  // columns 7..10 hold the classes of the roots on dA
  std::string expect;
  for (const auto& g : folds["folded_equilibria"]) {
    std::string cell;
    for (const auto& r : g["roots"]) {
      if (r["boundary"].is_null()) continue;
      cell += (cell.empty() ? "" : ";") + r["class"].get<std::string>();
    }
    expect += "," + (cell.empty() ? std::string("-") : cell);
  }
  CHECK(one.find(expect + ",") != std::string::npos);

  const fs::path ks = write(d / "k.json", R"({"params": {"b": 0.2, "c": 0}, "grid": {"k": [-0.3, 0.1, 41]}})");
  REQUIRE(cli({"sweep", "--config", ks.string(), "--out", (d / "k1").string()}).code == 0);
  REQUIRE(cli({"sweep", "--config", ks.string(), "--out", (d / "k4").string(), "--threads", "4"}).code == 0);
  const std::string k1 = slurp(d / "k1" / "sweep.csv");
  CHECK(k1 == slurp(d / "k4" / "sweep.csv"));
  std::istringstream rows(k1);
  std::string line;
  std::getline(rows, line);
  int flips = 0;
  char prev = 0;
  while (std::getline(rows, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int i = 0; i < 5; ++i) std::getline(cells, cell, ',');
    if (prev && cell[0] != prev) ++flips;
    prev = cell[0];
  }
  CHECK(flips == 1);

  CHECK(cli({"sweep", "--config", write(d / "empty.json", R"({"grid": {"c": [0, 1, 0]}})").string(), "--out",
             (d / "e").string()})
            .code == 2);
}

TEST_CASE("sweep: c in [-1.2, -1.1] crosses from rest to relaxation at k = 1") {
  const fs::path d = scratch("mmo_sweep");
  const fs::path spec = write(d / "c.json", R"({
    "params": {"b": 0, "k": 1, "epsilon": 0.5},
    "grid": {"c": [-1.2, -1.1, 11]},
    "mmo_run": {"initial_state": [-1.5, 2], "integrator": {"t_end": 300}, "t_from": 100}
  })");
  REQUIRE(cli({"sweep", "--config", spec.string(), "--out", d.string(), "--threads", "2"}).code == 0);
  std::istringstream rows(slurp(d / "sweep.csv"));
  std::string line;
  std::getline(rows, line);
  std::vector<std::string> sigs;
  while (std::getline(rows, line)) {
    const auto head = line.substr(0, line.rfind(','));
    sigs.push_back(head.substr(head.rfind(',') + 1));
  }
  REQUIRE(sigs.size() == 11);
  auto large_count = [](const std::string& sig) {
    int n = 0;
    std::istringstream is(sig);
    std::string block;
    while (is >> block) {
      if (block.find('^') != std::string::npos) n += std::stoi(block.substr(0, block.find('^')));
    }
    return n;
  };
  // the run settles at the low end and relaxes at the high end
  CHECK(sigs.front() == "error:TooShort");
  CHECK(large_count(sigs.back()) >= 10);
  // once large oscillations appear they persist up the grid
  bool seen = false;
  for (const auto& s : sigs) {
    const bool large = s.rfind("error", 0) != 0 && large_count(s) > 0;
    CHECK((!seen || large));
    seen = seen || large;
  }
}

TEST_CASE("reproduce: every figure matches its golden analysis") {
  const fs::path d = scratch("reproduce");
  for (const auto& fig : fhnkit::figure_ids()) {
    CAPTURE(fig);
    REQUIRE(cli({"reproduce", fig, "--out", d.string()}).code == 0);
    const Json got = Json::parse(slurp(d / (fig + "_analysis.json")));
    const Json want = Json::parse(slurp(kRecipes / "golden" / (fig + ".json")));
    std::string where;
    CHECK_MESSAGE(json_close(got, want, 1e-6, "", where), where);
  }
  CHECK(cli({"reproduce", "fig12", "--out", d.string()}).code == 2);
  CHECK(cli({"reproduce", "fig2", "--out", d.string()}).code == 2);
}

TEST_CASE("reproduce: figure content") {
  const fs::path d = scratch("content");
  REQUIRE(cli({"reproduce", "fig6", "--out", d.string()}).code == 0);
  const Json f6 = Json::parse(slurp(d / "fig6_analysis.json"));
  REQUIRE(f6["orbits"].size() == 2);
  CHECK(f6["orbits"][0]["cycle_symmetry"] == "Fix(gamma)");
  CHECK(f6["orbits"][1]["cycle_symmetry"] == "Fix(delta)");

  REQUIRE(cli({"reproduce", "fig4", "--out", d.string()}).code == 0);
  const Json f4 = Json::parse(slurp(d / "fig4_analysis.json"));
  CHECK(f4["orbits"][0]["closure_after_4_arcs"].get<double>() <= 1e-8);
  CHECK(f4["orbits"][0]["cycle_symmetry"] == "Fix(gamma)");

  REQUIRE(cli({"reproduce", "fig7", "--out", d.string()}).code == 0);
  const Json f7 = Json::parse(slurp(d / "fig7_analysis.json"));
  CHECK(f7["analyses"]["canard"]["verdict"] == true);

  REQUIRE(cli({"reproduce", "fig11", "--out", d.string()}).code == 0);
  const Json f11 = Json::parse(slurp(d / "fig11_analysis.json"));
  CHECK(f11["analyses"]["mmo"]["non_stationary"] == true);
  CHECK(f11["analyses"]["mmo"]["has_large"] == true);
  CHECK(f11["analyses"]["mmo"]["has_small"] == true);
}
