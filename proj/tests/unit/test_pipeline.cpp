#include <cstdlib>
#include <fstream>

#include <unistd.h>

#include "helpers.hpp"
#include "json.hpp"

using namespace painv;
using testing::close;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("painv-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SolveOptions cached(const fs::path& dir) {
  SolveOptions o;
  o.cache_dir = dir;
  return o;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("preset catalog") {
  std::vector<std::string> names = list_presets();
  CHECK(names == std::vector<std::string>{"fig8", "n950", "s254", "t09265"});
  Preset t = load_preset("t09265");
  CHECK(t.flips.size() == 11);
  CHECK(t.expected_value("abs_TK", 3).has_value());
  CHECK(std::abs(*t.expected_value("abs_TK", 3) - 13.444319) < 1e-9);
  CHECK(!t.expected_value("abs_TK", 9).has_value());
  CHECK(t.hash() == load_preset("t09265").hash());
  CHECK(t.hash() != load_preset("n950").hash());
  CHECK_THROWS_AS(load_preset("no-such-preset"), PresetError);
  CHECK_THROWS_AS(parse_preset("{\"name\": 3}"), PresetError);
  CHECK(load_surgery_presets().size() == 8);
}

TEST_CASE("presets without seeds start from the regular shape") {
  for (const char* name : {"fig8", "t09265"}) {
    Preset p = load_preset(name);
    p.seeds.clear();
    SolvedPreset s = solve_preset(p);
    CHECK(s.solution.residual < pow2(-236));
    CHECK(std::abs(s.solution.volume.to_double() - p.volume) < 1e-12);
  }
}

TEST_CASE("shape cache") {
  TempDir dir("cache");
  Preset p = load_preset("fig8");
  SolvedPreset cold = solve_preset(p, cached(dir.path));
  CHECK(!cold.from_cache);
  fs::path file = cache_path(dir.path, p, 256);
  REQUIRE(fs::exists(file));
  std::optional<CacheEntry> e = read_cache(file, p, 256);
  REQUIRE(e.has_value());
  const Complex w(Real("0.5"), sqrt(Real(3)) / Real(2));
  for (const auto& z : e->shapes) CHECK(close(z, w));

  SolvedPreset warm = solve_preset(p, cached(dir.path));
  CHECK(warm.from_cache);
  CHECK(warm.solution.steps == 0);
  CHECK(warm.solution.residual < pow2(-236));

  // a different precision is a different entry
  CHECK(!read_cache(file, p, 512).has_value());

  // corrupted entries are reported and recomputed
  std::ofstream(file) << "{ not json";
  std::string warning;
  CHECK(!read_cache(file, p, 256, &warning).has_value());
  CHECK(!warning.empty());
  warning.clear();
  SolvedPreset again = solve_preset(p, cached(dir.path), &warning);
  CHECK(!warning.empty());
  CHECK(!again.from_cache);
  CHECK(read_cache(file, p, 256).has_value());

  // a file written for other combinatorics is rejected
  CacheEntry other = *read_cache(file, p, 256);
  other.hash = "0000";
  write_cache(file, other);
  CHECK(!read_cache(file, p, 256).has_value());
}

TEST_CASE("cache directory override") {
  const char* saved = std::getenv("PA_INV_CACHE");
  std::string keep = saved ? saved : "";
  ::setenv("PA_INV_CACHE", "/tmp/painv-override", 1);
  CHECK(cache_directory("fallback") == fs::path("/tmp/painv-override"));
  ::unsetenv("PA_INV_CACHE");
  CHECK(cache_directory("fallback") == fs::path("fallback"));
  if (saved) ::setenv("PA_INV_CACHE", keep.c_str(), 1);
}

TEST_CASE("reports are deterministic") {
  const auto& s = testing::solved("fig8");
  ReportOptions o;
  auto strip = [](const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    j.erase("seconds");
    return j.dump();
  };
  std::string a = strip(report_json(compute_report(s, RootOfUnity(3), o)));
  std::string b = strip(report_json(compute_report(s, RootOfUnity(3), o)));
  CHECK(a == b);
  nlohmann::json j = nlohmann::json::parse(a);
  CHECK(j["preset"] == "fig8");
  CHECK(j["order"] == 3);
  CHECK(j["TK"]["phase_ambiguity"] == "mu_9");
  CHECK(!report_table(compute_report(s, RootOfUnity(3), o)).empty());
}

TEST_CASE("verification passes on geometric data and fails on perturbed data") {
  ReportOptions o;
  o.verify = true;
  InvariantReport good = compute_report(testing::solved("fig8"), RootOfUnity(3), o);
  REQUIRE(!good.verification.empty());
  CHECK(good.worst_residual() < Real("1e-60"));

  SolveOptions so;
  so.perturbation = std::ldexp(1.0, -40);
  SolvedPreset bad = solve_preset(load_preset("fig8"), so);
  CHECK(bad.solution.residual > Real("1e-20"));
  o.bundle.strict = false;
  InvariantReport r = compute_report(bad, RootOfUnity(3), o);
  REQUIRE(!r.verification.empty());
  CHECK(r.worst_residual() > Real("1e-20"));
}

}  // TEST_SUITE
