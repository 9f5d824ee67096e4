// pa-inv: shapes, quantum traces and the decomposition check for the preset
// mapping tori.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "painv/pipeline.hpp"

namespace {

using namespace painv;

struct RunConfig {
  int order = 3;
  int64_t root = 1;
  long precision = 256;
  std::string invariant = "all";
  std::string weights = "invariant";
  std::string preset;
  std::vector<std::string> inputs;
  std::string cache = ".pa-inv-cache";
  bool no_cache = false;
  std::string output = "table";
  std::string out_file;

  void validate() const {
    if (order < 3 || order % 2 == 0) throw CLI::ValidationError("--order", "n must be odd and at least 3");
    if (precision < 64) throw CLI::ValidationError("--precision", "at least 64 bits");
    if (output != "json" && output != "table") throw CLI::ValidationError("--output", "json or table");
  }
};

std::vector<Preset> selected_presets(const RunConfig& c) {
  std::vector<Preset> out;
  if (!c.preset.empty()) out.push_back(load_preset(c.preset));
  for (const auto& path : c.inputs) out.push_back(load_preset(path));
  if (out.empty()) throw CLI::ValidationError("--preset", "give a preset name or --input file");
  return out;
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.bits = c.precision;
  if (!c.no_cache) o.cache_dir = cache_directory(c.cache);
  return o;
}

std::vector<PunctureWeights> parse_weights(const std::string& text, int punctures, int n) {
  if (text == "invariant") return {};
  if (text == "trivial") return {{std::vector<int>(punctures, 0)}};
  PunctureWeights w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) w.exponents.push_back(std::stoi(item));
  if (static_cast<int>(w.exponents.size()) != punctures)
    throw CLI::ValidationError("--weights", "one exponent per puncture");
  int64_t s = 0;
  for (int l : w.exponents) s += l;
  if (s % n) throw CLI::ValidationError("--weights", "exponents must sum to 0 mod n");
  return {w};
}

ReportOptions report_options(const RunConfig& c, int punctures) {
  ReportOptions o;
  const std::string& inv = c.invariant;
  if (inv != "all" && inv != "bb" && inv != "blwy" && inv != "gl1" && inv != "verify")
    throw CLI::ValidationError("--invariant", "one of bb, blwy, gl1, all, verify");
  o.kashaev = inv == "all" || inv == "bb" || inv == "verify";
  o.chekhov_fock = inv == "all" || inv == "blwy" || inv == "verify";
  o.homology = inv == "all" || inv == "gl1" || inv == "verify";
  o.verify = inv == "verify";
  o.weights = parse_weights(c.weights, punctures, c.order);
  return o;
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out_file.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(c.out_file);
  out << text << '\n';
}

SolvedPreset solve_with_notes(const Preset& p, const RunConfig& c) {
  std::string warning;
  SolvedPreset s = solve_preset(p, solve_options(c), &warning);
  if (!warning.empty()) std::cerr << "warning: " << warning << ", recomputing\n";
  return s;
}

int cmd_solve(const RunConfig& c) {
  PrecisionGuard guard(c.precision);
  std::ostringstream os;
  for (const auto& p : selected_presets(c)) {
    SolvedPreset s = solve_with_notes(p, c);
    const auto& sol = s.solution;
    if (c.output == "json") {
      os << "{\"preset\": \"" << p.name << "\", \"hash\": \"" << p.hash() << "\", \"bits\": " << c.precision
         << ", \"residual\": \"" << sol.residual.str(6) << "\", \"volume\": \"" << sol.volume.str(20)
         << "\", \"newton_steps\": " << sol.steps << ", \"from_cache\": " << (s.from_cache ? "true" : "false") << "}\n";
    } else {
      os << p.name << "  residual " << sol.residual.str(6) << "  volume " << sol.volume.str(12) << "  newton steps "
         << sol.steps << (s.from_cache ? "  (cached)" : "") << "\n";
      for (size_t i = 0; i < sol.shapes.size(); ++i) os << "  z" << i << " = " << sol.shapes[i].str(30) << "\n";
    }
  }
  emit(c, os.str());
  return 0;
}

int cmd_compute(const RunConfig& c, bool verify_only) {
  PrecisionGuard guard(c.precision);
  std::ostringstream os;
  int status = 0;
  for (const auto& p : selected_presets(c)) {
    SolvedPreset s = solve_with_notes(p, c);
    RunConfig cc = c;
    if (verify_only) cc.invariant = "verify";
    ReportOptions ro = report_options(cc, p.punctures);
    InvariantReport r = compute_report(s, RootOfUnity(c.order, c.root), ro);
    if (ro.verify) {
      Real worst = std::max({r.worst_residual(), r.block_det_spread});
      if (worst > tolerance(56) || r.verification.empty()) {
        std::cerr << p.name << ": verification failed, worst residual " << worst.str(6) << "\n";
        status = 1;
      }
    }
    os << (c.output == "json" ? report_json(r) : report_table(r)) << "\n";
  }
  emit(c, os.str());
  return status;
}

int cmd_preset_list(const RunConfig& c) {
  std::ostringstream os;
  for (const auto& name : list_presets()) {
    Preset p = load_preset(name);
    os << name << "  genus " << p.genus << ", " << p.punctures << " punctures, " << p.flips.size() << " flips  "
       << p.description << "\n";
    for (const auto& e : p.expected)
      os << "    expected " << e.quantity << (e.order ? " n=" + std::to_string(e.order) : "") << ": " << e.value
         << " [" << e.tag << "]\n";
  }
  emit(c, os.str());
  return 0;
}

// Compute and compare with the expected magnitudes stored in the preset.
int cmd_preset_run(const RunConfig& c) {
  PrecisionGuard guard(c.precision);
  Preset p = load_preset(c.preset);
  SolvedPreset s = solve_with_notes(p, c);
  ReportOptions ro = report_options(c, p.punctures);
  InvariantReport r = compute_report(s, RootOfUnity(c.order, c.root), ro);
  std::ostringstream os;
  os << (c.output == "json" ? report_json(r) : report_table(r));
  int status = 0;
  if (auto v = p.expected_value("abs_TK", c.order); v && r.TK) {
    double got = r.TK->magnitude.to_double();
    bool ok = std::abs(got - *v) < 5e-6;
    os << "  expected |T^K| " << *v << "  " << (ok ? "agrees" : "DIFFERS") << "\n";
    if (!ok) status = 1;
  }
  emit(c, os.str());
  return status;
}

void add_common(CLI::App* app, RunConfig& c, bool with_order) {
  app->add_option("--preset", c.preset, "preset name or path");
  app->add_option("--input", c.inputs, "preset-format JSON files");
  app->add_option("--precision", c.precision, "working precision in bits")->capture_default_str();
  app->add_option("--cache", c.cache, "shape cache directory (PA_INV_CACHE overrides)")->capture_default_str();
  app->add_flag("--no-cache", c.no_cache, "do not read or write the shape cache");
  app->add_option("--output", c.output, "json or table")->capture_default_str();
  app->add_option("--out-file", c.out_file, "write the report here instead of stdout");
  if (with_order) {
    app->add_option("--order", c.order, "odd root order n")->capture_default_str();
    app->add_option("--root", c.root, "q = exp(2 pi i root / n)")->capture_default_str();
    app->add_option("--invariant", c.invariant, "bb, blwy, gl1, all or verify")->capture_default_str();
    app->add_option("--weights", c.weights, "invariant, trivial or comma separated exponents")->capture_default_str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum traces of punctured-surface mapping tori"};
  app.require_subcommand(1);
  RunConfig c;

  auto* solve = app.add_subcommand("solve", "solve and cache the shape parameters");
  add_common(solve, c, false);
  auto* compute = app.add_subcommand("compute", "normalized traces");
  add_common(compute, c, true);
  auto* verify = app.add_subcommand("verify", "operator decomposition check, nonzero exit on failure");
  add_common(verify, c, true);
  auto* preset = app.add_subcommand("preset", "preset catalog");
  preset->require_subcommand(1);
  auto* plist = preset->add_subcommand("list", "list presets with expected values");
  plist->add_option("--output", c.output);
  auto* prun = preset->add_subcommand("run", "compute a preset and compare with its expected values");
  prun->add_option("name", c.preset, "preset name")->required();
  add_common(prun, c, true);

  try {
    app.parse(argc, argv);
    c.validate();
    if (*solve) return cmd_solve(c);
    if (*compute) return cmd_compute(c, false);
    if (*verify) return cmd_compute(c, true);
    if (*plist) return cmd_preset_list(c);
    if (*prun) return cmd_preset_run(c);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
