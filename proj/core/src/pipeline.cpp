#include "painv/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#ifndef PAINV_PRESET_DIR
#define PAINV_PRESET_DIR "presets"
#endif

namespace painv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PresetError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

IMat matrix_from_json(const json& j) {
  std::vector<IVec> rows;
  for (const auto& r : j) rows.push_back(r.get<IVec>());
  return IMat::from_rows(rows, rows.empty() ? 0 : static_cast<int>(rows.front().size()));
}

// FNV-1a, 64 bit
std::string digest(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string getenv_or(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

int decimal_digits(long bits) { return static_cast<int>(bits * 0.30103) + 6; }

}  // namespace

IdealTriangulation Preset::triangulation() const { return IdealTriangulation(faces, edges); }

MappingClassWord Preset::word() const {
  MappingClassWord w;
  w.flips = flips;
  w.relabeling = relabeling;
  w.homology_action = homology_action;
  return w;
}

CVec Preset::seed_shapes() const {
  CVec out;
  for (const auto& [re, im] : seeds) out.emplace_back(Real(re), Real(im));
  if (seeds.empty()) out.assign(flips.size(), expi(pi() / Real(3)));
  return out;
}

std::string Preset::hash() const {
  json j;
  j["faces"] = faces;
  j["edges"] = edges;
  j["flips"] = flips;
  j["relabeling"] = relabeling;
  j["seeds"] = seeds;
  return digest(j.dump());
}

std::optional<double> Preset::expected_value(const std::string& quantity, int order) const {
  for (const auto& e : expected)
    if (e.quantity == quantity && (e.order == 0 || e.order == order)) return e.value;
  return std::nullopt;
}

fs::path preset_directory() {
  std::string env = getenv_or("PA_INV_PRESETS");
  return env.empty() ? fs::path(PAINV_PRESET_DIR) : fs::path(env);
}

std::vector<std::string> list_presets() {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(preset_directory())) {
    const auto& p = entry.path();
    if (p.extension() == ".json" && p.stem() != "gl1") out.push_back(p.stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Preset parse_preset(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PresetError(std::string("malformed preset: ") + e.what());
  }
  try {
    Preset p;
    p.name = j.value("name", "");
    p.description = j.value("description", "");
    p.genus = j.at("genus").get<int>();
    p.punctures = j.at("punctures").get<int>();
    p.edges = j.at("edges").get<int>();
    for (const auto& f : j.at("faces")) p.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    p.flips = j.at("flips").get<std::vector<int>>();
    p.relabeling = j.at("relabeling").get<std::vector<int>>();
    if (j.contains("homology_action") && !j["homology_action"].is_null())
      p.homology_action = matrix_from_json(j["homology_action"]);
    for (const auto& s : j.value("seeds", json::array())) p.seeds.emplace_back(s.at("re").get<std::string>(), s.at("im").get<std::string>());
    p.volume = j.value("volume", 0.0);
    for (const auto& e : j.value("expected", json::array())) {
      ExpectedValue v;
      v.quantity = e.at("quantity").get<std::string>();
      v.order = e.value("order", 0);
      v.value = e.at("value").get<double>();
      v.tag = e.value("tag", "");
      p.expected.push_back(v);
    }
    if (!p.seeds.empty() && p.seeds.size() != p.flips.size())
      throw PresetError("preset " + p.name + ": one seed per flip expected");
    return p;
  } catch (const json::exception& e) {
    throw PresetError(std::string("malformed preset: ") + e.what());
  }
}

Preset load_preset(const std::string& name_or_path) {
  fs::path p(name_or_path);
  if (!fs::exists(p)) p = preset_directory() / (name_or_path + ".json");
  if (!fs::exists(p)) throw PresetError("unknown preset " + name_or_path);
  return parse_preset(read_file(p));
}

std::vector<SurgeryPreset> load_surgery_presets() {
  json j = json::parse(read_file(preset_directory() / "gl1.json"));
  std::vector<SurgeryPreset> out;
  for (const auto& e : j) {
    SurgeryPreset s;
    s.name = e.at("name").get<std::string>();
    s.description = e.value("description", "");
    s.genus = e.at("genus").get<int>();
    s.punctures = e.at("punctures").get<int>();
    s.intersection = matrix_from_json(e.at("intersection"));
    for (const auto& t : e.at("twist_word")) s.twist_word.push_back({t.at("curve").get<IVec>(), t.at("sign").get<int>()});
    s.surgery.linking = matrix_from_json(e.at("linking"));
    s.surgery.summed = e.at("num_summed").get<int>();
    s.surgery.genus = s.genus;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- cache

fs::path cache_directory(const fs::path& fallback) {
  std::string env = getenv_or("PA_INV_CACHE");
  return env.empty() ? fallback : fs::path(env);
}

fs::path cache_path(const fs::path& dir, const Preset& p, long bits) {
  return dir / (p.name + "-" + p.hash() + "-" + std::to_string(bits) + ".json");
}

std::optional<CacheEntry> read_cache(const fs::path& file, const Preset& p, long bits, std::string* warning) {
  if (!fs::exists(file)) return std::nullopt;
  auto fail = [&](const std::string& why) -> std::optional<CacheEntry> {
    if (warning) *warning = "ignoring cache " + file.string() + ": " + why;
    return std::nullopt;
  };
  try {
    json j = json::parse(read_file(file));
    CacheEntry e;
    e.hash = j.at("hash").get<std::string>();
    e.bits = j.at("bits").get<long>();
    if (e.hash != p.hash()) return fail("hash mismatch");
    if (e.bits != bits) return fail("precision mismatch");
    for (const auto& s : j.at("shapes")) e.shapes.emplace_back(Real(s.at("re").get<std::string>()), Real(s.at("im").get<std::string>()));
    if (e.shapes.size() != p.flips.size()) return fail("wrong number of shapes");
    for (const auto& z : e.shapes)
      if (!z.re.is_finite() || !z.im.is_finite()) return fail("non-finite shape");
    return e;
  } catch (const std::exception& ex) {
    return fail(ex.what());
  }
}

void write_cache(const fs::path& file, const CacheEntry& e) {
  fs::create_directories(file.parent_path());
  json j;
  j["hash"] = e.hash;
  j["bits"] = e.bits;
  j["shapes"] = json::array();
  const int digits = decimal_digits(e.bits);
  for (const auto& z : e.shapes) j["shapes"].push_back({{"re", z.re.str(digits)}, {"im", z.im.str(digits)}});
  fs::path tmp = file;
  tmp += ".tmp" + std::to_string(reinterpret_cast<uintptr_t>(&e));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PresetError("cannot write " + tmp.string());
    out << j.dump(1) << '\n';
    if (!out.flush()) throw PresetError("cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

// ---------------------------------------------------------------- pipeline

SolvedPreset solve_preset(const Preset& p, const SolveOptions& opts, std::string* warning) {
  SolvedPreset s;
  s.preset = p;
  IdealTriangulation tri = p.triangulation();
  s.layered = std::make_unique<LayeredTriangulation>(build_layered(apply_mapping_class(tri, p.word())));
  s.system = gluing_equations(*s.layered);

  const long bits = opts.bits ? opts.bits : precision();
  PrecisionGuard guard(bits);
  std::optional<fs::path> file;
  if (opts.cache_dir) file = cache_path(*opts.cache_dir, p, bits);
  std::optional<CacheEntry> cached;
  if (file) cached = read_cache(*file, p, bits, warning);
  if (cached) {
    s.solution = evaluate_solution(s.system, cached->shapes);
    s.from_cache = true;
  } else {
    s.solution = newton_refine(s.system, p.seed_shapes(), bits, opts.newton);
    if (file) write_cache(*file, {p.hash(), bits, s.solution.shapes});
  }
  if (opts.perturbation != 0) {
    CVec shapes = s.solution.shapes;
    for (auto& z : shapes) z = z * Complex(Real(1) + Real(opts.perturbation));
    s.solution = evaluate_solution(s.system, shapes);
  }
  s.shear = shear_bend_layers(*s.layered, s.solution);
  s.lattice = kashaev_lattice(tri);
  s.lift = lift_to_kashaev_coordinates(*s.layered, s.shear, s.lattice, opts.perturbation == 0);
  return s;
}

}  // namespace painv

// ---------------------------------------------------------------- reports

namespace painv {

std::vector<PunctureWeights> invariant_weights(const MappingClassCertificate& cert, int n) {
  const auto& perm = cert.puncture_permutation;
  const int p = static_cast<int>(perm.size());
  std::vector<PunctureWeights> out;
  std::vector<int> l(p, 0);
  int64_t total = 1;
  for (int v = 0; v + 1 < p; ++v) total *= n;
  for (int64_t t = 0; t < total; ++t) {
    int64_t rest = t, sum = 0;
    for (int v = p - 2; v >= 0; --v) {
      l[v] = static_cast<int>(rest % n);
      rest /= n;
      sum += l[v];
    }
    l[p - 1] = static_cast<int>(((-sum) % n + n) % n);
    bool fixed = true;
    for (int v = 0; v < p; ++v)
      if (l[perm[v]] != l[v]) fixed = false;
    if (fixed) out.push_back({l});
  }
  return out;
}

Real InvariantReport::worst_residual() const {
  Real w;
  for (const auto& v : verification)
    w = std::max({w, v.proportionality, v.trace_powers, v.intertwiner_residual});
  return w;
}

InvariantReport compute_report(const SolvedPreset& s, const RootOfUnity& q, const ReportOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  InvariantReport r;
  r.preset = s.preset.name;
  r.hash = s.preset.hash();
  r.n = q.n();
  r.root = q.k();
  r.bits = precision();
  r.gluing_residual = s.solution.residual;
  r.volume = s.solution.volume;
  const auto& cert = s.layered->certificate();
  if (opts.kashaev || opts.verify) {
    BundleOptions bo = opts.bundle;
    bo.verify = opts.verify;
    IntertwinerBundle b = build_bundle(*s.layered, s.shear, s.lattice, s.lift, q, bo);
    r.TK = b.TK;
    r.leakage = b.blocks.leakage;
    r.block_det_spread = b.block_det_spread;
    r.psi_audit = b.psi_audit;
    for (const auto& blk : b.blocks.blocks)
      if (blk.diagonal()) ++r.diagonal_blocks;
    r.verification = std::move(b.verified);
    r.homology_order = b.order;
  }
  HomologyData hd = homology_data(s.lattice, s.lift);
  if (!r.homology_order) r.homology_order = homology_order(capped_action(hd), q.n());
  if (opts.chekhov_fock || opts.homology) {
    std::vector<PunctureWeights> ws = opts.weights.empty() ? invariant_weights(cert, q.n()) : opts.weights;
    for (const auto& w : ws) {
      WeightReport wr{w, std::nullopt, std::nullopt};
      if (opts.chekhov_fock) wr.TCF = cf_trace(*s.layered, s.shear, w, q, opts.bundle.strict);
      if (opts.homology) wr.TH = homology_trace(hd, w, q);
      r.weights.push_back(std::move(wr));
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

json trace_json(const TraceReport& t) {
  const int digits = decimal_digits(precision());
  return {{"abs", t.magnitude.str(digits)},
          {"re", t.value.re.str(digits)},
          {"im", t.value.im.str(digits)},
          {"phase_ambiguity", "mu_" + std::to_string(t.dim)}};
}

std::string fixed6(const Real& x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << x.to_double();
  return os.str();
}

std::string sci(const Real& x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x.to_double();
  return os.str();
}

std::string weights_label(const PunctureWeights& w) {
  std::string s = "(";
  for (size_t i = 0; i < w.exponents.size(); ++i) s += (i ? "," : "") + std::to_string(w.exponents[i]);
  return s + ")";
}

}  // namespace

std::string report_json(const InvariantReport& r) {
  json j;
  j["preset"] = r.preset;
  j["hash"] = r.hash;
  j["order"] = r.n;
  j["root"] = r.root;
  j["precision_bits"] = r.bits;
  j["gluing_residual"] = sci(r.gluing_residual);
  j["volume"] = r.volume.str(20);
  if (r.TK) {
    j["TK"] = trace_json(*r.TK);
    j["diagonal_blocks"] = r.diagonal_blocks;
    j["block_leakage"] = sci(r.leakage);
    j["block_det_spread"] = sci(r.block_det_spread);
    j["psi_audit"] = sci(r.psi_audit);
  }
  j["homology_order"] = r.homology_order;
  j["weights"] = json::array();
  for (const auto& w : r.weights) {
    json e;
    e["exponents"] = w.weights.exponents;
    if (w.TCF) e["TCF"] = trace_json(*w.TCF);
    if (w.TH) e["TH"] = trace_json(*w.TH);
    j["weights"].push_back(e);
  }
  if (!r.verification.empty()) {
    j["verification"] = json::array();
    for (const auto& v : r.verification)
      j["verification"].push_back({{"key", v.key},
                                   {"proportionality", sci(v.proportionality)},
                                   {"trace_powers", sci(v.trace_powers)},
                                   {"intertwiner_residual", sci(v.intertwiner_residual)},
                                   {"TCF_abs", v.TCF.magnitude.str(20)},
                                   {"TH_abs", v.TH.magnitude.str(20)},
                                   {"eta", {{"re", v.eta.re.str(20)}, {"im", v.eta.im.str(20)}}}});
    j["worst_residual"] = sci(r.worst_residual());
  }
  j["seconds"] = r.seconds;
  return j.dump(1);
}

std::string report_table(const InvariantReport& r) {
  std::ostringstream os;
  os << r.preset << "  n=" << r.n << "  root=" << r.root << "  bits=" << r.bits << "\n";
  os << "  gluing residual  " << sci(r.gluing_residual) << "   volume " << fixed6(r.volume) << "\n";
  if (r.TK)
    os << "  |T^K|            " << fixed6(r.TK->magnitude) << "   (" << r.diagonal_blocks << " diagonal blocks)\n";
  os << "  homology order   " << r.homology_order << "\n";
  for (const auto& w : r.weights) {
    os << "  zeta=q^" << weights_label(w.weights);
    if (w.TCF) os << "   |T^CF| " << fixed6(w.TCF->magnitude);
    if (w.TH) os << "   |T^H| " << fixed6(w.TH->magnitude);
    os << "\n";
  }
  for (const auto& v : r.verification) {
    os << "  verify " << weights_label({v.key}) << "  proportionality " << sci(v.proportionality) << "  trace powers "
       << sci(v.trace_powers) << "  intertwiner " << sci(v.intertwiner_residual) << "\n";
  }
  os << "  time " << std::fixed << std::setprecision(2) << r.seconds << " s\n";
  return os.str();
}

}  // namespace painv
