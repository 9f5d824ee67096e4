#pragma once
// Preset catalog, shape cache and the solve pipeline from a flip word to the
// lifted Kashaev character.

#include <filesystem>
#include <memory>
#include <optional>

#include "painv/geometry.hpp"
#include "painv/invariants.hpp"
#include "painv/surface.hpp"

namespace painv {

struct PresetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExpectedValue {
  std::string quantity;  // abs_TK, abs_TCF, ...
  int order = 0;
  double value = 0;
  std::string tag;
};

struct Preset {
  std::string name, description;
  int genus = 0, punctures = 0, edges = 0;
  std::vector<Face> faces;
  std::vector<int> flips;
  std::vector<int> relabeling;
  std::optional<IMat> homology_action;
  std::vector<std::pair<std::string, std::string>> seeds;  // decimal re, im
  double volume = 0;
  std::vector<ExpectedValue> expected;

  IdealTriangulation triangulation() const;
  MappingClassWord word() const;
  CVec seed_shapes() const;  // at the current precision; exp(pi i/3) everywhere without seeds
  // Stable digest of the combinatorics and seeds.
  std::string hash() const;
  std::optional<double> expected_value(const std::string& quantity, int order) const;
};

// Hand-built surgery presentations for the abelian check.
struct SurgeryPreset {
  std::string name, description;
  int genus = 1, punctures = 1;
  IMat intersection;
  std::vector<TwistLetter> twist_word;
  SurgeryPresentation surgery;
};

// PA_INV_PRESETS, else the directory installed with the library.
std::filesystem::path preset_directory();
std::vector<std::string> list_presets();
Preset load_preset(const std::string& name_or_path);
Preset parse_preset(const std::string& json_text);
std::vector<SurgeryPreset> load_surgery_presets();

// ---------------------------------------------------------------- shape cache

struct CacheEntry {
  std::string hash;
  long bits = 0;
  CVec shapes;
};

// PA_INV_CACHE, else the given fallback.
std::filesystem::path cache_directory(const std::filesystem::path& fallback);
std::filesystem::path cache_path(const std::filesystem::path& dir, const Preset& p, long bits);
// Empty on a missing, corrupt or mismatched file; *warning says why when the file existed.
std::optional<CacheEntry> read_cache(const std::filesystem::path& file, const Preset& p, long bits,
                                     std::string* warning = nullptr);
// Written to a temporary file and renamed into place.
void write_cache(const std::filesystem::path& file, const CacheEntry& e);

// ---------------------------------------------------------------- pipeline

struct SolvedPreset {
  Preset preset;
  std::unique_ptr<LayeredTriangulation> layered;
  GluingSystem system;
  ShapeSolution solution;
  ShearBendLayers shear;
  KashaevLattice lattice;
  KashaevCoordinateLift lift;
  bool from_cache = false;
};

struct SolveOptions {
  long bits = 0;  // 0: the current working precision
  std::optional<std::filesystem::path> cache_dir;
  NewtonOptions newton;
  // Multiplies every cached or refined shape by (1 + perturbation); 0 leaves them alone.
  double perturbation = 0;
};

// Everything is computed at opts.bits; callers should work at the same precision.
SolvedPreset solve_preset(const Preset& p, const SolveOptions& opts = {}, std::string* warning = nullptr);

// ---------------------------------------------------------------- reports

// Weight tuples fixed by the puncture permutation, the last exponent chosen
// so the product is 1.
std::vector<PunctureWeights> invariant_weights(const MappingClassCertificate& cert, int n);

struct WeightReport {
  PunctureWeights weights;
  std::optional<TraceReport> TCF, TH;
};

struct ReportOptions {
  bool kashaev = true, chekhov_fock = true, homology = true, verify = false;
  // Empty: every invariant tuple.
  std::vector<PunctureWeights> weights;
  BundleOptions bundle;
};

struct InvariantReport {
  std::string preset, hash;
  int n = 0;
  int64_t root = 1;  // q = exp(2 pi i root / n)
  long bits = 0;
  Real gluing_residual, volume;
  std::optional<TraceReport> TK;
  Real leakage, block_det_spread, psi_audit;
  int diagonal_blocks = 0;
  std::vector<WeightReport> weights;
  std::vector<BlockVerification> verification;
  int64_t homology_order = 0;
  double seconds = 0;
  // Worst verification residual, zero when nothing was verified.
  Real worst_residual() const;
};

InvariantReport compute_report(const SolvedPreset& s, const RootOfUnity& q, const ReportOptions& opts);
std::string report_json(const InvariantReport& r);
// Magnitudes to 6 decimals.
std::string report_table(const InvariantReport& r);

}  // namespace painv
