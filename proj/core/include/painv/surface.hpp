#pragma once
// Ideal triangulations of punctured surfaces, the epsilon form, flips, the
// Kashaev lattice and mapping classes given as flip sequences.
//
// Edges carry labels 0..E-1. A side is an oriented label: x >= 0 is one
// orientation of edge x and ~x = -x-1 the other. Each oriented label occurs
// exactly once among the face sides, so sides and oriented labels coincide.

#include <array>
#include <optional>

#include "painv/numeric.hpp"
#include "painv/qtorus.hpp"

namespace painv {

inline int edge_of(int side) { return side >= 0 ? side : ~side; }

struct UnflippableEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RelabelingMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidTriangulation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Face = std::array<int, 3>;

class IdealTriangulation {
 public:
  IdealTriangulation() = default;
  // Faces list their sides counterclockwise.
  IdealTriangulation(std::vector<Face> faces, int edges);

  const std::vector<Face>& faces() const { return faces_; }
  int num_edges() const { return edges_; }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_punctures() const { return punctures_; }
  int genus() const { return genus_; }
  // of the punctured surface: 2 - 2g - p = F - E
  int euler_characteristic() const { return num_faces() - edges_; }

  // (face, position) of a side
  std::pair<int, int> where(int side) const;
  // Puncture at the tail of a side; head(s) = tail(~s).
  int tail(int side) const { return tail_.at(slot(side)); }
  // Puncture at the corner of face f between positions p and p+1.
  int puncture_at_corner(int f, int p) const { return tail(faces_.at(f)[(p + 1) % 3]); }

  // c_v: how many ends of each edge lie at puncture v, as a p x E matrix.
  const IMat& puncture_vectors() const { return cv_; }

  // Faces with sides i, ~i, b.
  std::vector<std::pair<int, int>> self_folded() const;  // (folded edge i, edge b)

  bool operator==(const IdealTriangulation& o) const { return edges_ == o.edges_ && faces_ == o.faces_; }

 private:
  int slot(int side) const { return side >= 0 ? 2 * side : 2 * (~side) + 1; }
  std::vector<Face> faces_;
  int edges_ = 0;
  std::vector<std::pair<int, int>> where_;
  std::vector<int> tail_;
  int punctures_ = 0;
  int genus_ = 0;
  IMat cv_;
};

struct EpsilonForm {
  IMat matrix;      // in the generating set below
  IMat generators;  // columns: generators as vectors in Z^edges (identity without self-folded faces)
};

// eps_ab = omega(i(a), i(b)) counted through the per-face Kashaev pieces;
// self-folded faces switch X_i to X_i X_b.
EpsilonForm epsilon_form(const IdealTriangulation& tri);
// The raw matrix in the edge basis.
IMat epsilon_matrix(const IdealTriangulation& tri);

// Local labels of a flip of edge e. Before: faces (e, a, b) and (~e, c, d).
// After: (e', d, a) in the first slot and (~e', b, c) in the second, with e'
// carrying the label of e.
struct FlipFrame {
  int e = 0;          // flipped side in the first face
  int a = 0, b = 0, c = 0, d = 0;
  int face_a = 0, face_b = 0;
  int e1 = 0, e2 = 0;    // e and ~e as sides of the old triangulation
  int e1p = 0, e2p = 0;  // e' and ~e' as sides of the new triangulation
};

std::pair<IdealTriangulation, FlipFrame> flip(const IdealTriangulation& tri, int e);

// Label maps a -> b (image of each label 0..E-1 as an oriented label) that
// carry faces onto faces with orientation preserved.
std::vector<std::vector<int>> find_isomorphisms(const IdealTriangulation& a, const IdealTriangulation& b);
// Apply an oriented label map.
int map_side(const std::vector<int>& iso, int side);

// ---------------------------------------------------------------- Kashaev lattice

// Per face the rank-2 lattice Z^3/Z(1,1,1) with basis the first two sides;
// the third side is -s0-s1. omega(s0, s1) = 1.
struct KashaevLattice {
  IMat gram;                        // 2F x 2F
  IMat cfr;                         // 2F x E, column x = i(x) + i(~x)
  IMat punctures;                   // p x E
  std::vector<IVec> puncture_images;  // i_CFr(c_v)
  std::vector<IVec> puncture_duals;   // b_v, omega(b_v, c_w) = delta_vw for v, w < p-1
  IMat homology;                    // 2F x h, basis of the orthogonal of the CF image
  SymplecticBasis adapted;          // complement pairs, then (c_v, -b_v) pairs
  int corank = 0;                   // 2F - rank(CF image + homology part)
};

IVec side_vector(const IdealTriangulation& tri, int side);
IMat kashaev_form(const IdealTriangulation& tri);
KashaevLattice kashaev_lattice(const IdealTriangulation& tri);

// ---------------------------------------------------------------- mapping classes

struct TwistLetter {
  IVec curve;  // homology class
  int sign = 1;
};

struct MappingClassWord {
  std::vector<int> flips;      // edge labels, in the current triangulation at each step
  std::vector<int> relabeling;  // label x of the last triangulation -> oriented label of the first
  std::optional<IMat> homology_action;
  std::vector<TwistLetter> twist_word;
};

struct MappingClassCertificate {
  std::vector<IdealTriangulation> layers;  // lambda_0 .. lambda_N
  std::vector<FlipFrame> frames;
  std::vector<int> relabeling;    // lambda_N label -> lambda_0 oriented label
  std::vector<int> inverse;       // lambda_0 label -> lambda_N oriented label
  std::vector<int> puncture_permutation;  // puncture of lambda_0 -> puncture of lambda_0
  // puncture ids of each layer, in terms of the ids of lambda_0
  std::vector<std::vector<int>> puncture_tracking;
  int steps() const { return static_cast<int>(frames.size()); }
};

MappingClassCertificate apply_mapping_class(const IdealTriangulation& tri, const MappingClassWord& word);

// ---------------------------------------------------------------- lattice maps of flips

// chi_e = i(e) + i(~e) in the Kashaev lattice before the flip.
IVec flip_vector(const IdealTriangulation& before, const FlipFrame& fr);
// Kashaev lattice after the flip -> lattice before (columns: images of the
// side basis of the new triangulation).
IMat kashaev_flip_map(const IdealTriangulation& before, const IdealTriangulation& after, const FlipFrame& fr);
// phi_*: column (f, p) is the lambda_N side vector of the preimage of side p of face f of lambda_0.
IMat kashaev_monodromy(const MappingClassCertificate& cert);
// Edge lattice after the flip -> edge lattice before, tropical part of the mutation.
IMat cf_flip_map(const IdealTriangulation& before, const FlipFrame& fr);
IMat cf_monodromy(const MappingClassCertificate& cert);

// Product of transvections x -> x + s <c, x> c, in word order.
IMat twist_word_homology_action(const std::vector<TwistLetter>& word, const IMat& intersection);

}  // namespace painv
