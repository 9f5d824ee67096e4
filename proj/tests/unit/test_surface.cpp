#include <set>

#include "checks.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace painv;

namespace {

DenseMatrix dense(const IMat& m) {
  DenseMatrix d(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) d(i, j) = Complex(static_cast<long>(m(i, j)));
  return d;
}

int dense_rank(const IMat& m) { return oracle::rank(dense(m), Real("1e-30")); }

IMat relabel(const IMat& m, const std::vector<int>& perm) {
  IMat out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(perm[i], perm[j]) = m(i, j);
  return out;
}

IdealTriangulation sigma11() { return load_preset("fig8").triangulation(); }
IdealTriangulation sigma12() { return load_preset("t09265").triangulation(); }

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("triangulation counts") {
  for (const auto& name : list_presets()) {
    Preset p = load_preset(name);
    IdealTriangulation tri = p.triangulation();
    CHECK(tri.genus() == p.genus);
    CHECK(tri.num_punctures() == p.punctures);
    CHECK(tri.num_edges() == -3 * tri.euler_characteristic());
    CHECK(tri.num_faces() == -2 * tri.euler_characteristic());
    // every edge has two ends
    IMat cv = tri.puncture_vectors();
    for (int x = 0; x < tri.num_edges(); ++x) {
      int64_t s = 0;
      for (int v = 0; v < tri.num_punctures(); ++v) s += cv(v, x);
      CHECK(s == 2);
    }
  }
  CHECK_THROWS_AS(IdealTriangulation({{0, 1, 2}, {0, ~1, ~2}}, 3), InvalidTriangulation);
}

TEST_CASE("epsilon on the once-punctured torus") {
  IdealTriangulation tri = sigma11();
  IMat eps = epsilon_matrix(tri);
  CHECK(eps == oracle::corner_count_epsilon(tri));
  // the hand count on the square diagram, with labels 0 and 1 exchanged
  IMat hand{{0, 2, -2}, {-2, 0, 2}, {2, -2, 0}};
  CHECK(relabel(eps, {1, 0, 2}) == hand);
  CHECK(eps.transpose() + eps == IMat(3, 3));
}

TEST_CASE("epsilon on the twice-punctured torus") {
  IdealTriangulation tri = sigma12();
  IMat eps = epsilon_matrix(tri);
  CHECK(eps == oracle::corner_count_epsilon(tri));
  CHECK(eps.transpose() + eps == IMat(6, 6));
  for (int64_t x : eps.a) CHECK((x >= -2 && x <= 2));
  CHECK(dense_rank(eps) == 4);  // radical rank 2
  CHECK(is_zero(eps * IVec(6, 1)));
  for (int v = 0; v < 2; ++v) CHECK(is_zero(eps * tri.puncture_vectors().row(v)));
  // the radical is spanned by the puncture vectors, which also span 1
  IMat rad = tri.puncture_vectors().transpose();
  CHECK(rank(rad) == 2);
  CHECK(rank(kernel(eps)) == 2);
  // adapted form: one block of 2 and a rank-2 radical
  SymplecticBasis sb = skew_normal_form({eps});
  CHECK(sb.blocks.size() == 2);
  std::multiset<int64_t> blocks(sb.blocks.begin(), sb.blocks.end());
  CHECK(blocks == std::multiset<int64_t>{1, 2});
}

TEST_CASE("edges that never share a corner have zero epsilon") {
  IdealTriangulation tri = sigma12();
  IMat eps = epsilon_matrix(tri);
  std::set<std::pair<int, int>> share;
  for (const auto& f : tri.faces())
    for (int p = 0; p < 3; ++p)
      for (int r = 0; r < 3; ++r) share.insert({edge_of(f[p]), edge_of(f[r])});
  int disjoint = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      if (!share.count({a, b})) {
        ++disjoint;
        CHECK(eps(a, b) == 0);
      }
  CHECK(disjoint > 0);
}

TEST_CASE("flips") {
  IdealTriangulation tri = sigma11();
  for (int e = 0; e < 3; ++e) {
    auto [t1, fr] = flip(tri, e);
    CHECK(t1.genus() == 1);
    CHECK(t1.num_punctures() == 1);
    CHECK(fr.e1 == ~fr.e2);
    CHECK(!find_isomorphisms(flip(t1, e).first, tri).empty());
  }
  // the first move of the twice-punctured example
  auto [t1, fr] = flip(sigma12(), 3);
  CHECK(t1.num_edges() == 6);
  CHECK(t1.num_punctures() == 2);
  CHECK(!(t1 == sigma12()));
  CHECK(epsilon_matrix(t1) == oracle::corner_count_epsilon(t1));

  checks::CheckResult r = checks::flip_involution(100, 7);
  CHECK_MESSAGE(r.pass, r.detail);
  CHECK(r.cases == 100);
}

TEST_CASE("self-folded faces") {
  IdealTriangulation tri({{0, ~0, 1}, {~1, 2, ~2}}, 3);
  CHECK(tri.num_punctures() == 3);
  CHECK(tri.genus() == 0);
  CHECK(tri.self_folded().size() == 2);
  EpsilonForm ef = epsilon_form(tri);
  CHECK(!(ef.generators == IMat::identity(3)));
  // X_i is replaced by X_i X_b for each folded edge i
  for (auto [i, b] : tri.self_folded()) {
    CHECK(ef.generators(i, i) == 1);
    CHECK(ef.generators(b, i) == 1);
  }
  CHECK(ef.matrix == IMat(3, 3));
  CHECK_THROWS_AS(flip(tri, 0), UnflippableEdge);
}

TEST_CASE("Kashaev lattice") {
  SUBCASE("once-punctured torus") {
    KashaevLattice k = kashaev_lattice(sigma11());
    CHECK(k.gram.rows == 4);
    CHECK(dense_rank(k.gram) == 4);
    CHECK(dense_rank(k.cfr) == 2);
    CHECK(k.corank == 0);
  }
  SUBCASE("twice-punctured torus") {
    IdealTriangulation tri = sigma12();
    KashaevLattice k = kashaev_lattice(tri);
    CHECK(k.gram.rows == 8);
    CHECK(dense_rank(k.gram) == 8);
    CHECK(k.corank == 1);
    // pulled-back form is epsilon
    CHECK(k.cfr.transpose() * k.gram * k.cfr == epsilon_matrix(tri));
    // images of the puncture vectors are orthogonal to the CF image
    for (const auto& c : k.puncture_images) CHECK(is_zero(k.cfr.transpose() * (k.gram * c)));
    // duals
    for (size_t v = 0; v + 1 < k.puncture_images.size(); ++v)
      for (size_t w = 0; w + 1 < k.puncture_images.size(); ++w)
        CHECK(dot(k.puncture_duals[v], k.gram * k.puncture_images[w]) == (v == w ? 1 : 0));
    // sum of the c_v is twice 1
    IVec sum(6, 0);
    for (int v = 0; v < 2; ++v) sum = sum + tri.puncture_vectors().row(v);
    CHECK(sum == IVec(6, 2));
    // homology part is orthogonal to the CF image
    CHECK(k.cfr.transpose() * k.gram * k.homology == IMat(6, k.homology.cols));
  }
}

TEST_CASE("mapping class certificates") {
  IdealTriangulation tri = sigma12();
  MappingClassWord empty;
  empty.relabeling = {0, 1, 2, 3, 4, 5};
  MappingClassCertificate c0 = apply_mapping_class(tri, empty);
  CHECK(c0.steps() == 0);
  CHECK(c0.puncture_permutation == std::vector<int>{0, 1});

  MappingClassCertificate t = apply_mapping_class(tri, load_preset("t09265").word());
  CHECK(t.steps() == 11);
  CHECK(t.puncture_permutation == std::vector<int>{0, 1});
  MappingClassCertificate s = apply_mapping_class(tri, load_preset("s254").word());
  CHECK(s.puncture_permutation == std::vector<int>{1, 0});

  MappingClassWord bad = load_preset("t09265").word();
  std::swap(bad.relabeling[0], bad.relabeling[1]);
  CHECK_THROWS_AS(apply_mapping_class(tri, bad), RelabelingMismatch);
}

TEST_CASE("puncture permutation from corner tracking") {
  for (const auto& name : list_presets()) {
    Preset p = load_preset(name);
    IdealTriangulation tri = p.triangulation();
    MappingClassCertificate cert = apply_mapping_class(tri, p.word());
    const IdealTriangulation& top = cert.layers.back();
    const auto& track = cert.puncture_tracking.back();
    // the relabeling sends the tail of each top side to the tail of its image
    std::vector<int> perm(tri.num_punctures(), -1);
    for (int x = 0; x < top.num_edges(); ++x)
      for (int side : {x, ~x}) {
        int below = tri.tail(map_side(cert.relabeling, side));
        int above = track[top.tail(side)];
        if (perm[above] >= 0) CHECK(perm[above] == below);
        perm[above] = below;
      }
    CHECK_MESSAGE(perm == cert.puncture_permutation, name);
  }
}

TEST_CASE("twist actions on homology") {
  IMat omega{{0, 1}, {-1, 0}};
  IMat ta = twist_word_homology_action({{IVec{1, 0}, 1}}, omega);
  CHECK(ta == IMat{{1, 1}, {0, 1}});
  IMat tab = twist_word_homology_action({{IVec{1, 0}, 1}, {IVec{0, 1}, -1}}, omega);
  CHECK(det(tab) == 1);
  CHECK(tab.transpose() * omega * tab == omega);
  CHECK(twist_word_homology_action({}, omega) == IMat::identity(2));
  for (const auto& s : load_surgery_presets()) {
    IMat act = twist_word_homology_action(s.twist_word, s.intersection);
    CHECK(act.transpose() * s.intersection * act == s.intersection);
  }
}

}  // TEST_SUITE
