#include "painv/surface.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace painv {

namespace {
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
};
}  // namespace

IdealTriangulation::IdealTriangulation(std::vector<Face> faces, int edges)
    : faces_(std::move(faces)), edges_(edges), where_(2 * edges, {-1, -1}), tail_(2 * edges, -1) {
  if (3 * num_faces() != 2 * edges_) throw InvalidTriangulation("face and edge counts disagree");
  for (int f = 0; f < num_faces(); ++f)
    for (int p = 0; p < 3; ++p) {
      int s = faces_[f][p];
      if (edge_of(s) >= edges_) throw InvalidTriangulation("side label out of range");
      auto& w = where_[slot(s)];
      if (w.first >= 0) throw InvalidTriangulation("side appears twice");
      w = {f, p};
    }
  // tail(~f[p]) = head(f[p]) = tail(f[p+1])
  UnionFind uf(2 * edges_);
  for (const auto& f : faces_)
    for (int p = 0; p < 3; ++p) uf.join(slot(~f[p]), slot(f[(p + 1) % 3]));
  std::vector<int> id(2 * edges_, -1);
  for (int s = 0; s < 2 * edges_; ++s) {
    int r = uf.find(s);
    if (id[r] < 0) id[r] = punctures_++;
    tail_[s] = id[r];
  }
  const int chi = euler_characteristic();
  if (chi >= 0) throw InvalidTriangulation("surface must have negative Euler characteristic");
  int twice_g = 2 - punctures_ - chi;
  if (twice_g < 0 || twice_g % 2) throw InvalidTriangulation("inconsistent Euler count");
  genus_ = twice_g / 2;
  cv_ = IMat(punctures_, edges_);
  for (int x = 0; x < edges_; ++x) {
    cv_(tail(x), x) += 1;
    cv_(tail(~x), x) += 1;
  }
}

std::pair<int, int> IdealTriangulation::where(int side) const {
  if (edge_of(side) >= edges_) throw std::out_of_range("side label out of range");
  return where_[slot(side)];
}

std::vector<std::pair<int, int>> IdealTriangulation::self_folded() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& f : faces_)
    for (int p = 0; p < 3; ++p)
      if (f[(p + 1) % 3] == ~f[p]) out.push_back({edge_of(f[p]), edge_of(f[(p + 2) % 3])});
  return out;
}

// ---------------------------------------------------------------- forms

IVec side_vector(const IdealTriangulation& tri, int side) {
  auto [f, p] = tri.where(side);
  IVec v(2 * tri.num_faces(), 0);
  if (p == 0) {
    v[2 * f] = 1;
  } else if (p == 1) {
    v[2 * f + 1] = 1;
  } else {
    v[2 * f] = -1;
    v[2 * f + 1] = -1;
  }
  return v;
}

IMat kashaev_form(const IdealTriangulation& tri) {
  const int F = tri.num_faces();
  IMat W(2 * F, 2 * F);
  for (int f = 0; f < F; ++f) {
    W(2 * f, 2 * f + 1) = 1;
    W(2 * f + 1, 2 * f) = -1;
  }
  return W;
}

namespace {
IMat cfr_matrix(const IdealTriangulation& tri) {
  IMat I(2 * tri.num_faces(), tri.num_edges());
  for (int x = 0; x < tri.num_edges(); ++x) I.set_col(x, side_vector(tri, x) + side_vector(tri, ~x));
  return I;
}
}  // namespace

IMat epsilon_matrix(const IdealTriangulation& tri) {
  IMat I = cfr_matrix(tri);
  return I.transpose() * kashaev_form(tri) * I;
}

EpsilonForm epsilon_form(const IdealTriangulation& tri) {
  IMat eps = epsilon_matrix(tri);
  IMat G = IMat::identity(tri.num_edges());
  for (auto [i, b] : tri.self_folded()) G(b, i) += 1;  // X_i -> X_i X_b
  return {G.transpose() * eps * G, G};
}

// ---------------------------------------------------------------- flips

std::pair<IdealTriangulation, FlipFrame> flip(const IdealTriangulation& tri, int e) {
  auto [fa, pa] = tri.where(e);
  auto [fb, pb] = tri.where(~e);
  if (fa == fb) {
    std::ostringstream os;
    os << "edge " << edge_of(e) << " bounds a single face";
    throw UnflippableEdge(os.str());
  }
  const Face& A = tri.faces()[fa];
  const Face& B = tri.faces()[fb];
  FlipFrame fr;
  fr.e = e;
  fr.a = A[(pa + 1) % 3];
  fr.b = A[(pa + 2) % 3];
  fr.c = B[(pb + 1) % 3];
  fr.d = B[(pb + 2) % 3];
  fr.face_a = fa;
  fr.face_b = fb;
  fr.e1 = e;
  fr.e2 = ~e;
  const int nw = edge_of(e);
  fr.e1p = nw;
  fr.e2p = ~nw;
  std::vector<Face> faces = tri.faces();
  faces[fa] = {nw, fr.d, fr.a};
  faces[fb] = {~nw, fr.b, fr.c};
  return {IdealTriangulation(std::move(faces), tri.num_edges()), fr};
}

int map_side(const std::vector<int>& iso, int side) {
  return side >= 0 ? iso.at(side) : ~iso.at(~side);
}

std::vector<std::vector<int>> find_isomorphisms(const IdealTriangulation& a, const IdealTriangulation& b) {
  std::vector<std::vector<int>> out;
  if (a.num_edges() != b.num_edges() || a.num_faces() != b.num_faces() || a.num_faces() == 0) return out;
  const int E = a.num_edges();
  for (int g = 0; g < b.num_faces(); ++g)
    for (int r = 0; r < 3; ++r) {
      // side maps on all oriented labels, slot encoding as in the class
      std::vector<int> img(2 * E, 0);
      std::vector<bool> set(2 * E, false);
      auto slot = [](int s) { return s >= 0 ? 2 * s : 2 * (~s) + 1; };
      bool ok = true;
      std::deque<std::pair<int, int>> todo;  // (face of a, matching face of b with rotation)
      std::vector<int> face_img(a.num_faces(), -1);
      auto assign_face = [&](int fa, int fb, int rot) {
        if (face_img[fa] >= 0) return;
        face_img[fa] = fb;
        for (int p = 0; p < 3; ++p) {
          int s = a.faces()[fa][p], t = b.faces()[fb][(p + rot) % 3];
          for (auto [x, y] : {std::pair<int, int>{s, t}, std::pair<int, int>{~s, ~t}}) {
            if (set[slot(x)] && img[slot(x)] != y) ok = false;
            set[slot(x)] = true;
            img[slot(x)] = y;
          }
          todo.push_back({~s, ~t});
        }
      };
      assign_face(0, g, r);
      while (ok && !todo.empty()) {
        auto [s, t] = todo.front();
        todo.pop_front();
        auto [fa, pa] = a.where(s);
        auto [fb, pb] = b.where(t);
        if (face_img[fa] >= 0) {
          if (face_img[fa] != fb) ok = false;
          continue;
        }
        assign_face(fa, fb, ((pb - pa) % 3 + 3) % 3);
      }
      if (!ok) continue;
      std::vector<int> iso(E);
      for (int x = 0; x < E; ++x) {
        if (!set[slot(x)]) ok = false;
        iso[x] = img[slot(x)];
      }
      // faces must land on faces exactly
      for (int f = 0; ok && f < a.num_faces(); ++f) {
        auto [fb, pb] = b.where(map_side(iso, a.faces()[f][0]));
        for (int p = 1; p < 3; ++p)
          if (b.faces()[fb][(pb + p) % 3] != map_side(iso, a.faces()[f][p])) ok = false;
      }
      if (ok) out.push_back(iso);
    }
  return out;
}

// ---------------------------------------------------------------- Kashaev lattice

KashaevLattice kashaev_lattice(const IdealTriangulation& tri) {
  KashaevLattice L;
  const int F = tri.num_faces(), E = tri.num_edges(), m = 2 * F;
  L.gram = kashaev_form(tri);
  L.cfr = cfr_matrix(tri);
  L.punctures = tri.puncture_vectors();
  const int p = tri.num_punctures();
  for (int v = 0; v < p; ++v) L.puncture_images.push_back(L.cfr * L.punctures.row(v));

  // vectors orthogonal to the whole CF image
  IMat rows = L.cfr.transpose() * L.gram;
  L.homology = kernel(rows);

  // b_v with omega(b_v, c_w) = delta for the first p-1 punctures, then made
  // mutually orthogonal by adding multiples of the c's
  std::vector<IVec> cw(L.puncture_images.begin(), L.puncture_images.begin() + (p - 1));
  if (p > 1) {
    std::vector<IVec> R;
    for (const auto& c : cw) R.push_back(L.gram * c);
    IMat Rm = IMat::from_rows(R, m);
    for (int v = 0; v < p - 1; ++v) {
      IVec rhs(p - 1, 0);
      rhs[v] = 1;
      L.puncture_duals.push_back(int_solve(Rm, rhs));
    }
    for (int w = 0; w < p - 1; ++w)
      for (int v = 0; v < w; ++v) {
        int64_t o = dot(L.puncture_duals[v], L.gram * L.puncture_duals[w]);
        L.puncture_duals[w] = L.puncture_duals[w] - o * cw[v];
      }
  }
  std::vector<IVec> betas;
  for (const auto& b : L.puncture_duals) betas.push_back(-1 * b);

  IMat K;
  if (p > 1) {
    std::vector<IVec> orth;
    for (const auto& c : cw) orth.push_back(L.gram * c);
    for (const auto& b : betas) orth.push_back(L.gram * b);
    K = kernel(IMat::from_rows(orth, m));
  } else {
    K = IMat::identity(m);
  }
  SymplecticBasis kb = skew_normal_form({K.transpose() * L.gram * K});
  for (auto d : kb.blocks)
    if (d != 1) throw InvalidTriangulation("Kashaev complement is not unimodular");
  if (2 * static_cast<int>(kb.blocks.size()) != K.cols) throw InvalidTriangulation("Kashaev complement is degenerate");
  std::vector<IVec> cols;
  IMat KC = K * kb.change;
  for (int i = 0; i < K.cols; ++i) cols.push_back(KC.col(i));
  for (int v = 0; v < p - 1; ++v) {
    cols.push_back(cw[v]);
    cols.push_back(betas[v]);
  }
  L.adapted.change = IMat::from_columns(cols, m);
  L.adapted.blocks.assign(m / 2, 1);
  L.adapted.radical_rank = 0;
  unimodular_inverse(L.adapted.change);  // throws unless a basis

  // rank audit: CF image plus the homology part
  std::vector<IVec> span;
  for (int x = 0; x < E; ++x) span.push_back(L.cfr.col(x));
  for (int j = 0; j < L.homology.cols; ++j) span.push_back(L.homology.col(j));
  L.corank = m - rank(IMat::from_columns(span, m));
  return L;
}

// ---------------------------------------------------------------- mapping classes

MappingClassCertificate apply_mapping_class(const IdealTriangulation& tri, const MappingClassWord& word) {
  MappingClassCertificate cert;
  cert.layers.push_back(tri);
  cert.puncture_tracking.push_back({});
  for (int v = 0; v < tri.num_punctures(); ++v) cert.puncture_tracking[0].push_back(v);
  for (int e : word.flips) {
    const IdealTriangulation& cur = cert.layers.back();
    auto [next, fr] = flip(cur, e);
    std::vector<int> track(next.num_punctures(), -1);
    const auto& prev = cert.puncture_tracking.back();
    for (int x = 0; x < next.num_edges(); ++x)
      for (int s : {x, ~x}) {
        int before;
        if (s == fr.e1p)
          before = cur.tail(~fr.a);
        else if (s == fr.e2p)
          before = cur.tail(~fr.c);
        else
          before = cur.tail(s);
        track[next.tail(s)] = prev[before];
      }
    cert.layers.push_back(std::move(next));
    cert.frames.push_back(fr);
    cert.puncture_tracking.push_back(track);
  }
  const IdealTriangulation& last = cert.layers.back();
  const int E = tri.num_edges();
  if (static_cast<int>(word.relabeling.size()) != E) throw RelabelingMismatch("relabeling has the wrong length");
  cert.relabeling = word.relabeling;
  cert.inverse.assign(E, 0);
  std::vector<bool> hit(E, false);
  for (int x = 0; x < E; ++x) {
    int t = word.relabeling[x];
    if (edge_of(t) >= E || hit[edge_of(t)]) throw RelabelingMismatch("relabeling is not a bijection");
    hit[edge_of(t)] = true;
    cert.inverse[edge_of(t)] = t >= 0 ? x : ~x;
  }
  for (const auto& f : last.faces()) {
    auto [g, p] = tri.where(map_side(word.relabeling, f[0]));
    for (int k = 1; k < 3; ++k)
      if (tri.faces()[g][(p + k) % 3] != map_side(word.relabeling, f[k]))
        throw RelabelingMismatch("relabeled final triangulation does not match the initial one");
  }
  const auto& trackN = cert.puncture_tracking.back();
  cert.puncture_permutation.assign(tri.num_punctures(), -1);
  for (int x = 0; x < E; ++x)
    for (int s : {x, ~x}) cert.puncture_permutation[tri.tail(s)] = trackN[last.tail(map_side(cert.inverse, s))];
  return cert;
}

IMat twist_word_homology_action(const std::vector<TwistLetter>& word, const IMat& intersection) {
  const int h = intersection.rows;
  IMat M = IMat::identity(h);
  for (const auto& t : word) {
    IMat T = IMat::identity(h);
    IVec Jc = intersection.transpose() * t.curve;  // <c, x> = c^T J x
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) T(i, j) += t.sign * t.curve[i] * Jc[j];
    M = M * T;
  }
  return M;
}

}  // namespace painv

namespace painv {

IVec flip_vector(const IdealTriangulation& before, const FlipFrame& fr) {
  return side_vector(before, fr.e1) + side_vector(before, fr.e2);
}

IMat kashaev_flip_map(const IdealTriangulation& before, const IdealTriangulation& after, const FlipFrame& fr) {
  const int F = before.num_faces();
  const IVec chi = flip_vector(before, fr);
  auto image = [&](int side) -> IVec {
    if (side == fr.a || side == fr.c) return side_vector(before, side);
    if (side == fr.b || side == fr.d) return side_vector(before, side) + chi;
    if (side == fr.e1p) return side_vector(before, fr.b) + side_vector(before, fr.c);
    if (side == fr.e2p) return side_vector(before, fr.a) + side_vector(before, fr.d);
    return side_vector(before, side);
  };
  IMat M(2 * F, 2 * F);
  for (int f = 0; f < F; ++f)
    for (int p = 0; p < 2; ++p) M.set_col(2 * f + p, image(after.faces()[f][p]));
  return M;
}

IMat kashaev_monodromy(const MappingClassCertificate& cert) {
  const IdealTriangulation& first = cert.layers.front();
  const IdealTriangulation& last = cert.layers.back();
  const int F = first.num_faces();
  IMat P(2 * F, 2 * F);
  for (int f = 0; f < F; ++f)
    for (int p = 0; p < 2; ++p) P.set_col(2 * f + p, side_vector(last, map_side(cert.inverse, first.faces()[f][p])));
  return P;
}

IMat cf_flip_map(const IdealTriangulation& before, const FlipFrame& fr) {
  const int E = before.num_edges(), e = edge_of(fr.e);
  IMat eps = epsilon_matrix(before);
  IMat M(E, E);
  for (int x = 0; x < E; ++x) {
    if (x == e) {
      M(e, x) = -1;
    } else {
      M(x, x) = 1;
      M(e, x) += std::max<int64_t>(eps(x, e), 0);
    }
  }
  return M;
}

IMat cf_monodromy(const MappingClassCertificate& cert) {
  const int E = cert.layers.front().num_edges();
  IMat P(E, E);
  for (int x = 0; x < E; ++x) P(edge_of(cert.inverse[x]), x) = 1;
  return P;
}

}  // namespace painv
