#include "doctest.h"
#include "qlat/gk.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace qlat;

namespace {

Mat mk(const Ring& R, std::vector<std::vector<long long>> rows) {
  return Mat::from_ints(&R, rows);
}

// deterministic unimodular congruence: a handful of elementary column
// operations plus a rotation, parameterized by `pattern`
Mat scramble(const Mat& T, int pattern) {
  const Ring& R = *T.R;
  int n = T.rows;
  Mat U = Mat::identity(T.R, n);
  for (int k = 0; k < 3; ++k) {
    int i = (pattern + k) % n;
    int j = (pattern + 2 * k + 1) % n;
    if (i == j) continue;
    int g = 1 + (pattern + k) % (R.q - 1 > 0 ? R.q - 1 : 1);
    RElem c = R.mul(R.lift_digit(g), R.mul_pi_pow(R.one(), k % 2));
    Mat E = Mat::identity(T.R, n);
    E.at(i, j) = c;
    U = mat_mul(U, E);
  }
  Mat P(T.R, n, n);
  for (int j = 0; j < n; ++j) P.at((j + pattern) % n, j) = R.one();
  U = mat_mul(U, P);
  return congruence(T, U);
}

std::vector<int> iv(std::initializer_list<int> v) { return std::vector<int>(v); }

EGK mk_egk(std::vector<int> n, std::vector<int> m, std::vector<int> z) {
  EGK e;
  e.n = std::move(n);
  e.m = std::move(m);
  e.zeta = std::move(z);
  return e;
}

} // namespace

TEST_CASE("runs of a sorted vector") {
  Runs r = runs_of({0, 1, 1, 2});
  CHECK(r.value == iv({0, 1, 2}));
  CHECK(r.count == iv({1, 2, 1}));
  CHECK(r.end == iv({1, 3, 4}));
  Runs e = runs_of({});
  CHECK(e.value.empty());
  Runs s = runs_of({5, 5, 5});
  CHECK(s.value == iv({5}));
  CHECK(s.count == iv({3}));
}

TEST_CASE("involution enumeration counts") {
  // number of involutions on n letters: 1, 1, 2, 4, 10, 26, 76, 232, 764
  std::vector<size_t> want = {1, 1, 2, 4, 10, 26, 76, 232, 764};
  for (int n = 0; n <= 8; ++n) {
    const auto& inv = all_involutions(n);
    CHECK(inv.size() == want[n]);
    for (const auto& s : inv)
      for (int i = 0; i < n; ++i) CHECK(s[s[i]] == i);
  }
  CHECK_THROWS_AS(all_involutions(11), std::invalid_argument);
}

TEST_CASE("admissibility of small involutions") {
  // parity rules out the swap on (0,1); the identity works
  CHECK(is_admissible({0, 1}, {0, 1}));
  CHECK_FALSE(is_admissible({0, 1}, {1, 0}));
  // two fixed points of equal parity are forbidden
  CHECK_FALSE(is_admissible({0, 2}, {0, 1}));
  CHECK(is_admissible({0, 2}, {1, 0}));
  // equal pairs carry no constraint beyond the run rule
  CHECK(is_admissible({0, 0}, {1, 0}));
  CHECK_FALSE(is_admissible({0, 0}, {0, 1}));
  // the involution certifying a doubled diagonal unimodular lattice
  CHECK(is_admissible({0, 1, 1, 2}, {3, 2, 1, 0}));
  CHECK_FALSE(is_admissible({0, 1, 1, 2}, {1, 0, 3, 2}));
  // every sorted type of length <= 5 admits at least one admissible involution
  for (int n = 1; n <= 5; ++n) {
    std::vector<int> a(n, 0);
    for (;;) {
      bool sorted = true;
      for (int i = 0; i + 1 < n; ++i)
        if (a[i] > a[i + 1]) sorted = false;
      if (sorted) {
        bool any = false;
        for (const auto& s : all_involutions(n))
          if (is_admissible(a, s)) {
            any = true;
            break;
          }
        CHECK(any);
      }
      int k = n - 1;
      while (k >= 0 && a[k] == 4) a[k--] = 0;
      if (k < 0) break;
      ++a[k];
    }
  }
}

TEST_CASE("greedy order vector on simple forms") {
  Ring R(2, 1, 1);
  CHECK(max_s_vector(mk(R, {{2, 0}, {0, 8}})) == iv({0, 2}));
  CHECK(max_s_vector(mk(R, {{8, 0}, {0, 2}})) == iv({0, 0}));
  CHECK(max_s_vector(mk(R, {{0, 2}, {2, 0}})) == iv({1, 1}));
  CHECK(max_s_vector(mk(R, {{0, 1}, {1, 0}})) == iv({0, 0}));
  // the greedy vector of a diagonal form can undershoot the invariant
  CHECK(max_s_vector(mk(R, {{2, 0}, {0, 2}})) == iv({0, 0}));
  // scaling the form shifts the greedy vector
  Mat T = mk(R, {{2, 0}, {0, 8}});
  CHECK(max_s_vector(mat_scale_pi(T, 2)) == iv({2, 4}));
}

TEST_CASE("reduced presentations certify the invariant") {
  Ring R(2, 1, 1);
  // (2, 2x+2y+4y^2-ish): e2 += e1 turns diag(2,2) into a reduced form
  Mat T = mk(R, {{2, 2}, {2, 4}});
  CHECK(max_s_vector(T) == iv({0, 1}));
  CHECK(is_reduced(T, {0, 1}, {0, 1}));
  auto cert = find_certificate(T, {0, 1});
  REQUIRE(cert.has_value());
  CHECK(*cert == iv({0, 1}));
  // diag(2,2) itself is not reduced at (0,1)
  CHECK_FALSE(is_reduced(mk(R, {{2, 0}, {0, 2}}), {0, 1}, {0, 1}));
  // a paired form: the second slot is tied to the first by the involution
  Mat S = mk(R, {{2, 2}, {2, 8}});
  CHECK(max_s_vector(S) == iv({0, 2}));
  auto c2 = find_certificate(S, {0, 2});
  REQUIRE(c2.has_value());
  CHECK(*c2 == iv({1, 0}));
  // its diagonal counterpart is not reduced at the invariant
  CHECK_FALSE(find_certificate(mk(R, {{2, 0}, {0, 6}}), {0, 2}).has_value());
}

TEST_CASE("rank-2 closed form panel") {
  Ring R(2, 1, 1);
  auto v = [&](std::vector<std::vector<long long>> t) {
    return gk_binary_values(mk(R, t));
  };
  CHECK(v({{2, 0}, {0, 6}}) == std::pair<int, int>(0, 2));
  CHECK(v({{2, 0}, {0, 2}}) == std::pair<int, int>(0, 1));
  CHECK(v({{4, 0}, {0, 4}}) == std::pair<int, int>(1, 2));
  CHECK(v({{0, 1}, {1, 0}}) == std::pair<int, int>(0, 0));
  CHECK(v({{0, 2}, {2, 0}}) == std::pair<int, int>(1, 1));
  CHECK(v({{2, 0}, {0, 14}}) == std::pair<int, int>(0, 2));
  CHECK(v({{2, 0}, {0, 10}}) == std::pair<int, int>(0, 1));
  CHECK(v({{2, 0}, {0, 4}}) == std::pair<int, int>(0, 1));
}

TEST_CASE("rank-2 search certifies the closed form") {
  Ring R(2, 1, 1);
  std::vector<std::vector<std::vector<long long>>> panel = {
      {{2, 0}, {0, 6}},  {{2, 0}, {0, 2}},  {{4, 0}, {0, 4}},
      {{0, 1}, {1, 0}},  {{0, 2}, {2, 0}},  {{2, 0}, {0, 14}},
      {{2, 0}, {0, 10}}, {{2, 0}, {0, 4}},
  };
  for (const auto& t : panel) {
    Mat T = mk(R, t);
    auto closed = gk_binary_values(T);
    for (int pat = 0; pat < 4; ++pat) {
      Mat S = pat == 0 ? T : scramble(T, pat);
      GKResult res = gk(S);
      REQUIRE(res.certified);
      REQUIRE(res.a.size() == 2);
      CHECK(res.a[0] == closed.first);
      CHECK(res.a[1] == closed.second);
      CHECK(mat_eq(congruence(S, res.U), res.R));
      CHECK(T.R->ord(mat_det(res.U)) == 0);
      CHECK(is_admissible(res.a, res.sigma));
      CHECK(is_reduced(res.R, res.a, res.sigma));
    }
  }
}

TEST_CASE("rank one, trivial and invalid inputs") {
  Ring R(2, 1, 1);
  GKResult one = gk(mk(R, {{8}}));
  CHECK(one.a == iv({2}));
  CHECK(one.certified);
  CHECK_THROWS_AS(gk(mk(R, {{0}})), std::invalid_argument);
  CHECK_THROWS_AS(gk(mk(R, {{2, 2}, {2, 2}})), std::invalid_argument);
  // odd diagonal entries are not a doubled Gram matrix
  CHECK_THROWS_AS(gk(mk(R, {{1, 0}, {0, 2}})), std::runtime_error);
}

TEST_CASE("odd residue characteristic uses the block decomposition") {
  Ring R(3, 1, 1);
  Mat T = mk(R, {{1, 0, 0}, {0, 3, 0}, {0, 0, 9}});
  CHECK(gk_odd_values(T) == iv({0, 1, 2}));
  Mat S = mk(R, {{9, 0, 0}, {0, 1, 0}, {0, 0, 3}});
  CHECK(gk_odd_values(S) == iv({0, 1, 2}));
  GKResult res = gk(scramble(T, 1));
  CHECK(res.certified);
  CHECK(res.a == iv({0, 1, 2}));
  CHECK(res.method == "jordan-odd");
  CHECK_THROWS_AS(egk(T), std::invalid_argument);
}

TEST_CASE("doubled lattices over the 2-adic integers") {
  Ring R(2, 1, 1);
  struct Case {
    std::vector<std::vector<long long>> t;
    std::vector<int> want;
  };
  std::vector<Case> panel = {
      {{{2, 0}, {0, 2}}, {0, 1, 1, 2}},
      {{{2, 0}, {0, 6}}, {0, 1, 1, 2}},
      {{{2, 0}, {0, 4}}, {0, 1, 2, 3}},
      {{{0, 2}, {2, 0}}, {1, 1, 1, 1}},
      {{{0, 1}, {1, 0}}, {0, 0, 0, 0}},
      {{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}, {0, 1, 1, 1, 1, 2}},
      {{{2, 0, 0}, {0, 2, 0}, {0, 0, 6}}, {0, 1, 1, 1, 1, 2}},
      {{{2, 0, 0}, {0, 4, 0}, {0, 0, 8}}, {0, 1, 2, 2, 3, 4}},
      {{{0, 2, 0}, {2, 0, 0}, {0, 0, 2}}, {0, 1, 1, 1, 1, 2}},
  };
  for (const auto& cs : panel) {
    Mat T = mk(R, cs.t);
    GKResult res = gk_double(T);
    REQUIRE(res.certified);
    CHECK(res.method == "double-assembly");
    CHECK(res.a == cs.want);
    CHECK(mat_eq(congruence(double_gram(T), res.U), res.R));
    CHECK(R.ord(mat_det(res.U)) == 0);
    CHECK(is_admissible(res.a, res.sigma));
    CHECK(is_reduced(res.R, res.a, res.sigma));
    CHECK(res.a == double_gk_from_profile(jordan_split(T)));
    // the involution encodes the block profile of the original lattice
    auto prof = profile_from_double(res.a, res.sigma);
    Jordan J = jordan_split(T);
    REQUIRE(prof.size() == J.parts.size());
    for (size_t i = 0; i < prof.size(); ++i) {
      CHECK(prof[i].scale == J.parts[i].scale);
      CHECK(prof[i].rank == J.parts[i].rank);
      CHECK(prof[i].typeI == J.parts[i].typeI);
      if (prof[i].typeI)
        CHECK(prof[i].odd_rank == (J.parts[i].rank % 2 == 1));
    }
  }
}

TEST_CASE("doubled lattices cross-checked by plain search") {
  Ring R(2, 1, 1);
  std::vector<std::vector<std::vector<long long>>> panel = {
      {{2, 0}, {0, 2}},
      {{2, 0}, {0, 6}},
      {{2, 0}, {0, 4}},
      {{0, 1}, {1, 0}},
  };
  for (const auto& t : panel) {
    Mat T = mk(R, t);
    GKResult direct = gk_double(T);
    SearchOpts opts;
    opts.budget = 2000000;
    GKResult search = gk(double_gram(T), opts);
    REQUIRE(search.certified);
    CHECK(search.a == direct.a);
  }
  // one six-dimensional search
  Mat T3 = mk(R, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  SearchOpts opts;
  opts.budget = 4000000;
  GKResult search = gk(double_gram(T3), opts);
  REQUIRE(search.certified);
  CHECK(search.a == iv({0, 1, 1, 1, 1, 2}));
}

TEST_CASE("extended datum of doubled unimodular lattices") {
  Ring R(2, 1, 1);
  for (auto t : {std::vector<std::vector<long long>>{{2, 0}, {0, 2}},
                 std::vector<std::vector<long long>>{{2, 0}, {0, 6}}}) {
    Mat T = mk(R, t);
    GKResult res = gk_double(T);
    EGK e = egk_from_reduced(res.R, res.a);
    CHECK(e == mk_egk({1, 2, 1}, {0, 1, 2}, {1, 1, 1}));
    CHECK(egk_str(e) == "(1,2,1;0,1,2;1,1,1)");
    // the full search pipeline agrees
    EGK viaSearch = egk(double_gram(T));
    CHECK(viaSearch == e);
  }
}

TEST_CASE("truncated datum distinguishes unimodular lattices") {
  Ring R(2, 1, 1);
  // the doubled datum of these two lattices agrees; the truncated datum of
  // the lattices themselves does not
  EGK a = egk_trunc(mk(R, {{2, 0}, {0, 2}}));
  CHECK(a == mk_egk({1, 1}, {0, 1}, {1, 0}));
  EGK b = egk_trunc(mk(R, {{2, 0}, {0, 6}}));
  CHECK(b == mk_egk({1}, {0}, {1}));
  CHECK(a != b);
}

TEST_CASE("truncated datum can coincide for distinct unimodular types") {
  Ring R(2, 1, 1);
  // rank four, even type-one part vs rank three, odd type-one part
  Mat L = mk(R, {{0, 2, 0, 0}, {2, 0, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 6}});
  Mat M = mk(R, {{0, 2, 0}, {2, 0, 0}, {0, 0, 2}});
  EGK el = egk_trunc(L);
  EGK em = egk_trunc(M);
  EGK want = mk_egk({1, 2}, {0, 1}, {1, 1});
  CHECK(el == want);
  CHECK(em == want);
  // for the rank-three lattice the truncation is the full datum
  CHECK(egk(M) == want);
}

TEST_CASE("sign invariants on anchor forms") {
  Ring R(2, 1, 1);
  CHECK(eta_of(mk(R, {{2}})) == 1);
  CHECK(eta_of(mk(R, {{0, 2}, {2, 0}})) == 1);
  CHECK(eta_of(mk(R, {{0, 1}, {1, 0}})) == 1);
  CHECK(eta_of(mk(R, {{2, 0}, {0, 2}})) == 1);
  Mat d111 = mk(R, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  CHECK(eta_of(d111) == -1);
  // stable under adjoining a split plane
  Mat d111H = mk(R, {{2, 0, 0, 0, 0},
                     {0, 2, 0, 0, 0},
                     {0, 0, 2, 0, 0},
                     {0, 0, 0, 0, 2},
                     {0, 0, 0, 2, 0}});
  CHECK(eta_of(d111H) == -1);
  // invariant under change of basis
  for (int pat = 1; pat <= 4; ++pat) {
    CHECK(eta_of(scramble(d111, pat)) == -1);
    CHECK(eta_of(scramble(d111H, pat)) == -1);
  }
  CHECK(xi_of(mk(R, {{0, 2}, {2, 0}})) == 1);
  CHECK(xi_of(mk(R, {{0, 1}, {1, 0}})) == 1);
  CHECK(xi_of(mk(R, {{2, 0}, {0, 2}})) == 0);
  CHECK(xi_of(mk(R, {{2, 0}, {0, 6}})) == -1);
  CHECK_THROWS_AS(eta_of(mk(R, {{2, 2}, {2, 2}})), std::invalid_argument);
}

TEST_CASE("invariant is stable under change of basis and scaling") {
  Ring R(2, 1, 1);
  std::vector<std::vector<std::vector<long long>>> panel = {
      {{2, 0}, {0, 6}},
      {{2, 0, 0}, {0, 4, 0}, {0, 0, 8}},
      {{0, 2, 0}, {2, 0, 0}, {0, 0, 2}},
      {{2, 2, 0}, {2, 4, 2}, {0, 2, 12}},
  };
  for (const auto& t : panel) {
    Mat T = mk(R, t);
    GKResult base = gk(T);
    REQUIRE(base.certified);
    // sum of the invariant matches the discriminant-order invariant
    long long sum = 0;
    for (int v : base.a) sum += v;
    CHECK(sum == delta_invariant(T));
    for (int pat = 1; pat <= 3; ++pat) {
      GKResult other = gk(scramble(T, pat));
      REQUIRE(other.certified);
      CHECK(other.a == base.a);
    }
    // scaling shifts every slot
    for (int k = 1; k <= 2; ++k) {
      GKResult shifted = gk(mat_scale_pi(T, k));
      REQUIRE(shifted.certified);
      std::vector<int> want = base.a;
      for (int& v : want) v += k;
      CHECK(shifted.a == want);
    }
  }
}

TEST_CASE("search is deterministic for a fixed seed") {
  Ring R(2, 1, 1);
  Mat T = scramble(mk(R, {{2, 0, 0}, {0, 4, 0}, {0, 0, 8}}), 2);
  SearchOpts opts;
  opts.seed = 7;
  GKResult r1 = gk(T, opts);
  GKResult r2 = gk(T, opts);
  CHECK(r1.a == r2.a);
  CHECK(r1.sigma == r2.sigma);
  CHECK(r1.method == r2.method);
  CHECK(mat_eq(r1.R, r2.R));
  CHECK(mat_eq(r1.U, r2.U));
  SearchOpts o3;
  o3.seed = 99;
  GKResult r3 = gk(T, o3);
  REQUIRE(r1.certified);
  REQUIRE(r3.certified);
  CHECK(r3.a == r1.a);
}

// ---------------------------------------------------------------------------
// rank-2 lattices indexed by discriminant data: construction, doubling,
// block decomposition and truncated datum, over several dyadic rings
// ---------------------------------------------------------------------------
namespace {

void binary_battery(const Ring& R, const std::vector<std::pair<int, int>>& kinds,
                    int fmax, bool constructive_double) {
  for (auto [xi, d] : kinds) {
    for (int f = 0; f <= fmax; ++f) {
      BinaryLattice L = make_binary(R, xi, d, f);
      // the invariant of the lattice itself
      GKResult self = gk(L.T);
      REQUIRE(self.certified);
      int a2 = d == 0 ? 2 * f : 2 * f + 1;
      CHECK(self.a == iv({0, a2}));
      // the doubled lattice: explicit witness against the closed form
      std::vector<int> dbl = binary_double_values(R, d, f);
      GKResult wit = binary_double_reduced(L);
      CHECK(wit.certified);
      CHECK(wit.a == dbl);
      CHECK(mat_eq(congruence(double_gram(L.T), wit.U), wit.R));
      if (constructive_double) {
        GKResult dres = gk_double(L.T);
        REQUIRE(dres.certified);
        CHECK(dres.a == dbl);
      }
      // block decomposition scales
      Jordan J = jordan_split(L.T);
      std::vector<int> scales;
      for (const auto& part : J.parts) scales.push_back(part.scale);
      CHECK(scales == binary_jordan_scales(R, d, f));
      // every normalized block sublattice has the same invariant and datum
      auto want_gk = binary_block_gk(R, d, f);
      EGK want_egk = binary_egk_trunc(R, xi, d, f);
      for (int i : scales) {
        Mat Ai = sublattice_around(J, i);
        GKResult bres = gk(Ai);
        REQUIRE(bres.certified);
        CHECK(bres.a == iv({want_gk.first, want_gk.second}));
        CHECK(egk_trunc(Ai) == want_egk);
      }
    }
  }
}

} // namespace

TEST_CASE("rank-2 battery over the 2-adic integers") {
  Ring R(2, 1, 1);
  binary_battery(R, {{1, 0}, {-1, 0}, {0, 2}, {0, 3}}, 3, true);
}

TEST_CASE("rank-2 battery over a ramified quadratic extension") {
  Ring R(2, 1, 2, {0, 1}); // uniformizer squared equals -2
  binary_battery(R, {{1, 0}, {-1, 0}, {0, 2}, {0, 4}, {0, 5}}, 5, false);
}

TEST_CASE("rank-2 battery over the unramified quadratic extension") {
  Ring R(2, 2, 1);
  binary_battery(R, {{1, 0}, {-1, 0}, {0, 2}, {0, 3}}, 2, false);
}

TEST_CASE("doubled rank-2 search agrees with the witness off the easy ring") {
  Ring R(2, 1, 2, {0, 1});
  BinaryLattice L = make_binary(R, 1, 0, 1);
  SearchOpts opts;
  opts.budget = 2000000;
  GKResult dres = gk_double(L.T, opts);
  REQUIRE(dres.certified);
  CHECK(dres.a == binary_double_values(R, 0, 1));
}

TEST_CASE("binary classifier round trip") {
  Ring R(2, 1, 1);
  // scaled and scrambled forms classify correctly
  BinaryLattice L = make_binary(R, -1, 0, 2);
  Mat S = scramble(mat_scale_pi(L.T, 3), 1);
  BinaryClass c = classify_binary(S);
  CHECK(c.a1 == 3);
  CHECK(c.xi == -1);
  CHECK(c.d == 0);
  CHECK(c.f == 2);
  CHECK_THROWS_AS(classify_binary(mk(R, {{2, 2}, {2, 2}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_binary(R, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_binary(R, 0, 0, 0), std::invalid_argument);
}
