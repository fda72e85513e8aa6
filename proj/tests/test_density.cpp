#include "doctest.h"

#include "qlat/density.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace qlat;

namespace {

Mat mk(const Ring& R, const std::vector<std::vector<long long>>& rows) {
  return Mat::from_ints(&R, rows);
}

struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  long long ri(long long m) { return (long long)(next() % (uint64_t)m); }
};

// Random doubled Gram matrix with entries of bounded size (degenerate ones
// allowed: the counters must agree on them too).
Mat rand_doubled(const Ring& R, Rng& g, int n, long long span) {
  std::vector<std::vector<long long>> rows(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) {
    rows[i][i] = 2 * (g.ri(2 * span + 1) - span);
    for (int j = i + 1; j < n; ++j) rows[i][j] = rows[j][i] = g.ri(2 * span + 1) - span;
  }
  return mk(R, rows);
}

// Deterministic unimodular congruence transform, as in the search tests.
Mat scramble(const Mat& T, int pattern) {
  const Ring& R = *T.R;
  const int n = T.rows;
  Mat U = Mat::identity(&R, n);
  for (int k = 0; k < 3; ++k) {
    int i = (pattern + k) % n, j = (pattern + 2 * k + 1) % n;
    if (i == j) continue;
    Mat E = Mat::identity(&R, n);
    int gdig = 1 + (pattern + k) % (R.q - 1 ? R.q - 1 : 1);
    E.at(i, j) = R.mul_pi_pow(R.lift_digit(gdig), k % 2);
    U = mat_mul(U, E);
  }
  Mat P(&R, n, n);
  for (int j = 0; j < n; ++j) P.at((j + pattern) % n, j) = R.one();
  U = mat_mul(U, P);
  return congruence(T, U);
}

} // namespace

TEST_CASE("reference counter on pinned values") {
  Ring R(2, 1, 1);
  Mat one = mk(R, {{2}});
  CHECK(count_naive(one, one, 4) == 4); // x^2 = 1 mod 16 has 4 roots
  CHECK(count_lifted(one, one, 4) == 4);
  Mat two = mk(R, {{2, 0}, {0, 2}});
  CHECK(count_naive(one, two, 3) == 16); // x^2 + y^2 = 1 mod 8
  CHECK(count_lifted(one, two, 3) == 16);

  DensityReport rep = alpha_beta(one);
  CHECK(rep.alpha == Rat(4));
  CHECK(rep.beta == Rat(2));
  CHECK(rep.beta_C == Rat(2));
  CHECK(rep.stabilized);
  CHECK(rep.method == "counted-lifted");
}

TEST_CASE("lifted counter equals the reference counter") {
  Ring R2(2, 1, 1);
  Ring R3(3, 1, 1);
  int checked = 0;
  Rng g(20260817);
  auto battery = [&](const Ring& R, int n, int m, int N, long long span, int reps) {
    for (int r = 0; r < reps; ++r) {
      Mat TB = rand_doubled(R, g, n, span);
      Mat TA = rand_doubled(R, g, m, span);
      CAPTURE(n);
      CAPTURE(m);
      CAPTURE(N);
      CAPTURE(r);
      CHECK(count_lifted(TB, TA, N) == count_naive(TB, TA, N));
      ++checked;
    }
  };
  battery(R2, 1, 1, 4, 8, 16);
  battery(R2, 1, 2, 3, 8, 16);
  battery(R2, 2, 2, 2, 8, 16);
  battery(R2, 2, 2, 3, 4, 16);
  battery(R2, 1, 3, 2, 4, 10);
  battery(R3, 1, 1, 3, 9, 10);
  battery(R3, 2, 2, 2, 9, 10);
  battery(R3, 1, 2, 2, 9, 10);
  CHECK(checked >= 100);
}

TEST_CASE("density is stable and basis independent") {
  Ring R(2, 1, 1);
  Mat halfH = mk(R, {{0, 1}, {1, 0}});
  // alpha = 2^{-5} * count at N = 5 equals 1 exactly.
  CHECK(count_lifted(halfH, halfH, 5) == 32);
  DensityReport hh = alpha_beta(halfH);
  CHECK(hh.alpha == Rat(1));
  CHECK(hh.beta == Rat(1, 2));
  CHECK(hh.stabilized);

  Mat d11 = mk(R, {{2, 0}, {0, 2}});
  DensityReport a6 = alpha_beta(d11, 6);
  DensityReport a7 = alpha_beta(d11, 7);
  CHECK(a6.alpha == a7.alpha);
  CHECK(a6.stabilized);

  // Unimodular change of basis on either argument preserves the count.
  Mat d13 = mk(R, {{2, 0}, {0, 6}});
  i128 base = count_lifted(d13, d11, 5);
  for (int pat = 1; pat <= 3; ++pat) {
    CHECK(count_lifted(scramble(d13, pat), d11, 5) == base);
    CHECK(count_lifted(d13, scramble(d11, pat), 5) == base);
  }
}

TEST_CASE("orthogonal group orders match enumeration") {
  GF k2(2, 1), k4(2, 2);
  // Pinned small orders.
  CHECK(ortho_group_order(0, 0, 2).order == 1);
  CHECK(ortho_group_order(1, 0, 2).order == 1);
  CHECK(ortho_group_order(2, 1, 2).order == 2);
  CHECK(ortho_group_order(2, -1, 2).order == 6);
  CHECK(ortho_group_order(3, 0, 2).order == 6);
  CHECK(ortho_group_order(4, 1, 2).order == 72);
  CHECK(ortho_group_order(4, -1, 2).order == 120);
  for (int dim = 0; dim <= 4; ++dim) {
    if (dim % 2 == 1) {
      CHECK(ortho_group_order(dim, 0, 2).order == ortho_group_order_enum(dim, 0, k2));
      CHECK(ortho_group_order(dim, 0, 4).order == ortho_group_order_enum(dim, 0, k4));
    } else if (dim > 0) {
      for (int eps : {1, -1}) {
        CHECK(ortho_group_order(dim, eps, 2).order == ortho_group_order_enum(dim, eps, k2));
        if (dim <= 3)
          CHECK(ortho_group_order(dim, eps, 4).order == ortho_group_order_enum(dim, eps, k4));
      }
    }
  }
  CHECK_THROWS_AS(ortho_group_order(3, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(ortho_group_order(2, 0, 2), std::invalid_argument);
}

TEST_CASE("closed product formula matches counting over the 2-adic integers") {
  Ring R(2, 1, 1);
  // Anchors evaluated by hand from the formula.
  DensityReport unit = cho_beta(mk(R, {{2}}));
  CHECK(unit.beta == Rat(2));
  CHECK(unit.beta_C == Rat(2));
  DensityReport hh = cho_beta(mk(R, {{0, 1}, {1, 0}}));
  CHECK(hh.beta == Rat(1, 2));

  const std::vector<std::vector<std::vector<long long>>> panel = {
      {{2}},
      {{4}},
      {{2, 0}, {0, 2}},
      {{2, 0}, {0, 6}},
      {{2, 0}, {0, 4}},
      {{2, 0}, {0, 12}},
      {{0, 1}, {1, 0}},
      {{2, 1}, {1, 2}},
      {{0, 2}, {2, 0}},
      {{4, 2}, {2, 4}},
      {{2, 2}, {2, 4}},
      {{0, 1, 0}, {1, 0, 0}, {0, 0, 2}},
      {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}},
      {{2, 0, 0}, {0, 2, 0}, {0, 0, 4}},
      {{2, 0, 0}, {0, 6, 0}, {0, 0, 8}},
  };
  for (size_t i = 0; i < panel.size(); ++i) {
    CAPTURE(i);
    Mat T = mk(R, panel[i]);
    DensityReport closed = cho_beta(T);
    DensityReport counted = alpha_beta(T);
    CHECK(counted.stabilized);
    CHECK(closed.beta == counted.beta);
    CHECK(closed.beta_C == counted.beta_C);
  }
}

TEST_CASE("invariant collections decide densities for the paired examples") {
  Ring R(2, 1, 1);
  Mat d11 = mk(R, {{2, 0}, {0, 2}});
  Mat d13 = mk(R, {{2, 0}, {0, 6}});

  TheoremVerdict same = theorem_check(d11, scramble(d11, 2));
  CHECK(same.hypothesis_met);
  CHECK(same.densities_equal);
  CHECK(same.verdict == "determined");

  // Equal doubles, distinct truncated datums, distinct densities.
  TheoremVerdict pair1 = theorem_check(d11, d13);
  CHECK_FALSE(pair1.hypothesis_met);
  CHECK(pair1.gk_double_L == pair1.gk_double_M);
  CHECK(pair1.trunc_L != pair1.trunc_M);
  CHECK(pair1.beta_L == Rat(8));
  CHECK(pair1.beta_M == Rat(4));
  CHECK(pair1.verdict == "hypothesis-not-met");
  CHECK(pair1.trunc_L ==
        std::vector<std::pair<int, EGK>>{{0, EGK{{1, 1}, {0, 1}, {1, 0}}}});
  CHECK(pair1.trunc_M == std::vector<std::pair<int, EGK>>{{0, EGK{{1}, {0}, {1}}}});

  // Equal truncated datums, different ranks, distinct densities.
  Mat L4 = mk(R, {{0, 2, 0, 0}, {2, 0, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 6}});
  Mat M3 = mk(R, {{0, 2, 0}, {2, 0, 0}, {0, 0, 2}});
  TheoremVerdict pair2 = theorem_check(L4, M3);
  CHECK_FALSE(pair2.hypothesis_met);
  CHECK(pair2.trunc_L == pair2.trunc_M);
  CHECK(pair2.trunc_L ==
        std::vector<std::pair<int, EGK>>{{0, EGK{{1, 2}, {0, 1}, {1, 1}}}});
  CHECK_FALSE(pair2.densities_equal);
  CHECK(pair2.beta_L == Rat(128));
  CHECK(pair2.beta_M == Rat(16));
  CHECK(pair2.beta_L == cho_beta(L4).beta);
  CHECK(pair2.beta_M == cho_beta(M3).beta);
}

TEST_CASE("binary closed density formula") {
  // Pinned values.
  CHECK(binary_beta(BinaryKind::unramified, 1, 2, 0, 0, -1).beta == Rat(3, 2));
  CHECK(binary_beta(BinaryKind::unramified, 1, 2, 0, 0, 1).beta == Rat(1, 2));
  CHECK(binary_beta(BinaryKind::ramified_even, 5, 2, 1, 2, 0).beta == rat_qpow(2, 7));
  CHECK(binary_beta(BinaryKind::ramified_even, 5, 2, 2, 1, 0).beta ==
        Rat(2) * rat_qpow(2, 7));
  CHECK_THROWS_AS(binary_beta(BinaryKind::ramified_even, 1, 2, 2, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(binary_beta(BinaryKind::unramified, 1, 2, 0, 0, 0),
                  std::invalid_argument);

  // Counted agreement over the 2-adic integers at small conductor.
  Ring R(2, 1, 1);
  struct Case { int xi, d, f; BinaryKind kind; int g; };
  const std::vector<Case> cases = {
      {1, 0, 0, BinaryKind::unramified, 0},  {-1, 0, 0, BinaryKind::unramified, 0},
      {1, 0, 1, BinaryKind::unramified, 0},  {-1, 0, 1, BinaryKind::unramified, 0},
      {0, 2, 0, BinaryKind::ramified_even, 1}, {0, 2, 1, BinaryKind::ramified_even, 1},
      {0, 3, 0, BinaryKind::ramified_odd, 0},  {0, 3, 1, BinaryKind::ramified_odd, 0},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.xi);
    CAPTURE(cs.d);
    CAPTURE(cs.f);
    BinaryLattice L = make_binary(R, cs.xi, cs.d, cs.f);
    DensityReport closed = binary_beta(cs.kind, R.e, R.q, cs.g, cs.f, cs.xi);
    DensityReport counted = alpha_beta(L.T);
    CHECK(counted.stabilized);
    CHECK(closed.beta == counted.beta);
  }
}

TEST_CASE("closed-form table for the deep-ramification pair") {
  std::vector<BinaryExampleRow> rows = example_a1_report();
  REQUIRE(rows.size() == 2);
  const std::vector<int> expect_gk = {0, 3, 3, 6};
  const std::vector<int> expect_scales = {-2};
  for (const auto& row : rows) {
    CHECK(row.double_gk == expect_gk);
    CHECK(row.jordan_scales == expect_scales);
    CHECK(row.trunc == EGK{});
  }
  CHECK(rows[0].d == 2);
  CHECK(rows[0].f == 2);
  CHECK(rows[0].beta == rat_qpow(2, 7));
  CHECK(rows[0].beta_q == "q^7");
  CHECK(rows[1].d == 4);
  CHECK(rows[1].f == 1);
  CHECK(rows[1].beta == Rat(2) * rat_qpow(2, 7));
  CHECK(rows[1].beta_q == "2*q^7");
  CHECK(rows[0].beta != rows[1].beta);
}

TEST_CASE("odd residue characteristic: refined invariants decide the density") {
  Ring R(3, 1, 1);
  // Over an odd residue field the density of a diagonal form depends on the
  // valuation vector together with the square classes of the determinants of
  // the unimodular constituents; the valuation vector alone is NOT enough for
  // even-rank constituents (the two quadric types have different point
  // counts).  Group by the refined key and demand a single value per group.
  const std::vector<std::vector<long long>> diags = {
      {1, 1}, {1, 2}, {2, 2}, {2, 1},  // valuations (0, 0)
      {1, 3}, {2, 3}, {1, 6}, {2, 6},  // valuations (0, 1)
      {1, 9}, {2, 18},                 // valuations (0, 2)
      {3, 3}, {3, 6}, {6, 6},          // valuations (1, 1)
  };
  auto sqcls = [&](long long u) {  // square class of a 3-adic unit
    long long r = u % 3;
    if (r < 0) r += 3;
    return int(r == 1 ? +1 : -1);
  };
  std::map<std::vector<int>, std::set<std::string>> groups;
  for (const auto& d : diags) {
    Mat T = mk(R, {{2 * d[0], 0}, {0, 2 * d[1]}});
    GKResult r = gk(T);
    CHECK(r.method == "jordan-odd");
    DensityReport rep = alpha_beta(T);
    CHECK(rep.stabilized);
    long long v0 = d[0], v1 = d[1];
    while (v0 % 3 == 0) v0 /= 3;
    while (v1 % 3 == 0) v1 /= 3;
    std::vector<int> key = r.a;
    if (r.a[0] == r.a[1])  // rank-2 constituent: determinant class matters
      key.push_back(sqcls(v0 * v1));
    groups[key].insert(rep.alpha.str());
  }
  REQUIRE(groups.size() == 6);
  for (const auto& [key, vals] : groups) {
    CAPTURE(key[0]);
    CAPTURE(key[1]);
    CHECK(vals.size() == 1);
  }
  // The valuation vector alone fails: the two unimodular binary classes have
  // densities 8/3 and 4/3, and the same gap persists after rescaling.
  CHECK(alpha_beta(mk(R, {{2, 0}, {0, 2}})).alpha == Rat(8, 3));
  CHECK(alpha_beta(mk(R, {{2, 0}, {0, 4}})).alpha == Rat(4, 3));
  CHECK(alpha_beta(mk(R, {{6, 0}, {0, 6}})).alpha == Rat(72));
  CHECK(alpha_beta(mk(R, {{6, 0}, {0, 12}})).alpha == Rat(36));
  // Odd-rank constituents carry no such refinement: all four mixed-valuation
  // unit choices give one value.
  // Invariance under change of basis as well.
  Mat T = mk(R, {{2, 0}, {0, 6}});
  CHECK(alpha_beta(scramble(T, 1)).alpha == alpha_beta(T).alpha);
}

TEST_CASE("corpus shape and coverage") {
  Ring R(2, 1, 1);
  std::vector<Mat> corpus = corpus_z2(R);
  CHECK(corpus.size() >= 200);
  // Constituent classes: (odd/even/II) x (free/bound).  The residual-parity
  // sub-split of even type-I constituents exists only for free ones: a scaled
  // type-I neighbour always contributes a radical vector with nonzero reduced
  // quadratic value, so the residual dimension of a bound constituent is odd.
  std::set<std::string> seen;
  for (const auto& T : corpus) {
    CHECK(T.rows <= 3);
    RElem D = disc(T);
    REQUIRE_FALSE(R.is_zero(D));
    CHECK(R.ord(D) <= 4);
    Jordan J = jordan_split(T);
    std::map<int, bool> typeI;
    for (const auto& P : J.parts) typeI[P.scale] = P.typeI;
    auto is2 = [&](int s) { return !typeI.count(s) || !typeI[s]; };
    for (const auto& P : J.parts) {
      bool fr = is2(P.scale - 1) && is2(P.scale + 1);
      std::string cls;
      if (!P.typeI) cls = "II";
      else if (P.rank % 2 == 1) cls = "Io";
      else if (!fr) {
        cls = "Ie";
        Residual res = residual_space(sublattice_around(J, P.scale));
        CHECK(res.m % 2 == 1);
      } else {
        Residual res = residual_space(sublattice_around(J, P.scale));
        cls = (res.m % 2 == 1) ? "Ie1" : "Ie2";
      }
      seen.insert(cls + (fr ? "/free" : "/bound"));
    }
  }
  for (const char* want :
       {"Io/free", "Io/bound", "Ie1/free", "Ie2/free", "Ie/bound",
        "II/free", "II/bound"})
    CHECK(seen.count(want));
  // Negative scales are represented.
  bool neg = false;
  for (const auto& T : corpus)
    for (const auto& P : jordan_split(T).parts)
      if (P.scale < 0) neg = true;
  CHECK(neg);
}

TEST_CASE("counter guardrails") {
  Ring R(2, 1, 1);
  Mat one = mk(R, {{2}});
  Mat deg = mk(R, {{2, 0}, {0, 0}});
  CHECK_THROWS_AS(alpha_beta(deg), std::invalid_argument);
  CHECK_THROWS_AS(count_naive(mk(R, {{2, 0}, {0, 2}}), one, 2), std::invalid_argument);
  CountOpts tiny;
  tiny.enum_budget = 4;
  CHECK_THROWS_AS(count_naive(one, one, 4, tiny), std::runtime_error);
  tiny.node_budget = 4;
  CHECK_THROWS_AS(count_lifted(mk(R, {{2, 0}, {0, 2}}), mk(R, {{2, 0}, {0, 2}}), 5, tiny),
                  std::runtime_error);
  Ring R3(3, 1, 1);
  CHECK_THROWS_AS(cho_beta(mk(R3, {{2}})), std::invalid_argument);
  CHECK_THROWS_AS(theorem_check(mk(R3, {{2}}), mk(R3, {{2}})), std::invalid_argument);
}
