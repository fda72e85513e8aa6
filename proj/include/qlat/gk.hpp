#pragma once
// GK invariants of integral quadratic lattices over dyadic local rings,
// together with the extended datum (sign chain), certified reduced
// presentations, doubled lattices L (+) -L, and the rank-2 closed forms.
//
// A lattice is presented by its doubled Gram matrix T = 2B.  A "GK type" is
// a nondecreasing integer vector `a` together with an a-admissible involution
// `sigma`; a matrix that is reduced of some GK type has GK invariant equal to
// `a`, which is the certificate this module produces whenever it can.
#include "qlat/lattice.hpp"
#include "qlat/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qlat {

// ---------------------------------------------------------------------------
// Runs of a nondecreasing integer vector: values m_1 < ... < m_r with
// multiplicities n_1, ..., n_r; end[s] = n_1 + ... + n_{s+1 (0-based)}.
struct Runs {
  std::vector<int> value;
  std::vector<int> count;
  std::vector<int> end; // cumulative counts (1-based positions of run ends)
};
Runs runs_of(const std::vector<int>& a);

// All involutions of {0,...,n-1} (as permutation vectors); cached, n <= 10.
const std::vector<std::vector<int>>& all_involutions(int n);

// Admissibility of an involution for a nondecreasing vector `a`:
//  (i)   at most two fixed points, of distinct parities, each maximal among
//        same-parity values that are fixed or decrease under the involution;
//  (ii)  within a run, at most one index whose value decreases, and at most
//        one that is fixed or increases;
//  (iii) non-fixed pairs match each increasing index with the nearest larger
//        same-parity decreasing value, and vice versa.
bool is_admissible(const std::vector<int>& a, const std::vector<int>& sigma);

// Greedy lexicographically maximal vector compatible with the given basis
// order: a nondecreasing `a` with ord(b_ii) >= a_i and
// 2 ord(2 b_ij) >= a_i + a_j, maximized entry by entry.
std::vector<int> max_s_vector(const Mat& T);

// Reduced-form test for GK type (a, sigma): membership of `a`, the exact
// pair/diagonal order equalities, and strict cross inequalities.  Assumes
// sigma is a-admissible (checked by the caller).
bool is_reduced(const Mat& T, const std::vector<int>& a,
                const std::vector<int>& sigma);

// Search all admissible involutions for one that certifies T reduced with
// vector `a`.  Returns the involution if found.
std::optional<std::vector<int>> find_certificate(const Mat& T,
                                                 const std::vector<int>& a);

// ---------------------------------------------------------------------------
struct SearchOpts {
  uint64_t budget = 400000; // score evaluations across all restarts
  uint64_t seed = 1;        // deterministic restart randomization
  int depth = 0;            // transvection coefficient depth; 0 = automatic
  int restarts = 64;
};

struct GKResult {
  std::vector<int> a;      // the invariant
  Mat U;                   // basis with congruence(T_input, U) == R
  Mat R;                   // reduced doubled Gram presentation
  std::vector<int> sigma;  // certifying involution for (a, R)
  bool certified = false;  // R verified reduced of GK type (a, sigma)
  bool has_witness = false;
  std::string method;
};

// Rank-2 closed form (first entry is the norm order; the sum is fixed by the
// discriminant data).
std::pair<int, int> gk_binary_values(const Mat& T);

// Odd residual characteristic: multiset of Jordan scales, sorted.
std::vector<int> gk_odd_values(const Mat& T);

// Full invariant with certificate search (dyadic); closed forms for n <= 2.
GKResult gk(const Mat& T, const SearchOpts& opts = {});

// ---------------------------------------------------------------------------
// Doubled lattice L (+) -L.
Mat double_gram(const Mat& T);

// Certified reduced presentation of the double.  Constructive for p=2, e=1
// (Jordan-based assembly, no search); general search fallback otherwise.
GKResult gk_double(const Mat& T, const SearchOpts& opts = {});

// Closed-form value of GK(L (+) -L) from the Jordan profile (p=2, e=1): a
// scale-i part contributes 2n copies of i+1 when its norm is twice its
// scale, else 2n-2 copies of i+1 plus the pair {i, i+2}.
std::vector<int> double_gk_from_profile(const Jordan& J);

// Inverse direction: recover the Jordan profile of L from a certified GK
// type of the double.
struct RecoveredPart {
  int scale = 0;
  int rank = 0;
  bool typeI = false;
  bool odd_rank = false; // for typeI: rank parity
};
std::vector<RecoveredPart> profile_from_double(const std::vector<int>& a,
                                               const std::vector<int>& sigma);

// ---------------------------------------------------------------------------
// Extended datum: per run s of the invariant, a sign zeta_s in {-1,0,+1}
// computed from the leading principal block of a certified reduced form (a
// discriminant class at even cut, a Hasse-type product at odd cut).
struct EGK {
  std::vector<int> n, m, zeta;
  bool operator==(const EGK& o) const {
    return n == o.n && m == o.m && zeta == o.zeta;
  }
  bool operator!=(const EGK& o) const { return !(*this == o); }
};
std::string egk_str(const EGK& e);

// Discriminant sign of a full block: +1 square, -1 unramified, 0 ramified.
int xi_of(const Mat& T);
// Hasse-type sign of a full block (value in {+1,-1}):
// <-1,-1>^[(n+1)/4] <-1,det>^[(n-1)/2] prod_{i<j} <d_i,d_j> over any
// fraction-field diagonalization diag(d_1..d_n) of B = T/2.
int eta_of(const Mat& T);

EGK egk_from_reduced(const Mat& R, const std::vector<int>& a);
EGK egk(const Mat& T, const SearchOpts& opts = {});

// Truncated datum of a normalized block lattice (minimal scale 0): the
// extended datum of the leading block of a reduced form cut after the values
// <= 1.  Computed from a certified reduced form; for p=2, e=1 it is
// cross-checked against the Jordan/residual closed form.
EGK egk_trunc(const Mat& T, const SearchOpts& opts = {});
// The p=2, e=1 closed form alone (parity type of the scale-0 part plus the
// nondegenerate residual quadratic space).
EGK egk_trunc_closed_e1(const Mat& T);

// ---------------------------------------------------------------------------
// Rank-2 lattices classified by their discriminant algebra (xi, d) and
// conductor exponent f; canonical presentations and closed forms.
struct BinaryClass {
  int a1 = 0; // common order pulled out to make the form primitive
  int xi = 0;
  int d = 0;
  int f = 0;
};
BinaryClass classify_binary(const Mat& T);

struct BinaryLattice {
  Mat T;
  int xi = 0, d = 0, f = 0;
};
// xi = +1 (split), -1 (unramified, d must be 0), 0 (ramified, d = 2g or
// 2e+1).  Builds the canonical norm-form presentation.
BinaryLattice make_binary(const Ring& R, int xi, int d, int f);

// Closed-form GK(L (+) -L) for the canonical rank-2 lattice.
std::vector<int> binary_double_values(const Ring& R, int d, int f);
// Constructive certified reduced presentation of the double (canonical
// presentations only; any ramification).
GKResult binary_double_reduced(const BinaryLattice& L);
// Jordan scale set.
std::vector<int> binary_jordan_scales(const Ring& R, int d, int f);
// Invariant of every normalized block lattice of L (independent of the
// scale chosen).
std::pair<int, int> binary_block_gk(const Ring& R, int d, int f);
// Truncated datum of every normalized block lattice of L.
EGK binary_egk_trunc(const Ring& R, int xi, int d, int f);

} // namespace qlat
