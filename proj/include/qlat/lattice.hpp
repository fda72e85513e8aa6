#pragma once
// Integral quadratic lattices presented by their doubled Gram matrix T = 2B,
// where B is the (half-integral) bilinear form: T is symmetric with diagonal
// in 2o.  All procedures are exact at working precision.
#include "qlat/ring.hpp"

#include <vector>

namespace qlat {

struct Mat {
  const Ring* R = nullptr;
  int rows = 0, cols = 0;
  std::vector<RElem> a;

  Mat() = default;
  Mat(const Ring* ring, int r, int c);
  RElem& at(int i, int j) { return a[size_t(i) * cols + j]; }
  const RElem& at(int i, int j) const { return a[size_t(i) * cols + j]; }
  bool square() const { return rows == cols; }

  static Mat identity(const Ring* ring, int n);
  static Mat from_ints(const Ring* ring,
                       const std::vector<std::vector<long long>>& v);
};

Mat mat_mul(const Mat& A, const Mat& B);
Mat mat_tr(const Mat& A);
Mat mat_add(const Mat& A, const Mat& B);
Mat mat_neg(const Mat& A);
Mat congruence(const Mat& T, const Mat& U); // U^T T U
Mat mat_scale_pi(const Mat& A, int k);      // entrywise * pi^k; k < 0 divides
Mat block_diag(const std::vector<Mat>& blocks);
Mat submat(const Mat& A, int r0, int c0, int r, int c);
bool mat_eq(const Mat& A, const Mat& B);
bool mat_eq_mod(const Mat& A, const Mat& B, int k);
RElem mat_det(const Mat& A); // fraction-free, full pivoting; exact

// --- doubled-Gram conventions -------------------------------------------
void check_doubled_gram(const Mat& T); // symmetric, diagonal divisible by 2
int min_ord(const Mat& T);             // ORD_INF for the zero matrix

// Normalized discriminant of the form B = T/2 (the sign-adjusted determinant
// whose square class classifies the form's discriminant extension).
RElem disc(const Mat& T);
// Order-type invariant of the discriminant: for odd rank ord(disc); for even
// rank ord(disc) adjusted by the discriminant extension.
int delta_invariant(const Mat& T);

// --- Jordan splitting -----------------------------------------------------
struct JordanPart {
  int tmin = 0;       // minimal entry order of this part's doubled Gram
  int scale = 0;      // tmin - e  (order of the part's scale ideal)
  int rank = 0;
  bool typeI = false; // true iff the norm equals the scale (odd diagonal)
  Mat block;          // the part at its original scale
  Mat unim;           // rescaled so its minimal entry order is e
};
struct Jordan {
  std::vector<JordanPart> parts; // strictly increasing scale
  Mat U;                         // U^T T U = blockdiag(parts) (mod precision)
};
Jordan jordan_split(const Mat& T);

// Orthogonal sum of the Jordan parts reweighted toward scale i: part at scale
// j enters scaled by pi^{|i-j|}.  Requires a part of scale i to exist.
Mat sublattice_around(const Jordan& J, int i);

// --- residual quadratic space (unramified base, e == 1, p == 2) -----------
// For a lattice with scale o and norm 2o on its even part: the quotient of
// the even-residue subspace by the radical of the induced quadratic form.
struct Residual {
  int dimB = 0;   // dimension of the even residue subspace
  int m = 0;      // dimension of the nondegenerate quotient
  bool split = false; // for even m: hyperbolic or not
  long long zeros = 0; // zero count of the induced form on the subspace
};
Residual residual_space(const Mat& T);

// --- GF(q) dense linear algebra (row-major index matrices) ----------------
int gf_rank(const GF& k, std::vector<std::vector<int>> A);
std::vector<std::vector<int>> gf_kernel(const GF& k,
                                        const std::vector<std::vector<int>>& A);

} // namespace qlat
