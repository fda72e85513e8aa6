#include "qlat/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace qlat {

// ===========================================================================
// Mat basics
// ===========================================================================
Mat::Mat(const Ring* ring, int r, int c) : R(ring), rows(r), cols(c) {
  a.assign(size_t(r) * c, ring->zero());
}

Mat Mat::identity(const Ring* ring, int n) {
  Mat m(ring, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = ring->one();
  return m;
}

Mat Mat::from_ints(const Ring* ring,
                   const std::vector<std::vector<long long>>& v) {
  int r = (int)v.size();
  int c = r ? (int)v[0].size() : 0;
  Mat m(ring, r, c);
  for (int i = 0; i < r; ++i) {
    if ((int)v[i].size() != c) throw std::runtime_error("ragged matrix");
    for (int j = 0; j < c; ++j) m.at(i, j) = ring->from_int(v[i][j]);
  }
  return m;
}

Mat mat_mul(const Mat& A, const Mat& B) {
  if (A.R != B.R || A.cols != B.rows) throw std::runtime_error("mat_mul shape");
  const Ring& R = *A.R;
  Mat C(A.R, A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const RElem& aik = A.at(i, k);
      if (R.is_zero(aik)) continue;
      for (int j = 0; j < B.cols; ++j)
        C.at(i, j) = R.add(C.at(i, j), R.mul(aik, B.at(k, j)));
    }
  return C;
}

Mat mat_tr(const Mat& A) {
  Mat C(A.R, A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  return C;
}

Mat mat_add(const Mat& A, const Mat& B) {
  if (A.R != B.R || A.rows != B.rows || A.cols != B.cols)
    throw std::runtime_error("mat_add shape");
  Mat C(A.R, A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.R->add(A.a[i], B.a[i]);
  return C;
}

Mat mat_neg(const Mat& A) {
  Mat C(A.R, A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.R->neg(A.a[i]);
  return C;
}

Mat congruence(const Mat& T, const Mat& U) {
  return mat_mul(mat_tr(U), mat_mul(T, U));
}

Mat mat_scale_pi(const Mat& A, int k) {
  Mat C(A.R, A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i)
    C.a[i] = k >= 0 ? A.R->mul_pi_pow(A.a[i], k) : A.R->div_pi_pow(A.a[i], -k);
  return C;
}

Mat block_diag(const std::vector<Mat>& blocks) {
  if (blocks.empty()) throw std::runtime_error("block_diag of nothing");
  const Ring* R = blocks[0].R;
  int n = 0;
  for (const Mat& b : blocks) {
    if (b.R != R || !b.square()) throw std::runtime_error("block_diag parts");
    n += b.rows;
  }
  Mat C(R, n, n);
  int off = 0;
  for (const Mat& b : blocks) {
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < b.cols; ++j) C.at(off + i, off + j) = b.at(i, j);
    off += b.rows;
  }
  return C;
}

Mat submat(const Mat& A, int r0, int c0, int r, int c) {
  Mat C(A.R, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) C.at(i, j) = A.at(r0 + i, c0 + j);
  return C;
}

bool mat_eq(const Mat& A, const Mat& B) {
  if (A.R != B.R || A.rows != B.rows || A.cols != B.cols) return false;
  for (size_t i = 0; i < A.a.size(); ++i)
    if (!A.R->eq(A.a[i], B.a[i])) return false;
  return true;
}

bool mat_eq_mod(const Mat& A, const Mat& B, int k) {
  if (A.R != B.R || A.rows != B.rows || A.cols != B.cols) return false;
  for (size_t i = 0; i < A.a.size(); ++i)
    if (!A.R->eq_mod(A.a[i], B.a[i], k)) return false;
  return true;
}

// Fraction-free determinant with full pivoting (minimal-order pivots keep all
// intermediate divisions exact at stored precision).
RElem mat_det(const Mat& Ain) {
  if (!Ain.square()) throw std::runtime_error("det of non-square");
  const Ring& R = *Ain.R;
  int n = Ain.rows;
  if (n == 0) return R.one();
  Mat M = Ain;
  RElem prev = R.one();
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    int bi = -1, bj = -1, bo = ORD_INF;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        int o = R.ord(M.at(i, j));
        if (o < bo) { bo = o; bi = i; bj = j; }
      }
    if (bo >= ORD_INF) return R.zero(); // singular at working precision
    if (bi != k) {
      for (int j = 0; j < n; ++j) std::swap(M.at(bi, j), M.at(k, j));
      sign = -sign;
    }
    if (bj != k) {
      for (int i = 0; i < n; ++i) std::swap(M.at(i, bj), M.at(i, k));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        RElem num = R.sub(R.mul(M.at(i, j), M.at(k, k)),
                          R.mul(M.at(i, k), M.at(k, j)));
        M.at(i, j) = R.div_exact(num, prev);
      }
    prev = M.at(k, k);
  }
  RElem d = M.at(n - 1, n - 1);
  return sign < 0 ? R.neg(d) : d;
}

// ===========================================================================
// doubled-Gram conventions
// ===========================================================================
void check_doubled_gram(const Mat& T) {
  if (!T.square()) throw std::runtime_error("form matrix must be square");
  const Ring& R = *T.R;
  int ord2 = R.p == 2 ? R.e : 0;
  for (int i = 0; i < T.rows; ++i) {
    if (R.ord(T.at(i, i)) < ord2)
      throw std::runtime_error("diagonal of doubled Gram must lie in 2o");
    for (int j = i + 1; j < T.cols; ++j)
      if (!R.eq(T.at(i, j), T.at(j, i)))
        throw std::runtime_error("form matrix must be symmetric");
  }
}

int min_ord(const Mat& T) {
  int best = ORD_INF;
  for (const RElem& x : T.a) best = std::min(best, T.R->ord(x));
  return best;
}

RElem disc(const Mat& T) {
  const Ring& R = *T.R;
  int n = T.rows;
  RElem d = mat_det(T);
  if (n % 2 == 0) {
    if ((n / 2) % 2) d = R.neg(d);
    return d;
  }
  d = R.div_exact(d, R.from_int(2));
  if (((n - 1) / 2) % 2) d = R.neg(d);
  return d;
}

int delta_invariant(const Mat& T) {
  const Ring& R = *T.R;
  RElem D = disc(T);
  int v = R.ord(D);
  if (v >= ORD_INF) throw std::runtime_error("degenerate form");
  if (T.rows % 2) return v;
  auto [xi, d] = R.ext_type(D);
  (void)xi;
  return d == 0 ? v : v - d + 1;
}

// ===========================================================================
// Jordan splitting
// ===========================================================================
namespace {

struct Piece {
  int start, size, sigma;
};

// column operation v_k -= c * v_s applied to the symmetric T and to U
void colop(Mat& T, Mat& U, int s, int k, const RElem& c) {
  const Ring& R = *T.R;
  int n = T.rows;
  for (int r = 0; r < n; ++r) T.at(r, k) = R.sub(T.at(r, k), R.mul(c, T.at(r, s)));
  for (int cc = 0; cc < n; ++cc)
    T.at(k, cc) = R.sub(T.at(k, cc), R.mul(c, T.at(s, cc)));
  for (int r = 0; r < n; ++r) U.at(r, k) = R.sub(U.at(r, k), R.mul(c, U.at(r, s)));
}

void swap_basis(Mat& T, Mat& U, int i, int j) {
  if (i == j) return;
  int n = T.rows;
  for (int r = 0; r < n; ++r) std::swap(T.at(r, i), T.at(r, j));
  for (int c = 0; c < n; ++c) std::swap(T.at(i, c), T.at(j, c));
  for (int r = 0; r < n; ++r) std::swap(U.at(r, i), U.at(r, j));
}

} // namespace

Jordan jordan_split(const Mat& Tin) {
  check_doubled_gram(Tin);
  const Ring& R = *Tin.R;
  int n = Tin.rows;
  Mat T = Tin;
  Mat U = Mat::identity(Tin.R, n);
  std::vector<Piece> pieces;
  int pos = 0, prev_sigma = -ORD_INF;
  while (pos < n) {
    // locate the minimal-order entry of the trailing block
    int sigma = ORD_INF, di = -1, oi = -1, oj = -1;
    for (int i = pos; i < n; ++i)
      for (int j = pos; j < n; ++j) {
        int o = R.ord(T.at(i, j));
        if (o < sigma) { sigma = o; oi = i; oj = j; }
      }
    if (sigma >= ORD_INF) throw std::runtime_error("degenerate form");
    if (sigma < prev_sigma)
      throw std::runtime_error("scale decreased during splitting (internal)");
    prev_sigma = sigma;
    for (int i = pos; i < n; ++i)
      if (R.ord(T.at(i, i)) == sigma) { di = i; break; }

    if (di >= 0) {
      // 1x1 piece on a minimal-order diagonal entry
      swap_basis(T, U, pos, di);
      RElem piv = T.at(pos, pos);
      for (int k = pos + 1; k < n; ++k) {
        if (R.ord(T.at(pos, k)) >= ORD_INF) continue;
        RElem c = R.div_exact(T.at(pos, k), piv);
        colop(T, U, pos, k, c);
      }
      for (int k = pos + 1; k < n; ++k) {
        T.at(pos, k) = R.zero();
        T.at(k, pos) = R.zero();
      }
      pieces.push_back({pos, 1, sigma});
      pos += 1;
    } else {
      // 2x2 piece on a minimal-order off-diagonal pair
      if (oi > oj) std::swap(oi, oj);
      swap_basis(T, U, pos, oi);
      if (oj == pos) oj = oi; // tracked the swap
      swap_basis(T, U, pos + 1, oj);
      const RElem &tpp = T.at(pos, pos), &tpq = T.at(pos, pos + 1),
                  &tqp = T.at(pos + 1, pos), &tqq = T.at(pos + 1, pos + 1);
      RElem det = R.sub(R.mul(tpp, tqq), R.mul(tpq, tqp));
      if (R.ord(det) != 2 * sigma)
        throw std::runtime_error("pivot block not unimodular at scale (internal)");
      for (int k = pos + 2; k < n; ++k) {
        RElem r1 = T.at(pos, k), r2 = T.at(pos + 1, k);
        if (R.ord(r1) >= ORD_INF && R.ord(r2) >= ORD_INF) continue;
        RElem num1 = R.sub(R.mul(tqq, r1), R.mul(tpq, r2));
        RElem num2 = R.sub(R.mul(tpp, r2), R.mul(tqp, r1));
        RElem c1 = R.div_exact(num1, det);
        RElem c2 = R.div_exact(num2, det);
        colop(T, U, pos, k, c1);
        colop(T, U, pos + 1, k, c2);
      }
      for (int k = pos + 2; k < n; ++k) {
        T.at(pos, k) = R.zero();
        T.at(k, pos) = R.zero();
        T.at(pos + 1, k) = R.zero();
        T.at(k, pos + 1) = R.zero();
      }
      pieces.push_back({pos, 2, sigma});
      pos += 2;
    }
  }

  // merge contiguous pieces of equal scale into parts
  Jordan J;
  J.U = U;
  size_t i = 0;
  while (i < pieces.size()) {
    size_t j = i;
    int size = 0;
    while (j < pieces.size() && pieces[j].sigma == pieces[i].sigma) {
      size += pieces[j].size;
      ++j;
    }
    JordanPart part;
    int ord2 = R.p == 2 ? R.e : 0;
    part.tmin = pieces[i].sigma;
    part.scale = pieces[i].sigma - ord2;
    part.rank = size;
    part.block = submat(T, pieces[i].start, pieces[i].start, size, size);
    if (min_ord(part.block) != part.tmin)
      throw std::runtime_error("part scale mismatch (internal)");
    part.typeI = false;
    if (R.p != 2) {
      part.typeI = true; // with 2 a unit the norm always equals the scale
    } else {
      for (int d = 0; d < size; ++d)
        if (R.ord(part.block.at(d, d)) == part.tmin) part.typeI = true;
    }
    part.unim = mat_scale_pi(part.block, ord2 - part.tmin);
    J.parts.push_back(std::move(part));
    i = j;
  }

  // sanity: reassembly must agree with the congruence at a safe margin
  int sigma_max = J.parts.back().tmin;
  int margin = R.P - 2 * std::max(0, sigma_max) - 4 * R.e - 8;
  if (margin < R.P / 3)
    throw std::runtime_error("precision margin too small for this form");
  std::vector<Mat> blocks;
  for (auto& part : J.parts) blocks.push_back(part.block);
  if (!mat_eq_mod(congruence(Tin, U), block_diag(blocks), margin))
    throw std::runtime_error("splitting reassembly failed (internal)");
  return J;
}

Mat sublattice_around(const Jordan& J, int i) {
  std::vector<Mat> blocks;
  bool found = false;
  for (const JordanPart& part : J.parts) {
    if (part.scale == i) found = true;
    blocks.push_back(mat_scale_pi(part.unim, std::abs(i - part.scale)));
  }
  if (!found)
    throw std::runtime_error("no part at the requested scale");
  return block_diag(blocks);
}

// ===========================================================================
// GF(q) linear algebra
// ===========================================================================
int gf_rank(const GF& k, std::vector<std::vector<int>> A) {
  int rows = (int)A.size();
  if (!rows) return 0;
  int cols = (int)A[0].size();
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (A[i][c]) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(A[piv], A[r]);
    int inv = k.inv(A[r][c]);
    for (int j = 0; j < cols; ++j) A[r][j] = k.mul(A[r][j], inv);
    for (int i = 0; i < rows; ++i)
      if (i != r && A[i][c]) {
        int fct = A[i][c];
        for (int j = 0; j < cols; ++j)
          A[i][j] = k.sub(A[i][j], k.mul(fct, A[r][j]));
      }
    ++r;
  }
  return r;
}

std::vector<std::vector<int>> gf_kernel(const GF& k,
                                        const std::vector<std::vector<int>>& Ain) {
  std::vector<std::vector<int>> A = Ain;
  int rows = (int)A.size();
  int cols = rows ? (int)A[0].size() : 0;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (A[i][c]) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(A[piv], A[r]);
    int inv = k.inv(A[r][c]);
    for (int j = 0; j < cols; ++j) A[r][j] = k.mul(A[r][j], inv);
    for (int i = 0; i < rows; ++i)
      if (i != r && A[i][c]) {
        int fct = A[i][c];
        for (int j = 0; j < cols; ++j)
          A[i][j] = k.sub(A[i][j], k.mul(fct, A[r][j]));
      }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<int>> basis;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<int> v(cols, 0);
    v[c] = 1;
    for (int i = 0; i < (int)pivot_col.size(); ++i)
      v[pivot_col[i]] = k.neg(A[i][c]);
    basis.push_back(v);
  }
  return basis;
}

// ===========================================================================
// residual quadratic space
// ===========================================================================
Residual residual_space(const Mat& T) {
  const Ring& R = *T.R;
  if (R.e != 1 || R.p != 2)
    throw std::runtime_error("residual space requires the unramified dyadic case");
  check_doubled_gram(T);
  int n = T.rows;
  if (min_ord(T) != R.e)
    throw std::runtime_error("residual space requires scale o");
  const GF& k = R.gf;

  // even residue subspace: kernel of x -> sum sqrt(b_ii) x_i
  std::vector<int> ell(n);
  bool nontrivial = false;
  for (int i = 0; i < n; ++i) {
    int beta = R.digit_of(R.div_pi(T.at(i, i)));
    ell[i] = k.sqrt(beta);
    if (ell[i]) nontrivial = true;
  }
  std::vector<std::vector<int>> basis;
  if (nontrivial) {
    basis = gf_kernel(k, {ell});
  } else {
    for (int i = 0; i < n; ++i) {
      std::vector<int> v(n, 0);
      v[i] = 1;
      basis.push_back(v);
    }
  }
  int s = (int)basis.size();

  // lift basis vectors and compute pairings w_a^T T w_b
  std::vector<Mat> lifts;
  for (const auto& w : basis) {
    Mat v(T.R, n, 1);
    for (int i = 0; i < n; ++i) v.at(i, 0) = R.lift_digit(w[i]);
    lifts.push_back(v);
  }
  auto pairing = [&](int a, int b) {
    RElem acc = R.zero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        acc = R.add(acc, R.mul(lifts[a].at(i, 0),
                               R.mul(T.at(i, j), lifts[b].at(j, 0))));
    return acc;
  };

  std::vector<std::vector<int>> polar(s, std::vector<int>(s, 0));
  std::vector<int> qval(s, 0);
  for (int a = 0; a < s; ++a) {
    RElem taa = pairing(a, a);
    if (R.ord(taa) < 2 && R.ord(taa) < ORD_INF)
      throw std::runtime_error("residual form not even on its kernel (internal)");
    qval[a] = R.ord(taa) >= ORD_INF
                  ? 0
                  : R.digit_of(R.div_pi(R.div_pi(taa)));
    for (int b = a + 1; b < s; ++b) {
      RElem tab = pairing(a, b);
      int pv = R.ord(tab) >= ORD_INF ? 0 : R.digit_of(R.div_pi(tab));
      polar[a][b] = polar[b][a] = pv;
    }
  }

  auto qform = [&](const std::vector<int>& lam) {
    int acc = 0;
    for (int a = 0; a < s; ++a) {
      if (!lam[a]) continue;
      acc = k.add(acc, k.mul(k.mul(lam[a], lam[a]), qval[a]));
      for (int b = a + 1; b < s; ++b)
        acc = k.add(acc, k.mul(k.mul(lam[a], lam[b]), polar[a][b]));
    }
    return acc;
  };

  // radical of the polar form, and the induced semilinear form on it
  int rank = gf_rank(k, polar);
  bool q_on_radical = false;
  for (const auto& u : gf_kernel(k, polar))
    if (qform(u) != 0) q_on_radical = true;

  Residual res;
  res.dimB = s;
  res.m = rank + (q_on_radical ? 1 : 0);

  // zero count of the induced form on the whole subspace
  long long total = 1;
  for (int i = 0; i < s; ++i) total *= k.q;
  long long zeros = 0;
  std::vector<int> lam(s, 0);
  for (long long idx = 0; idx < total; ++idx) {
    long long t = idx;
    for (int i = 0; i < s; ++i) { lam[i] = int(t % k.q); t /= k.q; }
    if (qform(lam) == 0) ++zeros;
  }
  res.zeros = zeros;

  if (res.m == 0) {
    res.split = true;
  } else if (res.m % 2 == 0) {
    long long expect = 1;
    for (int i = 0; i < s - res.m; ++i) expect *= k.q;
    long long qm1 = 1, qh = 1, qh1 = 1;
    for (int i = 0; i < res.m - 1; ++i) qm1 *= k.q;
    for (int i = 0; i < res.m / 2; ++i) qh *= k.q;
    for (int i = 0; i < res.m / 2 - 1; ++i) qh1 *= k.q;
    res.split = (zeros == expect * (qm1 + qh - qh1));
  } else {
    res.split = false;
  }
  return res;
}

} // namespace qlat
