#include "qlat/gk.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace qlat {

// ===========================================================================
// combinatorics of types
// ===========================================================================
Runs runs_of(const std::vector<int>& a) {
  Runs r;
  int n = (int)a.size();
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && a[j] == a[i]) ++j;
    r.value.push_back(a[i]);
    r.count.push_back(j - i);
    r.end.push_back(j);
    i = j;
  }
  return r;
}

namespace {

void gen_involutions(std::vector<int>& cur, std::vector<bool>& used, int n,
                     std::vector<std::vector<int>>& out) {
  int i = 0;
  while (i < n && used[i]) ++i;
  if (i == n) {
    out.push_back(cur);
    return;
  }
  used[i] = true;
  cur[i] = i;
  gen_involutions(cur, used, n, out);
  for (int j = i + 1; j < n; ++j) {
    if (used[j]) continue;
    used[j] = true;
    cur[i] = j;
    cur[j] = i;
    gen_involutions(cur, used, n, out);
    used[j] = false;
  }
  used[i] = false;
}

} // namespace

const std::vector<std::vector<int>>& all_involutions(int n) {
  if (n < 0 || n > 10)
    throw std::invalid_argument("involution enumeration supports 0 <= n <= 10");
  static std::map<int, std::vector<std::vector<int>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n);
  std::vector<bool> used(n, false);
  gen_involutions(cur, used, n, out);
  return cache.emplace(n, std::move(out)).first->second;
}

namespace {

bool same_parity(int x, int y) { return ((x - y) % 2) == 0; }

} // namespace

bool is_admissible(const std::vector<int>& a, const std::vector<int>& sigma) {
  int n = (int)a.size();
  if ((int)sigma.size() != n) return false;
  for (int i = 0; i + 1 < n; ++i)
    if (a[i] > a[i + 1]) return false;
  for (int i = 0; i < n; ++i) {
    if (sigma[i] < 0 || sigma[i] >= n) return false;
    if (sigma[sigma[i]] != i) return false;
  }
  // classes: 0 fixed, +1 value decreases under sigma, -1 increases, 2 equal pair
  std::vector<int> cls(n);
  std::vector<int> fixed;
  for (int i = 0; i < n; ++i) {
    if (sigma[i] == i) {
      cls[i] = 0;
      fixed.push_back(i);
    } else if (a[i] > a[sigma[i]]) {
      cls[i] = +1;
    } else if (a[i] < a[sigma[i]]) {
      cls[i] = -1;
    } else {
      cls[i] = 2;
    }
  }
  // (i) at most two fixed points, of distinct parity, each maximal among
  // same-parity values that are fixed or decrease
  if (fixed.size() > 2) return false;
  if (fixed.size() == 2 && same_parity(a[fixed[0]], a[fixed[1]])) return false;
  for (int i : fixed)
    for (int j = 0; j < n; ++j)
      if ((cls[j] == 0 || cls[j] == +1) && same_parity(a[j], a[i]) && a[j] > a[i])
        return false;
  // (ii) per run: at most one decreasing index, at most one fixed-or-increasing
  Runs r = runs_of(a);
  int start = 0;
  for (size_t s = 0; s < r.value.size(); ++s) {
    int plus = 0, minus0 = 0;
    for (int i = start; i < r.end[s]; ++i) {
      if (cls[i] == +1) ++plus;
      if (cls[i] == -1 || cls[i] == 0) ++minus0;
    }
    if (plus > 1 || minus0 > 1) return false;
    start = r.end[s];
  }
  // (iii) nearest same-parity matching between increasing and decreasing values
  for (int i = 0; i < n; ++i) {
    if (cls[i] == -1) {
      bool found = false;
      int best = 0;
      for (int j = 0; j < n; ++j)
        if (cls[j] == +1 && a[j] > a[i] && same_parity(a[j], a[i]))
          if (!found || a[j] < best) {
            best = a[j];
            found = true;
          }
      if (!found || a[sigma[i]] != best) return false;
    } else if (cls[i] == +1) {
      bool found = false;
      int best = 0;
      for (int j = 0; j < n; ++j)
        if (cls[j] == -1 && a[j] < a[i] && same_parity(a[j], a[i]))
          if (!found || a[j] > best) {
            best = a[j];
            found = true;
          }
      if (!found || a[sigma[i]] != best) return false;
    }
  }
  return true;
}

// ===========================================================================
// order matrices and the greedy order-compatible vector
// ===========================================================================
namespace {

int ord2_shift(const Ring& R) { return R.p == 2 ? R.e : 0; }

std::vector<std::vector<long long>> ord_matrix(const Mat& T) {
  int n = T.rows;
  std::vector<std::vector<long long>> O(n, std::vector<long long>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) O[i][j] = O[j][i] = T.R->ord(T.at(i, j));
  return O;
}

std::vector<int> greedy_from_ords(const std::vector<std::vector<long long>>& O,
                                  int n, int sh) {
  std::vector<int> a(n);
  std::vector<long long> av(n);
  for (int k = 0; k < n; ++k) {
    long long m = 2LL * ORD_INF;
    for (int j = k; j < n; ++j) m = std::min(m, O[j][j] - sh);
    for (int i = k; i < n; ++i)
      for (int j = i + 1; j < n; ++j) m = std::min(m, O[i][j]);
    for (int i = 0; i < k; ++i)
      for (int j = k; j < n; ++j) m = std::min(m, 2 * O[i][j] - av[i]);
    if (k > 0) m = std::max(m, av[k - 1]);
    m = std::min(m, (long long)ORD_INF);
    av[k] = m;
    a[k] = (int)m;
  }
  return a;
}

bool lex_greater(const std::vector<int>& x, const std::vector<int>& y) {
  return std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end());
}

RElem pi_pow(const Ring& R, int k) { return R.mul_pi_pow(R.one(), k); }

} // namespace

std::vector<int> max_s_vector(const Mat& T) {
  if (!T.square()) throw std::invalid_argument("max_s_vector: square matrix expected");
  return greedy_from_ords(ord_matrix(T), T.rows, ord2_shift(*T.R));
}

bool is_reduced(const Mat& T, const std::vector<int>& a,
                const std::vector<int>& sigma) {
  const Ring& R = *T.R;
  int n = T.rows;
  int sh = ord2_shift(R);
  if ((int)a.size() != n || (int)sigma.size() != n) return false;
  for (int i = 0; i + 1 < n; ++i)
    if (a[i] > a[i + 1]) return false;
  auto O = ord_matrix(T);
  // membership in the order region of `a`
  for (int i = 0; i < n; ++i)
    if (O[i][i] - sh < a[i]) return false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (2 * O[i][j] < (long long)a[i] + a[j]) return false;
  for (int i = 0; i < n; ++i) {
    int j = sigma[i];
    if (j == i) {
      // fixed point: diagonal attains its slot exactly
      if (O[i][i] - sh != a[i]) return false;
    } else {
      // paired: the pair entry attains the average exactly
      if (2 * O[i][j] != (long long)a[i] + a[j]) return false;
      // the lower end of a strict pair attains its diagonal exactly
      if (a[i] < a[j] && O[i][i] - sh != a[i]) return false;
    }
  }
  // all other entries are strictly above the bound
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (j != sigma[i] && 2 * O[i][j] <= (long long)a[i] + a[j]) return false;
  return true;
}

std::optional<std::vector<int>> find_certificate(const Mat& T,
                                                 const std::vector<int>& a) {
  int n = T.rows;
  if ((int)a.size() != n) return std::nullopt;
  if (n > 10) return std::nullopt;
  for (const auto& sig : all_involutions(n))
    if (is_admissible(a, sig) && is_reduced(T, a, sig)) return sig;
  return std::nullopt;
}

// ===========================================================================
// closed forms for small ranks and odd residue characteristic
// ===========================================================================
std::pair<int, int> gk_binary_values(const Mat& T) {
  const Ring& R = *T.R;
  if (T.rows != 2 || T.cols != 2)
    throw std::invalid_argument("gk_binary_values: 2x2 matrix expected");
  if (R.p != 2)
    throw std::invalid_argument("gk_binary_values: dyadic rings only");
  long long o00 = R.ord(T.at(0, 0)), o01 = R.ord(T.at(0, 1)),
            o11 = R.ord(T.at(1, 1));
  long long a1 = std::min({o00 - R.e, o01, o11 - R.e});
  if (a1 >= ORD_INF) return {ORD_INF, ORD_INF};
  Mat Tp = mat_scale_pi(T, -(int)a1);
  RElem det = R.sub(R.mul(Tp.at(0, 0), Tp.at(1, 1)), R.mul(Tp.at(0, 1), Tp.at(1, 0)));
  RElem D = R.neg(det);
  if (R.is_zero(D)) return {(int)a1, ORD_INF};
  auto [xi, d] = R.ext_type(D);
  (void)xi;
  long long twof = R.ord(D) - d;
  if (twof < 0 || (twof % 2) != 0)
    throw std::logic_error("gk_binary_values: discriminant order mismatch");
  int f = (int)(twof / 2);
  int a2 = (int)a1 + 2 * f + (d == 0 ? 0 : 1);
  return {(int)a1, a2};
}

std::vector<int> gk_odd_values(const Mat& T) {
  if (T.R->p == 2)
    throw std::invalid_argument("gk_odd_values: odd residue characteristic only");
  Jordan J = jordan_split(T);
  std::vector<int> a;
  for (const JordanPart& part : J.parts)
    a.insert(a.end(), part.rank, part.scale);
  return a; // parts come sorted by scale
}

// ===========================================================================
// search for a certified reduced presentation
// ===========================================================================
namespace {

struct XorShift {
  uint64_t s;
  explicit XorShift(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  uint64_t bounded(uint64_t m) { return m ? next() % m : 0; }
};

struct Climber {
  const Ring& R;
  int n, sh, depth;
  Mat T, U;
  std::vector<std::vector<long long>> O;
  uint64_t* evals;
  uint64_t budget;

  Climber(const Mat& T0, const Mat& U0, int depth_, uint64_t* ev, uint64_t bud)
      : R(*T0.R), n(T0.rows), sh(ord2_shift(*T0.R)), depth(depth_), T(T0),
        U(U0), O(ord_matrix(T0)), evals(ev), budget(bud) {}

  bool spent() const { return *evals >= budget; }

  std::vector<int> score_now() const { return greedy_from_ords(O, n, sh); }

  std::vector<int> eval_transvection(int i, int j, const RElem& c) {
    ++(*evals);
    std::vector<long long> save(n), nc(n);
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      nc[k] = R.ord(R.add(T.at(k, j), R.mul(c, T.at(k, i))));
    }
    RElem dj = R.add(T.at(j, j), R.add(R.mul_i64(R.mul(c, T.at(i, j)), 2),
                                       R.mul(R.mul(c, c), T.at(i, i))));
    nc[j] = R.ord(dj);
    for (int k = 0; k < n; ++k) {
      save[k] = O[k][j];
      O[k][j] = O[j][k] = nc[k];
    }
    auto s = greedy_from_ords(O, n, sh);
    for (int k = 0; k < n; ++k) O[k][j] = O[j][k] = save[k];
    return s;
  }

  void apply_transvection(int i, int j, const RElem& c) {
    RElem dj = R.add(T.at(j, j), R.add(R.mul_i64(R.mul(c, T.at(i, j)), 2),
                                       R.mul(R.mul(c, c), T.at(i, i))));
    std::vector<RElem> col(n);
    for (int k = 0; k < n; ++k)
      if (k != j) col[k] = R.add(T.at(k, j), R.mul(c, T.at(k, i)));
    col[j] = dj;
    for (int k = 0; k < n; ++k) {
      T.at(k, j) = col[k];
      T.at(j, k) = col[k];
      O[k][j] = O[j][k] = R.ord(col[k]);
    }
    for (int r = 0; r < n; ++r)
      U.at(r, j) = R.add(U.at(r, j), R.mul(c, U.at(r, i)));
  }

  void apply_perm(const std::vector<int>& pm) {
    Mat T2(T.R, n, n), U2(U.R, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T2.at(i, j) = T.at(pm[i], pm[j]);
        U2.at(i, j) = U.at(i, pm[j]);
      }
    T = T2;
    U = U2;
    O = ord_matrix(T);
  }

  std::vector<RElem> build_monos() const {
    auto a = score_now();
    int lo = a.front(), hi = lo;
    for (int v : a)
      if (v < ORD_INF) hi = std::max(hi, v);
    int tc = depth > 0 ? depth : std::min(std::max(hi - lo + R.e + 2, 2), 24);
    std::vector<RElem> m;
    RElem pw = R.one();
    for (int t = 0; t <= tc; ++t) {
      for (int g = 1; g < R.q; ++g) m.push_back(R.mul(R.lift_digit(g), pw));
      pw = R.mul_pi(pw);
    }
    return m;
  }

  bool sweep(const std::vector<RElem>& monos) {
    auto best = score_now();
    int bi = -1, bj = -1;
    RElem bc;
    for (int i = 0; i < n && !spent(); ++i)
      for (int j = 0; j < n && !spent(); ++j) {
        if (i == j) continue;
        std::vector<RElem> cand;
        long long oii = O[i][i], oij = O[i][j], ojj = O[j][j];
        if (oii < ORD_INF && oij < ORD_INF && oii <= oij)
          cand.push_back(R.neg(R.div_exact(T.at(i, j), T.at(i, i))));
        if (oij < ORD_INF && ojj < ORD_INF && oij + ord2_shift(R) <= ojj)
          cand.push_back(
              R.neg(R.div_exact(T.at(j, j), R.mul_i64(T.at(i, j), 2))));
        cand.insert(cand.end(), monos.begin(), monos.end());
        for (const RElem& c : cand) {
          if (R.is_zero(c)) continue;
          if (spent()) break;
          auto s = eval_transvection(i, j, c);
          if (lex_greater(s, best)) {
            best = s;
            bi = i;
            bj = j;
            bc = c;
          }
        }
      }
    if (bi >= 0) {
      apply_transvection(bi, bj, bc);
      return true;
    }
    return false;
  }

  bool perm_phase() {
    auto cur = score_now();
    std::vector<int> idn(n);
    std::iota(idn.begin(), idn.end(), 0);
    auto eval_pm = [&](const std::vector<int>& q) {
      std::vector<std::vector<long long>> OP(n, std::vector<long long>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) OP[i][j] = O[q[i]][q[j]];
      return greedy_from_ords(OP, n, sh);
    };
    std::vector<int> bestp = idn;
    auto best = cur;
    if (n <= 6) {
      std::vector<int> q = idn;
      do {
        auto s = eval_pm(q);
        if (lex_greater(s, best)) {
          best = s;
          bestp = q;
        }
      } while (std::next_permutation(q.begin(), q.end()));
      *evals += (uint64_t)n * n;
    } else {
      std::vector<int> q = idn;
      auto cs = cur;
      bool moved = true;
      while (moved && !spent()) {
        moved = false;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            std::swap(q[i], q[j]);
            auto s = eval_pm(q);
            if (lex_greater(s, cs)) {
              cs = s;
              moved = true;
            } else {
              std::swap(q[i], q[j]);
            }
          }
        *evals += n;
      }
      bestp = q;
      best = cs;
    }
    if (bestp != idn && lex_greater(best, cur)) {
      apply_perm(bestp);
      return true;
    }
    return false;
  }

  void climb() {
    for (;;) {
      if (spent()) return;
      auto monos = build_monos();
      if (sweep(monos)) continue;
      if (perm_phase()) continue;
      return;
    }
  }

  void kick(XorShift& rng) {
    int rounds = 1 + (int)rng.bounded(3);
    for (int r_ = 0; r_ < rounds; ++r_) {
      int i = (int)rng.bounded(n);
      int j = (int)rng.bounded(n);
      if (i == j) j = (j + 1) % n;
      int g = 1 + (int)rng.bounded(R.q - 1);
      int t = (int)rng.bounded(3);
      apply_transvection(i, j, R.mul(R.lift_digit(g), pi_pow(R, t)));
    }
  }
};

std::optional<GKResult> try_certificate(Climber& C) {
  auto a = C.score_now();
  if (C.n > 10) return std::nullopt;
  if (!a.empty() && a.back() >= ORD_INF) return std::nullopt;
  *C.evals += (uint64_t)C.n * C.n;
  auto sig = find_certificate(C.T, a);
  if (!sig) return std::nullopt;
  GKResult res;
  res.a = a;
  res.U = C.U;
  res.R = C.T;
  res.sigma = *sig;
  res.certified = true;
  res.has_witness = true;
  res.method = "search-certified";
  return res;
}

} // namespace

GKResult gk(const Mat& T0, const SearchOpts& opts) {
  if (!T0.R) throw std::invalid_argument("gk: matrix without ring");
  const Ring& R = *T0.R;
  check_doubled_gram(T0);
  int n = T0.rows;
  GKResult res;
  if (n == 0) {
    res.U = Mat::identity(T0.R, 0);
    res.R = T0;
    res.certified = true;
    res.has_witness = true;
    res.method = "trivial";
    return res;
  }
  if (R.p != 2) {
    Jordan J = jordan_split(T0);
    for (const JordanPart& part : J.parts)
      res.a.insert(res.a.end(), part.rank, part.scale);
    res.U = J.U;
    res.R = congruence(T0, J.U);
    res.certified = true;
    res.has_witness = true;
    res.method = "jordan-odd";
    return res;
  }
  if (R.is_zero(mat_det(T0)))
    throw std::invalid_argument("gk: degenerate form");
  if (n == 1) {
    res.a = {R.ord(T0.at(0, 0)) - R.e};
    res.U = Mat::identity(T0.R, 1);
    res.R = T0;
    res.sigma = {0};
    res.certified = true;
    res.has_witness = true;
    res.method = "rank-1";
    return res;
  }
  std::pair<int, int> closed{0, 0};
  bool have_closed = (n == 2);
  if (have_closed) closed = gk_binary_values(T0);
  auto finish = [&](GKResult r) {
    if (have_closed && (r.a[0] != closed.first || r.a[1] != closed.second))
      throw std::logic_error("rank-2 closed form disagrees with certified reduction");
    return r;
  };

  uint64_t evals = 0;
  uint64_t budget = opts.budget ? opts.budget : 400000;
  XorShift rng(opts.seed);
  Jordan J = jordan_split(T0);
  Mat Tj = congruence(T0, J.U);
  Mat I = Mat::identity(T0.R, n);

  std::vector<int> besta;
  Mat bestT = T0, bestU = I;
  bool have_best = false;
  int restarts = std::max(1, opts.restarts);
  for (int rs = 0; rs < restarts && evals < budget; ++rs) {
    Climber C = (rs % 2 == 1) ? Climber(Tj, J.U, opts.depth, &evals, budget)
                              : Climber(T0, I, opts.depth, &evals, budget);
    if (rs >= 2) C.kick(rng);
    C.climb();
    for (int kr = 0; kr < 7; ++kr) {
      if (auto r = try_certificate(C)) return finish(*r);
      auto a = C.score_now();
      if (!have_best || lex_greater(a, besta)) {
        besta = a;
        bestT = C.T;
        bestU = C.U;
        have_best = true;
      }
      if (evals >= budget) break;
      C.kick(rng);
      C.climb();
    }
  }
  if (have_closed) {
    res.a = {closed.first, closed.second};
    res.U = I;
    res.R = T0;
    res.certified = false;
    res.has_witness = false;
    res.method = "binary-closed";
    return res;
  }
  res.a = besta;
  res.U = bestU;
  res.R = bestT;
  res.certified = false;
  res.has_witness = have_best;
  res.method = "search-budget";
  return res;
}

// ===========================================================================
// doubled lattices
// ===========================================================================
Mat double_gram(const Mat& T) {
  check_doubled_gram(T);
  return block_diag({T, mat_neg(T)});
}

std::vector<int> double_gk_from_profile(const Jordan& J) {
  const Ring& R = *J.U.R;
  if (R.p != 2 || R.e != 1 || R.q != 2)
    throw std::invalid_argument(
        "double_gk_from_profile: requires the 2-adic integers");
  std::vector<int> out;
  for (const JordanPart& part : J.parts) {
    int i = part.scale;
    if (part.typeI) {
      out.insert(out.end(), 2 * part.rank - 2, i + 1);
      out.push_back(i);
      out.push_back(i + 2);
    } else {
      out.insert(out.end(), 2 * part.rank, i + 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RecoveredPart> profile_from_double(const std::vector<int>& a,
                                               const std::vector<int>& sigma) {
  int n = (int)a.size();
  if ((int)sigma.size() != n)
    throw std::invalid_argument("profile_from_double: size mismatch");
  std::map<int, int> eq, lohi;
  for (int t = 0; t < n; ++t) {
    if (sigma[t] < 0 || sigma[t] >= n || sigma[sigma[t]] != t || sigma[t] == t)
      throw std::invalid_argument("profile_from_double: not a doubled type");
    int d = a[sigma[t]] - a[t];
    if (d == 0)
      ++eq[a[t] - 1];
    else if (d == 2)
      ++lohi[a[t]];
    else if (d != -2)
      throw std::invalid_argument("profile_from_double: not a doubled type");
  }
  std::map<int, std::pair<int, int>> per_scale;
  for (auto& [i, c] : eq) per_scale[i].first = c;
  for (auto& [i, c] : lohi) per_scale[i].second = c;
  std::vector<RecoveredPart> out;
  for (auto& [i, ab] : per_scale) {
    auto [A, B] = ab;
    if (B > 1 || (A % 2) != 0)
      throw std::invalid_argument("profile_from_double: not a doubled type");
    RecoveredPart p;
    p.scale = i;
    if (B == 1) {
      p.typeI = true;
      p.rank = A / 2 + 1;
      p.odd_rank = (A % 4) == 0;
    } else {
      p.typeI = false;
      p.rank = A / 2;
      p.odd_rank = false;
    }
    if (p.rank > 0) out.push_back(p);
  }
  return out;
}

GKResult gk_double(const Mat& T, const SearchOpts& opts) {
  const Ring& R = *T.R;
  check_doubled_gram(T);
  int n = T.rows;
  Mat D = double_gram(T);
  if (n == 0 || R.p != 2 || !(R.e == 1 && R.q == 2)) return gk(D, opts);

  // over the 2-adic integers: assemble a certified presentation directly
  Jordan J = jordan_split(T);
  std::vector<int> target = double_gk_from_profile(J);
  int N = 2 * n;
  auto zvec = [&]() { return std::vector<RElem>(N, R.zero()); };
  auto Xcol = [&](int col) {
    auto v = zvec();
    for (int r = 0; r < n; ++r) v[r] = J.U.at(r, col);
    return v;
  };
  auto Ycol = [&](int col) {
    auto v = zvec();
    for (int r = 0; r < n; ++r) v[n + r] = J.U.at(r, col);
    return v;
  };
  auto vadd = [&](const std::vector<RElem>& x, const std::vector<RElem>& y) {
    auto v = zvec();
    for (int r = 0; r < N; ++r) v[r] = R.add(x[r], y[r]);
    return v;
  };
  auto vscal = [&](const RElem& c, const std::vector<RElem>& x) {
    auto v = zvec();
    for (int r = 0; r < N; ++r) v[r] = R.mul(c, x[r]);
    return v;
  };

  struct Piece {
    std::vector<int> avals;
    std::vector<std::vector<RElem>> vecs;
  };
  std::vector<Piece> pieces;
  int off = 0;
  for (const JordanPart& part : J.parts) {
    int s = part.scale, tmin = part.tmin, r = part.rank;
    std::vector<int> units;
    int k = 0;
    while (k < r) {
      if (R.ord(part.block.at(k, k)) == tmin) {
        units.push_back(k);
        ++k;
      } else {
        if (k + 1 >= r || R.ord(part.block.at(k, k + 1)) != tmin ||
            R.ord(part.block.at(k + 1, k + 1)) <= tmin)
          throw std::logic_error("gk_double: unexpected splitting layout");
        pieces.push_back(
            {{s + 1, s + 1}, {Xcol(off + k), Xcol(off + k + 1)}});
        pieces.push_back(
            {{s + 1, s + 1}, {Ycol(off + k), Ycol(off + k + 1)}});
        k += 2;
      }
    }
    if (!units.empty()) {
      // chain the opposite unit pairs; each merge splits off one clean
      // even block and keeps one opposite pair alive
      auto cx = Xcol(off + units[0]);
      auto cy = Ycol(off + units[0]);
      RElem cu = R.div_pi_pow(part.block.at(units[0], units[0]), tmin);
      for (size_t t = 1; t < units.size(); ++t) {
        auto nx = Xcol(off + units[t]);
        auto ny = Ycol(off + units[t]);
        RElem nu = R.div_pi_pow(part.block.at(units[t], units[t]), tmin);
        pieces.push_back({{s + 1, s + 1}, {vadd(cx, nx), vadd(cy, nx)}});
        auto sx = vadd(vadd(vscal(R.neg(nu), cx), vscal(nu, cy)), vscal(cu, nx));
        cx = sx;
        cy = ny;
        cu = R.mul(R.mul(cu, cu), nu);
      }
      pieces.push_back({{s, s + 2}, {cx, vadd(cx, cy)}});
    }
    off += r;
  }

  std::vector<std::tuple<int, int, int>> order;
  for (size_t pid = 0; pid < pieces.size(); ++pid)
    for (size_t sl = 0; sl < pieces[pid].avals.size(); ++sl)
      order.emplace_back(pieces[pid].avals[sl], (int)pid, (int)sl);
  std::stable_sort(order.begin(), order.end(),
                   [](const std::tuple<int, int, int>& x,
                      const std::tuple<int, int, int>& y) {
                     return std::get<0>(x) < std::get<0>(y);
                   });
  if ((int)order.size() != N)
    throw std::logic_error("gk_double: piece assembly size mismatch");
  std::vector<int> a(N);
  Mat U(T.R, N, N);
  std::map<std::pair<int, int>, int> pos;
  for (int idx = 0; idx < N; ++idx) {
    auto [val, pid, sl] = order[idx];
    a[idx] = val;
    pos[{pid, sl}] = idx;
    for (int r_ = 0; r_ < N; ++r_) U.at(r_, idx) = pieces[pid].vecs[sl][r_];
  }
  std::vector<int> sig(N);
  for (const auto& [key, idx] : pos) sig[idx] = pos.at({key.first, 1 - key.second});
  Mat Rm = congruence(D, U);
  if (a != target)
    throw std::logic_error("gk_double: assembled values disagree with profile");
  if (max_s_vector(Rm) != a || !is_admissible(a, sig) || !is_reduced(Rm, a, sig))
    throw std::logic_error("gk_double: assembly failed verification");
  GKResult res;
  res.a = a;
  res.U = U;
  res.R = Rm;
  res.sigma = sig;
  res.certified = true;
  res.has_witness = true;
  res.method = "double-assembly";
  return res;
}

// ===========================================================================
// extended datum
// ===========================================================================
std::string egk_str(const EGK& e) {
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s;
  };
  return "(" + join(e.n) + ";" + join(e.m) + ";" + join(e.zeta) + ")";
}

int xi_of(const Mat& T) {
  const Ring& R = *T.R;
  RElem D = disc(T);
  if (R.is_zero(D)) throw std::invalid_argument("xi_of: degenerate form");
  return R.ext_type(D).first;
}

int eta_of(const Mat& Tin) {
  const Ring& R = *Tin.R;
  if (R.p != 2) throw std::invalid_argument("eta_of: dyadic rings only");
  int n = Tin.rows;
  if (n == 0) return 1;
  RElem det = mat_det(Tin);
  if (R.is_zero(det)) throw std::invalid_argument("eta_of: degenerate form");

  auto reduce_sq = [&](const RElem& x) {
    int o = R.ord(x);
    if (o >= ORD_INF)
      throw std::runtime_error("eta_of: precision exhausted");
    return R.div_pi_pow(x, o - (o & 1));
  };

  // fraction-free symmetric elimination; reps[k] is a square-class
  // representative of the k-th diagonal entry of any diagonalization of T/2
  std::vector<std::vector<RElem>> A(n, std::vector<RElem>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A[i][j] = Tin.at(i, j);
  std::vector<RElem> reps;
  RElem chain = R.one();
  int m = n;
  while (m > 0) {
    // strip even powers of pi common to the active block
    int mo = ORD_INF;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) mo = std::min(mo, R.ord(A[i][j]));
    if (mo >= ORD_INF) throw std::runtime_error("eta_of: degenerate block");
    if (mo >= 2)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          A[i][j] = R.div_pi_pow(A[i][j], mo - (mo & 1));
    // pivot: minimal-order diagonal entry, after a repair step when the
    // diagonal sits too far above the off-diagonal
    int mind = ORD_INF, di = 0;
    for (int i = 0; i < m; ++i) {
      int o = R.ord(A[i][i]);
      if (o < mind) {
        mind = o;
        di = i;
      }
    }
    int mino = ORD_INF, oi = 0, oj = 1;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        int o = R.ord(A[i][j]);
        if (o < mino) {
          mino = o;
          oi = i;
          oj = j;
        }
      }
    if (m > 1 && mind > R.e + mino) {
      // e_{oi} += e_{oj}: the new diagonal entry attains ord(2) + mino
      std::vector<RElem> row(m);
      for (int r_ = 0; r_ < m; ++r_) row[r_] = R.add(A[oi][r_], A[oj][r_]);
      RElem dii = R.add(A[oi][oi],
                        R.add(R.mul_i64(A[oi][oj], 2), A[oj][oj]));
      for (int r_ = 0; r_ < m; ++r_) {
        A[oi][r_] = row[r_];
        A[r_][oi] = row[r_];
      }
      A[oi][oi] = dii;
      di = oi;
    }
    // move pivot to the front
    if (di != 0) {
      for (int r_ = 0; r_ < m; ++r_) std::swap(A[0][r_], A[di][r_]);
      for (int r_ = 0; r_ < m; ++r_) std::swap(A[r_][0], A[r_][di]);
    }
    RElem piv = A[0][0];
    if (R.is_zero(piv)) throw std::runtime_error("eta_of: zero pivot");
    chain = reduce_sq(R.mul(chain, piv));
    reps.push_back(reduce_sq(R.mul(R.two(), chain)));
    // eliminate
    std::vector<std::vector<RElem>> B(m - 1, std::vector<RElem>(m - 1));
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j)
        B[i - 1][j - 1] = R.sub(R.mul(A[i][j], piv), R.mul(A[0][i], A[0][j]));
    A = std::move(B);
    --m;
  }

  RElem dB = det;
  if (n % 2) dB = R.mul(dB, R.two());
  dB = reduce_sq(dB);
  RElem mone = R.from_int(-1);
  int eta = 1;
  if (((n + 1) / 4) % 2 && R.hilbert(mone, mone) < 0) eta = -eta;
  if (((n - 1) / 2) % 2 && R.hilbert(mone, dB) < 0) eta = -eta;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (R.hilbert(reps[i], reps[j]) < 0) eta = -eta;
  return eta;
}

EGK egk_from_reduced(const Mat& Rm, const std::vector<int>& a) {
  if ((int)a.size() != Rm.rows)
    throw std::invalid_argument("egk_from_reduced: size mismatch");
  for (size_t i = 0; i + 1 < a.size(); ++i)
    if (a[i] > a[i + 1])
      throw std::invalid_argument("egk_from_reduced: vector not sorted");
  Runs r = runs_of(a);
  EGK out;
  out.n = r.count;
  out.m = r.value;
  for (size_t s = 0; s < r.value.size(); ++s) {
    int k = r.end[s];
    Mat lead = submat(Rm, 0, 0, k, k);
    out.zeta.push_back(k % 2 == 0 ? xi_of(lead) : eta_of(lead));
  }
  return out;
}

EGK egk(const Mat& T, const SearchOpts& opts) {
  if (T.R->p != 2)
    throw std::invalid_argument("egk: dyadic rings only");
  GKResult res = gk(T, opts);
  if (!res.certified)
    throw std::runtime_error("egk: no certified reduced presentation found "
                             "within the search budget");
  return egk_from_reduced(res.R, res.a);
}

EGK egk_trunc_closed_e1(const Mat& T) {
  const Ring& R = *T.R;
  if (R.p != 2 || R.e != 1 || R.q != 2)
    throw std::invalid_argument(
        "egk_trunc_closed_e1: requires the 2-adic integers");
  Jordan J = jordan_split(T);
  if (J.parts.front().scale < 0)
    throw std::invalid_argument("egk_trunc_closed_e1: expects scales >= 0");
  bool type_one = false;
  for (const JordanPart& part : J.parts)
    if (part.scale == 0 && part.typeI) type_one = true;
  Residual res = residual_space(T);
  int m = res.m;
  EGK out;
  if (m == 0) {
    if (type_one) {
      out.n = {1};
      out.m = {0};
      out.zeta = {1};
    }
    return out;
  }
  if (m % 2 == 0) {
    int z = res.split ? 1 : -1;
    if (type_one) {
      out.n = {1, m};
      out.m = {0, 1};
      out.zeta = {1, z};
    } else {
      out.n = {m};
      out.m = {1};
      out.zeta = {z};
    }
    return out;
  }
  if (type_one) {
    out.n = {1, m};
    out.m = {0, 1};
    out.zeta = {1, 0};
  } else {
    out.n = {m};
    out.m = {1};
    out.zeta = {1};
  }
  return out;
}

EGK egk_trunc(const Mat& T, const SearchOpts& opts) {
  const Ring& R = *T.R;
  if (R.p != 2)
    throw std::invalid_argument("egk_trunc: dyadic rings only");
  GKResult res = gk(T, opts);
  if (!res.certified)
    throw std::runtime_error("egk_trunc: no certified reduced presentation "
                             "found within the search budget");
  if (!res.a.empty() && res.a.front() < 0)
    throw std::invalid_argument("egk_trunc: expects a normalized block form");
  int m0 = 0, m1 = 0;
  for (int v : res.a) {
    if (v == 0) ++m0;
    if (v == 1) ++m1;
  }
  if (m0 > 1)
    throw std::invalid_argument(
        "egk_trunc: expects an integral block form (at most one zero slot)");
  int k = m0 + m1;
  EGK out;
  if (k > 0) {
    Mat lead = submat(res.R, 0, 0, k, k);
    out = egk(lead, opts);
    // the leading block must reproduce exactly the truncated values
    std::vector<int> want_m, want_n;
    if (m0) {
      want_m.push_back(0);
      want_n.push_back(1);
    }
    if (m1) {
      want_m.push_back(1);
      want_n.push_back(m1);
    }
    if (out.m != want_m || out.n != want_n)
      throw std::logic_error("egk_trunc: leading block values changed");
  }
  if (R.e == 1 && R.q == 2) {
    EGK closed = egk_trunc_closed_e1(T);
    if (closed != out)
      throw std::logic_error(
          "egk_trunc: closed form and reduction disagree");
  }
  return out;
}

// ===========================================================================
// rank-2 lattices classified by discriminant data
// ===========================================================================
BinaryClass classify_binary(const Mat& T) {
  const Ring& R = *T.R;
  if (T.rows != 2) throw std::invalid_argument("classify_binary: 2x2 expected");
  long long o00 = R.ord(T.at(0, 0)), o01 = R.ord(T.at(0, 1)),
            o11 = R.ord(T.at(1, 1));
  long long a1 = std::min({o00 - R.e, o01, o11 - R.e});
  if (a1 >= ORD_INF)
    throw std::invalid_argument("classify_binary: degenerate form");
  Mat Tp = mat_scale_pi(T, -(int)a1);
  RElem det =
      R.sub(R.mul(Tp.at(0, 0), Tp.at(1, 1)), R.mul(Tp.at(0, 1), Tp.at(1, 0)));
  RElem D = R.neg(det);
  if (R.is_zero(D))
    throw std::invalid_argument("classify_binary: degenerate form");
  auto [xi, d] = R.ext_type(D);
  long long twof = R.ord(D) - d;
  if (twof < 0 || (twof % 2) != 0)
    throw std::logic_error("classify_binary: discriminant order mismatch");
  BinaryClass c;
  c.a1 = (int)a1;
  c.xi = xi;
  c.d = d;
  c.f = (int)(twof / 2);
  return c;
}

BinaryLattice make_binary(const Ring& R, int xi, int d, int f) {
  if (R.p != 2) throw std::invalid_argument("make_binary: dyadic rings only");
  if (f < 0) throw std::invalid_argument("make_binary: f >= 0 required");
  bool ok = (xi == 1 && d == 0) || (xi == -1 && d == 0) ||
            (xi == 0 && d >= 2 && d <= 2 * R.e && d % 2 == 0) ||
            (xi == 0 && d == 2 * R.e + 1);
  if (!ok) throw std::invalid_argument("make_binary: invalid (xi, d)");
  Mat T(&R, 2, 2);
  if (d == 0) {
    RElem u0 = R.zero();
    if (xi == -1) {
      // a residue with absolute trace 1 makes x^2 + x + c irreducible
      int c = -1;
      for (int cand = 1; cand < R.q && c < 0; ++cand) {
        int t = cand, sq = cand;
        for (int k = 1; k < R.f; ++k) {
          sq = R.gf.mul(sq, sq);
          t = R.gf.add(t, sq);
        }
        if (t == 1) c = cand;
      }
      if (c < 0) throw std::logic_error("make_binary: no trace-one residue");
      u0 = R.lift_digit(c);
    }
    T.at(0, 0) = R.two();
    T.at(0, 1) = T.at(1, 0) = pi_pow(R, f);
    T.at(1, 1) = R.mul(R.two(), R.mul(u0, pi_pow(R, 2 * f)));
  } else if (d <= 2 * R.e) {
    int g = d / 2;
    RElem u = R.neg(R.div_exact(pi_pow(R, 2 * R.e), R.from_int(4)));
    T.at(0, 0) = R.two();
    T.at(0, 1) = T.at(1, 0) = pi_pow(R, g + f);
    T.at(1, 1) = R.mul(R.two(), R.mul(u, pi_pow(R, 2 * f + 1)));
  } else {
    T.at(0, 0) = R.two();
    T.at(0, 1) = T.at(1, 0) = R.zero();
    T.at(1, 1) = R.mul(R.two(), pi_pow(R, 2 * f + 1));
  }
  BinaryClass got = classify_binary(T);
  if (got.a1 != 0 || got.xi != xi || got.d != d || got.f != f)
    throw std::logic_error("make_binary: classification mismatch");
  BinaryLattice L;
  L.T = T;
  L.xi = xi;
  L.d = d;
  L.f = f;
  return L;
}

std::vector<int> binary_double_values(const Ring& R, int d, int f) {
  int e = R.e;
  if (d == 0) {
    if (f == 0) return {0, 0, 0, 0};
    if (f < 2 * e) return {0, f, f, 2 * f};
    return {0, 2 * e, 2 * f - 2 * e, 2 * f};
  }
  if (d <= 2 * e) {
    int g = d / 2;
    if (f <= g - 1) return {0, 2 * f + 1, 2 * g - 1, 2 * g + 2 * f};
    if (f < 2 * e - g) return {0, g + f, g + f, 2 * g + 2 * f};
    return {0, 2 * e, 2 * g + 2 * f - 2 * e, 2 * g + 2 * f};
  }
  if (f < e) return {0, 2 * f + 1, 2 * e, 2 * e + 2 * f + 1};
  return {0, 2 * e, 2 * f + 1, 2 * e + 2 * f + 1};
}

GKResult binary_double_reduced(const BinaryLattice& L) {
  const Ring& R = *L.T.R;
  int e = R.e, f = L.f, d = L.d;
  Mat D = double_gram(L.T);
  std::vector<int> a = binary_double_values(R, d, f);
  Mat U = Mat::identity(L.T.R, 4);
  std::vector<int> sig;
  auto set_col = [&](int j, std::initializer_list<RElem> coeffs) {
    int i = 0;
    for (const RElem& c : coeffs) U.at(i++, j) = c;
  };
  RElem z = R.zero(), o = R.one();
  auto split_then_pair = [&](const RElem& c) {
    // x-basis (e1, c e1 + e2) diagonalizes the form; then pair each
    // diagonal vector with its opposite-side image
    set_col(0, {o, z, z, z});
    set_col(1, {o, z, o, z});
    set_col(2, {c, o, z, z});
    set_col(3, {c, o, c, o});
    sig = {1, 0, 3, 2};
  };
  if (d == 0 && f == 0) {
    sig = {1, 0, 3, 2};
  } else if (d == 0 && f < 2 * e) {
    set_col(0, {o, z, z, z});
    set_col(1, {z, o, z, z});
    set_col(2, {o, z, o, z});
    set_col(3, {z, o, z, o});
    sig = {3, 2, 1, 0};
  } else if (d == 0) {
    split_then_pair(R.neg(R.div_exact(pi_pow(R, f), R.two())));
  } else if (d <= 2 * e) {
    int g = d / 2;
    if (f < 2 * e - g) {
      set_col(0, {o, z, z, z});
      set_col(1, {z, z, z, R.neg(o)});
      set_col(2, {o, z, o, z});
      set_col(3, {z, o, z, o});
      sig = {3, 2, 1, 0};
    } else {
      split_then_pair(R.neg(R.div_exact(pi_pow(R, g + f), R.two())));
    }
  } else {
    if (f < e) {
      set_col(0, {o, z, z, z});
      set_col(1, {z, o, z, z});
      set_col(2, {o, z, o, z});
      set_col(3, {z, o, z, o});
      sig = {2, 3, 0, 1};
    } else {
      split_then_pair(R.zero());
    }
  }
  Mat Rm = congruence(D, U);
  if (max_s_vector(Rm) != a || !is_admissible(a, sig) ||
      !is_reduced(Rm, a, sig))
    throw std::logic_error("binary_double_reduced: witness failed verification");
  GKResult res;
  res.a = a;
  res.U = U;
  res.R = Rm;
  res.sigma = sig;
  res.certified = true;
  res.has_witness = true;
  res.method = "binary-witness";
  return res;
}

std::vector<int> binary_jordan_scales(const Ring& R, int d, int f) {
  int e = R.e;
  if (d == 0) {
    if (f < e) return {f - e};
    if (f == e) return {0};
    return {0, 2 * f - 2 * e};
  }
  if (d <= 2 * e) {
    int g = d / 2;
    if (f < e - g) return {f + g - e};
    if (f == e - g) return {0};
    return {0, 2 * f + 2 * g - 2 * e};
  }
  return {0, 2 * f + 1};
}

std::pair<int, int> binary_block_gk(const Ring& R, int d, int f) {
  int e = R.e;
  if (d == 0) {
    if (f < e) return {e - f, e + f};
    return {0, 2 * f};
  }
  if (d <= 2 * e) {
    int g = d / 2;
    if (f < e - g) return {e - g - f, e - g + f + 1};
    return {0, 2 * f + 1};
  }
  return {0, 2 * f + 1};
}

EGK binary_egk_trunc(const Ring& R, int xi, int d, int f) {
  int e = R.e;
  EGK out;
  auto one_zero = [&]() {
    out.n = {1};
    out.m = {0};
    out.zeta = {1};
  };
  if (d == 0) {
    if (f == 0 && e == 1) {
      out.n = {2};
      out.m = {1};
      out.zeta = {xi};
    } else if (f >= e) {
      one_zero();
    } else if (f == e - 1) {
      out.n = {1};
      out.m = {1};
      out.zeta = {1};
    }
    // f < e - 1: empty
    return out;
  }
  if (d <= 2 * e) {
    int g = d / 2;
    if (g == e && f == 0) {
      out.n = {1, 1};
      out.m = {0, 1};
      out.zeta = {1, 0};
    } else if (f == e - g - 1) {
      out.n = {1};
      out.m = {1};
      out.zeta = {1};
    } else if (f >= e - g) {
      one_zero();
    }
    // f < e - g - 1: empty
    return out;
  }
  if (f == 0) {
    out.n = {1, 1};
    out.m = {0, 1};
    out.zeta = {1, 0};
  } else {
    one_zero();
  }
  return out;
}

} // namespace qlat
