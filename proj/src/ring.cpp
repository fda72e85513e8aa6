#include "qlat/ring.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qlat {

// ===========================================================================
// GF(p^f)
// ===========================================================================
std::vector<int> GF::modpoly(int p_, int f_) {
  // Fixed monic irreducibles; coefficients h_0..h_{f-1} of h = y^f + ...
  if (f_ == 1) return {0};
  if (p_ == 2) {
    if (f_ == 2) return {1, 1};       // y^2 + y + 1
    if (f_ == 3) return {1, 1, 0};    // y^3 + y + 1
    if (f_ == 4) return {1, 1, 0, 0}; // y^4 + y + 1
  }
  if (p_ == 3 && f_ == 2) return {1, 0}; // y^2 + 1
  throw std::runtime_error("unsupported residue field GF(" +
                           std::to_string(p_) + "^" + std::to_string(f_) + ")");
}

GF::GF(int p_, int f_) : p(p_), f(f_) {
  q = 1;
  for (int i = 0; i < f; ++i) q *= p;
  if (q > 256) throw std::runtime_error("residue field too large");
  exp_tab.assign(q, 0);
  log_tab.assign(q, -1);
  // find a generator of the multiplicative group
  for (int g = 1; g < q; ++g) {
    int x = 1, n = 0;
    std::vector<int> seen(q, 0);
    bool ok = true;
    for (n = 0; n < q - 1; ++n) {
      if (seen[x]) { ok = false; break; }
      seen[x] = 1;
      x = raw_mul(x, g);
    }
    if (ok && x == 1) {
      // fill tables
      int y = 1;
      for (int i = 0; i < q - 1; ++i) {
        exp_tab[i] = y;
        log_tab[y] = i;
        y = raw_mul(y, g);
      }
      return;
    }
  }
  throw std::runtime_error("no generator found (field construction bug)");
}

int GF::raw_mul(int a, int b) const {
  if (a == 0 || b == 0) return 0;
  // digits of a, b
  std::vector<int> da(f, 0), db(f, 0), conv(2 * f - 1, 0);
  int ta = a, tb = b;
  for (int i = 0; i < f; ++i) { da[i] = ta % p; ta /= p; }
  for (int i = 0; i < f; ++i) { db[i] = tb % p; tb /= p; }
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) conv[i + j] = (conv[i + j] + da[i] * db[j]) % p;
  std::vector<int> h = modpoly(p, f);
  for (int k = 2 * f - 2; k >= f; --k) {
    int c = conv[k];
    if (c == 0) continue;
    conv[k] = 0;
    for (int j = 0; j < f; ++j)
      conv[k - f + j] = ((conv[k - f + j] - c * h[j]) % p + p) % p;
  }
  int r = 0, mult = 1;
  for (int i = 0; i < f; ++i) { r += conv[i] * mult; mult *= p; }
  return r;
}

int GF::add(int a, int b) const {
  if (p == 2) return a ^ b;
  int r = 0, mult = 1;
  for (int i = 0; i < f; ++i) {
    r += ((a % p + b % p) % p) * mult;
    a /= p; b /= p; mult *= p;
  }
  return r;
}

int GF::neg(int a) const {
  if (p == 2) return a;
  int r = 0, mult = 1;
  for (int i = 0; i < f; ++i) {
    r += ((p - a % p) % p) * mult;
    a /= p; mult *= p;
  }
  return r;
}

int GF::sub(int a, int b) const { return add(a, neg(b)); }

int GF::mul(int a, int b) const {
  if (a == 0 || b == 0) return 0;
  return exp_tab[(log_tab[a] + log_tab[b]) % (q - 1)];
}

int GF::inv(int a) const {
  if (a == 0) throw std::runtime_error("inverse of 0 in residue field");
  return exp_tab[(q - 1 - log_tab[a]) % (q - 1)];
}

int GF::pow(int a, long long k) const {
  if (a == 0) return k == 0 ? 1 : 0;
  long long r = (log_tab[a] * (k % (q - 1))) % (q - 1);
  if (r < 0) r += q - 1;
  return exp_tab[r];
}

int GF::sqrt(int a) const {
  if (a == 0) return 0;
  if (p == 2) return pow(a, q / 2); // x -> x^(q/2) inverts squaring
  int l = log_tab[a];
  if (l % 2) return -1;
  return exp_tab[l / 2];
}

// ===========================================================================
// Ring construction
// ===========================================================================
Ring::Ring(int p_, int f_, int e_, std::vector<long long> eis_big_endian,
           int Pw_) {
  p = p_; f = f_; e = e_;
  if (p < 2) throw std::runtime_error("bad residue characteristic");
  if (e < 1 || f < 1) throw std::runtime_error("bad ring parameters");
  if (e * f > CoeffVec::kCap)
    throw std::runtime_error("ring presentation too large");
  if (p != 2 && (e != 1 || f != 1))
    throw std::runtime_error("odd residue characteristic supports only the "
                             "unramified degree-1 case here");
  Pw = Pw_;
  if (Pw == 0) Pw = (p == 2) ? 48 : 30;
  if (p == 2 && Pw > 62) throw std::runtime_error("Pw too large");
  if (p != 2 && Pw > 38) throw std::runtime_error("Pw too large");
  M = 1;
  for (int i = 0; i < Pw; ++i) {
    if (M > (uint64_t(1) << 62) / uint64_t(p))
      throw std::runtime_error("modulus overflow");
    M *= uint64_t(p);
  }
  q = 1;
  for (int i = 0; i < f; ++i) q *= p;
  P = e * Pw;
  gf = GF(p, f);

  eis.assign(e, 0);
  if (e == 1) {
    eis[0] = M - 1; // pi = p
  } else {
    if ((int)eis_big_endian.size() != e)
      throw std::runtime_error("eisenstein data must list e coefficients");
    for (int i = 0; i < e; ++i) {
      long long v = eis_big_endian[e - 1 - i];
      __int128 r = (__int128)v % (__int128)M;
      if (r < 0) r += M;
      eis[i] = (uint64_t)r;
    }
    if (eis[0] % uint64_t(p) == 0)
      throw std::runtime_error("eisenstein constant coefficient must be a unit");
  }
  red.assign(e, 0);
  for (int i = 0; i < e; ++i) {
    // red[i] = -p * u_i  (mod M)
    uint64_t pu = mulm(uint64_t(p) % M, eis[i]);
    red[i] = (M - pu) % M;
  }
  // W-inverse of u_0 via Newton from the residue-field inverse.
  {
    std::vector<uint64_t> u0(f, 0);
    u0[0] = eis[0]; // scalar lift
    u0inv = winv(u0);
  }
}

std::string Ring::describe() const {
  std::string s = "p=" + std::to_string(p) + " f=" + std::to_string(f) +
                  " e=" + std::to_string(e);
  if (e > 1) {
    s += " eis=[";
    for (int i = e - 1; i >= 0; --i) {
      s += std::to_string((long long)eis[i]);
      if (i) s += ",";
    }
    s += "]";
  }
  return s;
}

std::string Ring::ring_key() const {
  std::string s = std::to_string(p) + ":" + std::to_string(f) + ":" +
                  std::to_string(e);
  if (e > 1)
    for (int i = e - 1; i >= 0; --i) s += ":" + std::to_string((long long)eis[i]);
  return s;
}

// ===========================================================================
// W layer
// ===========================================================================
uint64_t Ring::addm(uint64_t a, uint64_t b) const {
  uint64_t s = a + b; // a,b < M <= 2^62: no overflow
  if (s >= M) s -= M;
  return s;
}
uint64_t Ring::subm(uint64_t a, uint64_t b) const {
  return a >= b ? a - b : a + M - b;
}
uint64_t Ring::mulm(uint64_t a, uint64_t b) const {
  return (uint64_t)(((unsigned __int128)a * b) % M);
}

void Ring::wzero(uint64_t* a) const { std::fill(a, a + f, 0); }
void Ring::wadd(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
  for (int j = 0; j < f; ++j) out[j] = addm(a[j], b[j]);
}
void Ring::wsub(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
  for (int j = 0; j < f; ++j) out[j] = subm(a[j], b[j]);
}
void Ring::wneg(const uint64_t* a, uint64_t* out) const {
  for (int j = 0; j < f; ++j) out[j] = a[j] ? M - a[j] : 0;
}
void Ring::wscal(const uint64_t* a, uint64_t s, uint64_t* out) const {
  for (int j = 0; j < f; ++j) out[j] = mulm(a[j], s);
}
void Ring::wmul(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
  if (f == 1) { out[0] = mulm(a[0], b[0]); return; }
  uint64_t conv[8] = {0};
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j)
      conv[i + j] = addm(conv[i + j], mulm(a[i], b[j]));
  static thread_local std::vector<int> h;
  static thread_local int hp = 0, hf = 0;
  if (hp != p || hf != f) { h = GF::modpoly(p, f); hp = p; hf = f; }
  for (int k = 2 * f - 2; k >= f; --k) {
    uint64_t c = conv[k];
    if (!c) continue;
    conv[k] = 0;
    for (int j = 0; j < f; ++j)
      if (h[j]) conv[k - f + j] = subm(conv[k - f + j], mulm(c, (uint64_t)h[j]));
  }
  for (int j = 0; j < f; ++j) out[j] = conv[j];
}

int Ring::wvp(const uint64_t* a) const {
  int best = Pw;
  for (int j = 0; j < f; ++j) {
    uint64_t v = a[j];
    if (!v) continue;
    int k = 0;
    if (p == 2) {
      k = __builtin_ctzll(v);
    } else {
      while (v % uint64_t(p) == 0) { v /= uint64_t(p); ++k; }
    }
    best = std::min(best, std::min(k, Pw));
    if (best == 0) return 0;
  }
  return best;
}

void Ring::wdiv_p(const uint64_t* a, uint64_t* out) const {
  for (int j = 0; j < f; ++j) {
    if (a[j] % uint64_t(p)) throw std::runtime_error("inexact division by p");
    out[j] = a[j] / uint64_t(p);
  }
}

std::vector<uint64_t> Ring::winv(const std::vector<uint64_t>& x) const {
  // residue class of x
  int d = 0, mult = 1;
  for (int j = 0; j < f; ++j) { d += int(x[j] % uint64_t(p)) * mult; mult *= p; }
  if (d == 0) throw std::runtime_error("W-inverse of a non-unit");
  int dinv = gf.inv(d);
  std::vector<uint64_t> y(f, 0);
  { int t = dinv; for (int j = 0; j < f; ++j) { y[j] = uint64_t(t % p); t /= p; } }
  // Newton: y <- y(2 - xy), doubling p-adic precision each step
  int steps = 1;
  while ((1 << steps) < Pw) ++steps;
  ++steps;
  std::vector<uint64_t> t1(f), t2(f);
  for (int it = 0; it < steps; ++it) {
    wmul(x.data(), y.data(), t1.data());          // xy
    wneg(t1.data(), t2.data());                   // -xy
    t2[0] = addm(t2[0], 2 % M);                   // 2 - xy
    wmul(y.data(), t2.data(), t1.data());
    y.assign(t1.begin(), t1.end());
  }
  return y;
}

// ===========================================================================
// element basics
// ===========================================================================
void Ring::check(const RElem& a) const {
  if (a.R != this) throw std::runtime_error("ring mismatch");
  if ((int)a.c.size() != e * f) throw std::runtime_error("bad element size");
}

RElem Ring::zero() const { return RElem(this, CoeffVec(e * f, 0)); }
RElem Ring::one() const {
  RElem r = zero();
  r.c[0] = 1;
  return r;
}
RElem Ring::pi() const {
  if (e == 1) return from_int(p);
  RElem r = zero();
  r.c[1 * f + 0] = 1;
  return r;
}
RElem Ring::from_int(long long v) const {
  RElem r = zero();
  __int128 t = (__int128)v % (__int128)M;
  if (t < 0) t += M;
  r.c[0] = (uint64_t)t;
  return r;
}
RElem Ring::from_coeffs(const std::vector<std::vector<long long>>& co) const {
  if ((int)co.size() > e) throw std::runtime_error("too many pi-coefficients");
  RElem r = zero();
  for (int i = 0; i < (int)co.size(); ++i) {
    if ((int)co[i].size() > f) throw std::runtime_error("too many y-coefficients");
    for (int j = 0; j < (int)co[i].size(); ++j) {
      __int128 t = (__int128)co[i][j] % (__int128)M;
      if (t < 0) t += M;
      r.c[i * f + j] = (uint64_t)t;
    }
  }
  return r;
}
RElem Ring::lift_digit(int d) const {
  if (d < 0 || d >= q) throw std::runtime_error("bad residue digit");
  RElem r = zero();
  for (int j = 0; j < f; ++j) { r.c[j] = uint64_t(d % p); d /= p; }
  return r;
}

RElem Ring::add(const RElem& a, const RElem& b) const {
  check(a); check(b);
  RElem r = zero();
  for (int i = 0; i < e * f; ++i) r.c[i] = addm(a.c[i], b.c[i]);
  return r;
}
RElem Ring::sub(const RElem& a, const RElem& b) const {
  check(a); check(b);
  RElem r = zero();
  for (int i = 0; i < e * f; ++i) r.c[i] = subm(a.c[i], b.c[i]);
  return r;
}
RElem Ring::neg(const RElem& a) const {
  check(a);
  RElem r = zero();
  for (int i = 0; i < e * f; ++i) r.c[i] = a.c[i] ? M - a.c[i] : 0;
  return r;
}
RElem Ring::mul_i64(const RElem& a, long long s) const {
  check(a);
  __int128 t = (__int128)s % (__int128)M;
  if (t < 0) t += M;
  uint64_t su = (uint64_t)t;
  RElem r = zero();
  for (int i = 0; i < e * f; ++i) r.c[i] = mulm(a.c[i], su);
  return r;
}

RElem Ring::mul(const RElem& a, const RElem& b) const {
  check(a); check(b);
  if (e == 1) {
    RElem r = zero();
    wmul(a.c.data(), b.c.data(), r.c.data());
    return r;
  }
  // convolution over pi-slots ((2e-1)*f <= 2*kCap entries)
  uint64_t conv[2 * CoeffVec::kCap] = {0}, tmp[CoeffVec::kCap];
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      wmul(a.c.data() + i * f, b.c.data() + j * f, tmp);
      wadd(conv + (i + j) * f, tmp, conv + (i + j) * f);
    }
  // reduce pi^k for k >= e using pi^e = sum_i red[i] pi^i
  for (int k = 2 * e - 2; k >= e; --k) {
    uint64_t* ck = conv + k * f;
    bool nz = false;
    for (int j = 0; j < f; ++j) nz |= (ck[j] != 0);
    if (!nz) continue;
    for (int i = 0; i < e; ++i) {
      if (!red[i]) continue;
      wscal(ck, red[i], tmp);
      wadd(conv + (k - e + i) * f, tmp, conv + (k - e + i) * f);
    }
    wzero(ck);
  }
  RElem r = zero();
  std::copy(conv, conv + e * f, r.c.begin());
  return r;
}

RElem Ring::mul_pi(const RElem& a) const {
  check(a);
  if (e == 1) return mul_i64(a, p);
  RElem r = zero();
  // new_j = old_{j-1} (j>=1), plus old_{e-1}*red[j] everywhere
  const uint64_t* top = a.c.data() + (e - 1) * f;
  uint64_t tmp[CoeffVec::kCap];
  for (int j = e - 1; j >= 1; --j)
    std::copy(a.c.data() + (j - 1) * f, a.c.data() + j * f, r.c.data() + j * f);
  for (int i = 0; i < e; ++i) {
    if (!red[i]) continue;
    wscal(top, red[i], tmp);
    wadd(r.c.data() + i * f, tmp, r.c.data() + i * f);
  }
  return r;
}

RElem Ring::mul_pi_pow(const RElem& a, int k) const {
  if (k < 0) throw std::runtime_error("negative pi power");
  RElem r = a;
  for (int i = 0; i < k; ++i) r = mul_pi(r);
  return r;
}

RElem Ring::div_pi(const RElem& a) const {
  check(a);
  RElem z = zero();
  if (e == 1) {
    wdiv_p(a.c.data(), z.c.data());
    return z;
  }
  // a = pi*z: z_{e-1} = -(a_0/p) * u0^{-1}; z_{j-1} = a_j - z_{e-1}*red[j]
  std::vector<uint64_t> t(f), zt(f);
  wdiv_p(a.c.data(), t.data()); // a_0/p
  wmul(t.data(), u0inv.data(), zt.data());
  wneg(zt.data(), zt.data()); // z_{e-1}
  std::copy(zt.begin(), zt.end(), z.c.begin() + (e - 1) * f);
  for (int j = 1; j < e; ++j) {
    // a_j = z_{j-1} + z_{e-1} * red[j]  =>  z_{j-1} = a_j - z_{e-1}*red[j]
    wscal(zt.data(), red[j], t.data());
    wsub(a.c.data() + j * f, t.data(), z.c.data() + (j - 1) * f);
  }
  return z;
}

RElem Ring::div_pi_pow(const RElem& a, int k) const {
  if (k < 0) throw std::runtime_error("negative pi power");
  RElem r = a;
  for (int i = 0; i < k; ++i) r = div_pi(r);
  return r;
}

int Ring::ord(const RElem& a) const {
  check(a);
  int best = ORD_INF;
  for (int i = 0; i < e; ++i) {
    int v = wvp(a.c.data() + i * f);
    if (v >= Pw) continue;
    best = std::min(best, e * v + i);
  }
  return best >= P ? ORD_INF : best;
}

bool Ring::is_zero(const RElem& a) const {
  check(a);
  for (uint64_t v : a.c)
    if (v) return false;
  return true;
}
bool Ring::eq(const RElem& a, const RElem& b) const {
  check(a); check(b);
  return a.c == b.c;
}
bool Ring::eq_mod(const RElem& a, const RElem& b, int k) const {
  int d = ord(sub(a, b));
  return d >= k;
}

RElem Ring::inv(const RElem& a) const {
  if (ord(a) != 0) throw std::runtime_error("inverse of a non-unit");
  RElem y = lift_digit(gf.inv(digit_of(a)));
  int steps = 1;
  while ((1 << steps) < P) ++steps;
  ++steps;
  RElem twoel = from_int(2);
  for (int it = 0; it < steps; ++it) y = mul(y, sub(twoel, mul(a, y)));
  return y;
}

RElem Ring::div_exact(const RElem& a, const RElem& b) const {
  int s = ord(b);
  if (s >= ORD_INF) throw std::runtime_error("division by zero");
  RElem bu = div_pi_pow(b, s);
  RElem au = div_pi_pow(a, s); // throws if not divisible
  return mul(au, inv(bu));
}

RElem Ring::pow(const RElem& a, long long k) const {
  if (k < 0) throw std::runtime_error("negative ring power");
  RElem r = one(), base = a;
  while (k) {
    if (k & 1) r = mul(r, base);
    base = mul(base, base);
    k >>= 1;
  }
  return r;
}

// ===========================================================================
// residues
// ===========================================================================
int Ring::digit_of(const RElem& a) const {
  check(a);
  int d = 0, mult = 1;
  for (int j = 0; j < f; ++j) {
    d += int(a.c[j] % uint64_t(p)) * mult;
    mult *= p;
  }
  return d;
}

std::vector<int> Ring::digits(const RElem& a, int k) const {
  std::vector<int> out;
  out.reserve(k);
  RElem cur = a;
  for (int i = 0; i < k; ++i) {
    int d = digit_of(cur);
    out.push_back(d);
    cur = div_pi(sub(cur, lift_digit(d)));
  }
  return out;
}

RElem Ring::from_digits(const std::vector<int>& d) const {
  RElem r = zero();
  for (int i = (int)d.size() - 1; i >= 0; --i)
    r = add(mul_pi(r), lift_digit(d[i]));
  return r;
}

unsigned long long Ring::residue_count(int k) const {
  unsigned long long r = 1;
  for (int i = 0; i < k; ++i) {
    if (r > (3ULL << 60) / (unsigned long long)q)
      throw std::runtime_error("residue space too large to enumerate");
    r *= (unsigned long long)q;
  }
  return r;
}

RElem Ring::residue_elem(unsigned long long idx, int k) const {
  std::vector<int> d(k);
  for (int i = 0; i < k; ++i) { d[i] = int(idx % (unsigned long long)q); idx /= (unsigned long long)q; }
  return from_digits(d);
}

std::string Ring::key(const RElem& a, int k) const {
  std::vector<int> d = digits(a, k);
  std::string s(d.size(), '\0');
  for (size_t i = 0; i < d.size(); ++i) s[i] = char(d[i]);
  return s;
}

// ===========================================================================
// quadratic structure
// ===========================================================================
int Ring::quadratic_defect(const RElem& u) const {
  if (ord(u) != 0) throw std::runtime_error("quadratic defect wants a unit");
  int cap = 2 * e + 2;
  unsigned long long n = residue_count(cap);
  int best = 0;
  for (unsigned long long idx = 0; idx < n; ++idx) {
    RElem x = residue_elem(idx, cap);
    if (digit_of(x) == 0) continue; // non-units cannot improve on a unit
    int d = ord(sub(u, mul(x, x)));
    if (d > cap) d = cap;
    if (d > best) {
      best = d;
      if (best >= cap) break;
    }
  }
  if (best >= 2 * e + 1) return ORD_INF; // square (local square theorem)
  if (p != 2) {
    if (best != 0) throw std::runtime_error("impossible defect at odd p");
    return 0;
  }
  if (best == 2 * e) return 2 * e;
  if (best % 2 == 0) throw std::runtime_error("impossible even defect");
  return best;
}

std::pair<int, int> Ring::ext_type(const RElem& D) const {
  int v = ord(D);
  if (v >= ORD_INF) throw std::runtime_error("ext_type of zero");
  RElem u = div_pi_pow(D, v);
  if (p != 2) {
    if (v % 2) return {0, 1};
    int d0 = quadratic_defect(u);
    return d0 == ORD_INF ? std::make_pair(1, 0) : std::make_pair(-1, 0);
  }
  if (v % 2) return {0, 2 * e + 1};
  int d0 = quadratic_defect(u);
  if (d0 == ORD_INF) return {1, 0};
  if (d0 == 2 * e) return {-1, 0};
  return {0, 2 * e - d0 + 1};
}

int Ring::hilbert(const RElem& a_in, const RElem& b_in) const {
  RElem a = a_in, b = b_in;
  int va = ord(a), vb = ord(b);
  if (va >= ORD_INF || vb >= ORD_INF)
    throw std::runtime_error("hilbert symbol of zero");
  while (va >= 2) { a = div_pi_pow(a, 2); va -= 2; }
  while (vb >= 2) { b = div_pi_pow(b, 2); vb -= 2; }
  int Mprec = 2 * e + 2 * std::max(va, vb) + 1;
  unsigned long long n = residue_count(Mprec);
  if (n * n > (1ULL << 28))
    throw std::runtime_error("hilbert enumeration budget exceeded");
  auto it = sq_cache_.find(Mprec);
  if (it == sq_cache_.end()) {
    std::set<std::string> all, unit;
    for (unsigned long long idx = 0; idx < n; ++idx) {
      RElem z = residue_elem(idx, Mprec);
      std::string k = key(mul(z, z), Mprec);
      all.insert(k);
      if (digit_of(z) != 0) unit.insert(k);
    }
    it = sq_cache_.emplace(Mprec, std::make_pair(std::move(all), std::move(unit)))
             .first;
  }
  const auto& all = it->second.first;
  const auto& unit = it->second.second;
  for (unsigned long long ix = 0; ix < n; ++ix) {
    RElem x = residue_elem(ix, Mprec);
    RElem ax2 = mul(a, mul(x, x));
    bool xu = digit_of(x) != 0;
    for (unsigned long long iy = 0; iy < n; ++iy) {
      RElem y = residue_elem(iy, Mprec);
      RElem t = add(ax2, mul(b, mul(y, y)));
      bool prim_xy = xu || (digit_of(y) != 0);
      const auto& s = prim_xy ? all : unit;
      if (s.count(key(t, Mprec))) return +1;
    }
  }
  return -1;
}

// ===========================================================================
// operators
// ===========================================================================
static const Ring* same_ring(const RElem& a, const RElem& b) {
  if (a.R == nullptr || a.R != b.R) throw std::runtime_error("ring mismatch");
  return a.R;
}
RElem operator+(const RElem& a, const RElem& b) { return same_ring(a, b)->add(a, b); }
RElem operator-(const RElem& a, const RElem& b) { return same_ring(a, b)->sub(a, b); }
RElem operator*(const RElem& a, const RElem& b) { return same_ring(a, b)->mul(a, b); }
RElem operator-(const RElem& a) { return a.R->neg(a); }
bool operator==(const RElem& a, const RElem& b) { return same_ring(a, b)->eq(a, b); }
bool operator!=(const RElem& a, const RElem& b) { return !(a == b); }

} // namespace qlat
