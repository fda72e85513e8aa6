#pragma once
// Exact arithmetic in finite extensions of the p-adic integers, presented as
//   o = W[pi] / (E(pi), p^Pw)
// where W = (Z/p^Pw)[y]/(h(y)) is the unramified layer (h monic irreducible of
// degree f over GF(p)) and E(pi) = pi^e + p*(u_{e-1} pi^{e-1} + ... + u_0) is an
// Eisenstein polynomial (u_0 a unit).  Elements are stored as e W-coefficients,
// each a vector of f residues mod p^Pw, always kept canonical.
//
// Precision contract: every element is exact modulo pi^P with P = e*Pw, except
// that each exact division by pi (or by p) loses one W-digit of significance in
// the quotient.  P is chosen far larger than any division chain used here, so
// all invariants computed from these elements (orders, residues, defects) are
// exact.  An element that is zero at working precision has ord() == ORD_INF.
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlat {

constexpr int ORD_INF = 1 << 28; // sentinel: zero at working precision

// ---------------------------------------------------------------------------
// GF(p^f): tiny residue-field arithmetic with log/antilog tables (q <= 81).
// Element = index in [0, q), whose base-p digits are the coefficients of y^j.
// ---------------------------------------------------------------------------
struct GF {
  int p = 2, f = 1, q = 2;
  std::vector<int> exp_tab, log_tab;

  GF() = default;
  GF(int p_, int f_);

  int add(int a, int b) const;
  int sub(int a, int b) const;
  int neg(int a) const;
  int mul(int a, int b) const;
  int inv(int a) const;
  int pow(int a, long long k) const;
  // Unique square root in characteristic 2; for odd p returns -1 if a is a
  // non-square.
  int sqrt(int a) const;

  // Coefficients h_0..h_{f-1} of a fixed monic irreducible h of degree f.
  static std::vector<int> modpoly(int p_, int f_);

 private:
  int raw_mul(int a, int b) const; // polynomial mult mod (h, p), no tables
};

struct Ring;

// Inline coefficient storage for ring elements.  Element arithmetic is hot
// enough that heap-backed storage dominates the runtime, so the e*f
// coefficients live inline; the Ring constructor rejects presentations that
// would not fit.
struct CoeffVec {
  static constexpr int kCap = 12;
  uint64_t v[kCap];
  int n = 0;

  CoeffVec() = default;
  CoeffVec(size_t count, uint64_t fill) {
    if (count > kCap) throw std::length_error("ring presentation too large");
    n = (int)count;
    for (int i = 0; i < n; ++i) v[i] = fill;
  }
  size_t size() const { return (size_t)n; }
  uint64_t* data() { return v; }
  const uint64_t* data() const { return v; }
  uint64_t& operator[](size_t i) { return v[i]; }
  uint64_t operator[](size_t i) const { return v[i]; }
  uint64_t* begin() { return v; }
  const uint64_t* begin() const { return v; }
  uint64_t* end() { return v + n; }
  const uint64_t* end() const { return v + n; }
  friend bool operator==(const CoeffVec& a, const CoeffVec& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (a.v[i] != b.v[i]) return false;
    return true;
  }
};

// An element of the ring o; carries a pointer to its ring so that natural
// operator syntax works.  Binary operations require identical rings.
struct RElem {
  const Ring* R = nullptr;
  CoeffVec c; // e*f entries; c[i*f + j] = coeff of y^j pi^i

  RElem() = default;
  RElem(const Ring* ring, CoeffVec coeffs) : R(ring), c(coeffs) {}
};

RElem operator+(const RElem& a, const RElem& b);
RElem operator-(const RElem& a, const RElem& b);
RElem operator*(const RElem& a, const RElem& b);
RElem operator-(const RElem& a);
bool operator==(const RElem& a, const RElem& b);
bool operator!=(const RElem& a, const RElem& b);

// ---------------------------------------------------------------------------
// Ring
// ---------------------------------------------------------------------------
struct Ring {
  int p = 2;       // residue characteristic
  int f = 1;       // residue degree; q = p^f
  int e = 1;       // ramification index
  int Pw = 0;      // W-precision (p-digits per W coefficient)
  int q = 2;       // residue field size
  int P = 0;       // pi-adic working precision = e*Pw
  uint64_t M = 0;  // p^Pw
  GF gf;
  // Internal little-endian Eisenstein data: eis[i] = u_i with
  // pi^e = -p*(u_{e-1} pi^{e-1} + ... + u_0).  For e == 1 this is {-1},
  // making pi == p.
  std::vector<uint64_t> eis;
  std::vector<uint64_t> red;   // red[i] = (-p*u_i) mod M, the reduction row
  std::vector<uint64_t> u0inv; // W-inverse of u_0 (length f)

  // eis_big_endian = [u_{e-1}, ..., u_0]; must have length e when e > 1 and
  // unit trailing entry.  Ignored when e == 1.  Pw_ == 0 picks a default.
  Ring(int p_, int f_, int e_, std::vector<long long> eis_big_endian = {},
       int Pw_ = 0);

  std::string describe() const; // human-readable parameters
  std::string ring_key() const; // canonical key for caches

  // --- factories ---
  RElem zero() const;
  RElem one() const;
  RElem two() const { return from_int(2); }
  RElem pi() const;
  RElem from_int(long long v) const;
  // co[i][j]: integer coefficient of y^j pi^i; rows/cols beyond bounds must be
  // absent; shorter rows are zero-padded.
  RElem from_coeffs(const std::vector<std::vector<long long>>& co) const;
  RElem lift_digit(int d) const; // residue-field index -> element

  // --- arithmetic (all results canonical) ---
  RElem add(const RElem& a, const RElem& b) const;
  RElem sub(const RElem& a, const RElem& b) const;
  RElem neg(const RElem& a) const;
  RElem mul(const RElem& a, const RElem& b) const;
  RElem mul_i64(const RElem& a, long long s) const;
  RElem mul_pi(const RElem& a) const;
  RElem mul_pi_pow(const RElem& a, int k) const; // k >= 0
  RElem div_pi(const RElem& a) const;            // exact; requires ord >= 1
  RElem div_pi_pow(const RElem& a, int k) const;
  RElem inv(const RElem& a) const;               // requires ord == 0
  RElem div_exact(const RElem& a, const RElem& b) const; // requires pi^ord(b) | a
  RElem pow(const RElem& a, long long k) const;  // k >= 0

  int ord(const RElem& a) const; // ORD_INF when zero at precision
  bool is_zero(const RElem& a) const;
  bool eq(const RElem& a, const RElem& b) const;
  bool eq_mod(const RElem& a, const RElem& b, int k) const; // ord(a-b) >= k

  // --- residues mod pi^k ---
  int digit_of(const RElem& a) const;              // class of a mod pi
  std::vector<int> digits(const RElem& a, int k) const;
  RElem from_digits(const std::vector<int>& d) const;
  unsigned long long residue_count(int k) const;   // q^k; throws if >= 2^62
  RElem residue_elem(unsigned long long idx, int k) const;
  std::string key(const RElem& a, int k) const;    // canonical residue key

  // --- quadratic structure ---
  // Quadratic defect of a unit u: the largest d <= 2e+2 with u - x^2 of order
  // >= d for some x, mapped to its invariant meaning: ORD_INF if u is a
  // square, 2e for the unramified-extension class, else an odd value < 2e.
  int quadratic_defect(const RElem& u) const;
  // Classifies the quadratic extension F(sqrt(D))/F for D != 0:
  // returns (xi, d) with xi = +1 split / -1 unramified / 0 ramified, and d the
  // valuation of the relative discriminant.
  std::pair<int, int> ext_type(const RElem& D) const;
  // Hilbert symbol <a, b> in {+1, -1}: +1 iff a x^2 + b y^2 = z^2 has a
  // nontrivial solution.  Decided exactly by enumerating primitive solutions
  // to sufficient precision and Hensel's lemma.
  int hilbert(const RElem& a, const RElem& b) const;

  // --- W layer (spans of length f); exposed for tests ---
  void wzero(uint64_t* a) const;
  void wadd(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
  void wsub(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
  void wneg(const uint64_t* a, uint64_t* out) const;
  void wscal(const uint64_t* a, uint64_t s, uint64_t* out) const;
  void wmul(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
  int wvp(const uint64_t* a) const;                 // min p-valuation, Pw if 0
  void wdiv_p(const uint64_t* a, uint64_t* out) const; // exact division by p
  std::vector<uint64_t> winv(const std::vector<uint64_t>& x) const;

  uint64_t addm(uint64_t a, uint64_t b) const;
  uint64_t subm(uint64_t a, uint64_t b) const;
  uint64_t mulm(uint64_t a, uint64_t b) const;

 private:
  void check(const RElem& a) const;
  mutable std::map<int, std::pair<std::set<std::string>, std::set<std::string>>>
      sq_cache_; // per-precision square residue keys (all / unit squares)
};

} // namespace qlat
