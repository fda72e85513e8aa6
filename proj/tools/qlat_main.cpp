// Command-line front end: parse ring/matrix JSON, dispatch to the library,
// and emit machine-readable reports.  One job per process; all output is
// deterministic for a fixed seed and cache state.
//
// Exit codes: 0 success, 2 malformed input, 3 budget exhausted,
// 4 internal invariant violation (including failed suite batteries).
#include "qlat/density.hpp"
#include "qlat/json_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace qlat;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// shared options and small utilities
// ---------------------------------------------------------------------------
struct Opt {
  std::string ring;    // inline ring JSON
  std::string matrix;  // inline matrix JSON or a file path
  std::string matrix2; // second lattice for comparisons
  int N = -1;
  long long budget = 0;
  unsigned long long seed = 0;
  std::string cache;
  std::string format; // empty = per-command default
};

std::string slurp_or_inline(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && arg[0] != '{' && std::filesystem::exists(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file: " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

ParsedMat load_matrix(const Opt& opt, const std::string& which = "--matrix") {
  const std::string& raw = which == "--matrix" ? opt.matrix : opt.matrix2;
  if (raw.empty()) throw std::invalid_argument(which + " is required");
  std::shared_ptr<Ring> ring;
  if (!opt.ring.empty()) ring = ring_from_json(opt.ring);
  return mat_from_json(slurp_or_inline(raw), std::move(ring));
}

SearchOpts search_opts(const Opt& opt) {
  SearchOpts so;
  so.seed = opt.seed;
  if (opt.budget > 0) so.budget = (uint64_t)opt.budget;
  return so;
}

CountOpts count_opts(const Opt& opt) {
  CountOpts co;
  if (opt.budget > 0) {
    co.node_budget = opt.budget;
    co.enum_budget = opt.budget;
  }
  return co;
}

std::string resolved_format(const Opt& opt, const char* dflt) {
  return opt.format.empty() ? dflt : opt.format;
}

// ---------------------------------------------------------------------------
// table rendering (csv / md / json) with deterministic cell contents
// ---------------------------------------------------------------------------
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void emit_table(std::ostream& os, const std::string& fmt,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows,
                const std::string& name = "") {
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json obj;
      if (!name.empty()) obj["table"] = name;
      for (size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
      arr.push_back(std::move(obj));
    }
    os << arr.dump() << "\n";
    return;
  }
  if (fmt == "md") {
    if (!name.empty()) os << "### " << name << "\n";
    os << "|";
    for (const auto& h : header) os << " " << h << " |";
    os << "\n|";
    for (size_t i = 0; i < header.size(); ++i) os << " --- |";
    os << "\n";
    for (const auto& r : rows) {
      os << "|";
      for (const auto& c : r) os << " " << c << " |";
      os << "\n";
    }
    return;
  }
  // csv
  if (!name.empty()) os << "# " << name << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << csv_cell(header[i]);
  os << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << "\n";
  }
}

std::string join_ints(const std::vector<int>& v, const char* sep = " ") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

std::string egk_cell(const EGK& e) {
  if (e.n.empty() && e.m.empty() && e.zeta.empty()) return "()";
  return egk_str(e);
}

// key/value rendering of a JSON object for the csv/md formats
void emit_kv(std::ostream& os, const std::string& fmt, const json& obj) {
  std::vector<std::vector<std::string>> rows;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const json& v = it.value();
    rows.push_back({it.key(), v.is_string() ? v.get<std::string>() : v.dump()});
  }
  emit_table(os, fmt, {"field", "value"}, rows);
}

void emit_object(std::ostream& os, const Opt& opt, const std::string& dumped) {
  std::string fmt = resolved_format(opt, "json");
  if (fmt == "json") {
    os << dumped << "\n";
  } else {
    emit_kv(os, fmt, json::parse(dumped));
  }
}

// ---------------------------------------------------------------------------
// closed-form rank-2 density, rendered structurally: the component count in
// front is kept separate from the power of the residue size so the rendering
// does not depend on whether the two collide numerically (q = 2).
// ---------------------------------------------------------------------------
struct ClosedBinary {
  Rat value;
  std::string rendered;
};

ClosedBinary closed_binary(BinaryKind kind, int e, long long q, int g, int f,
                           int xi) {
  DensityReport rep = binary_beta(kind, e, q, g, f, xi);
  ClosedBinary out;
  out.value = rep.beta;
  int coeff = 1;
  long long expo = 0;
  bool pow_form = true;
  switch (kind) {
    case BinaryKind::unramified:
      if (f == 0) pow_form = false;
      else if (f <= 2 * e) expo = f / 2 + 2LL * f;
      else { coeff = 2; expo = e + 2LL * f; }
      break;
    case BinaryKind::ramified_even:
      if (f < g) { coeff = 2; expo = 3LL * f + 2 * g; }
      else if (f <= 2 * e - g) expo = (f + g) / 2 + 2LL * f + 2 * g;
      else { coeff = 2; expo = 2LL * f + e + 2 * g; }
      break;
    case BinaryKind::ramified_odd:
      coeff = 2;
      expo = f < e + 1 ? 3LL * f + 2 * e + 1 : 2LL * f + 3 * e + 1;
      break;
  }
  if (!pow_form) {
    out.rendered = out.value.str();
    return out;
  }
  if (Rat(coeff) * rat_qpow(q, expo) != rep.beta)
    throw std::logic_error("closed_binary: structural form disagrees with the value");
  out.rendered = (coeff == 1 ? std::string() : std::to_string(coeff) + "*") +
                 "q^" + std::to_string(expo);
  return out;
}

BinaryKind kind_of(int d) {
  if (d == 0) return BinaryKind::unramified;
  return d % 2 == 0 ? BinaryKind::ramified_even : BinaryKind::ramified_odd;
}

// ---------------------------------------------------------------------------
// density cache: versioned JSON-lines store addressed by the content of the
// request (ring key, matrix, precision target, method)
// ---------------------------------------------------------------------------
uint64_t fnv64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = d[v & 15];
    v >>= 4;
  }
  return s;
}

Rat parse_rat(const std::string& s) {
  auto parse_i128 = [](const std::string& t) {
    if (t.empty()) throw std::runtime_error("empty rational component");
    size_t i = 0;
    bool neg = t[0] == '-';
    if (neg) i = 1;
    if (i >= t.size()) throw std::runtime_error("bad rational");
    i128 v = 0;
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') throw std::runtime_error("bad rational");
      v = v * 10 + (t[i] - '0');
    }
    return neg ? -v : v;
  };
  size_t slash = s.find('/');
  if (slash == std::string::npos) return Rat(parse_i128(s), 1);
  return Rat(parse_i128(s.substr(0, slash)), parse_i128(s.substr(slash + 1)));
}

struct CacheKey {
  std::string ring, matrix, method;
  int N = -1;
};

std::filesystem::path cache_file(const std::string& dir) {
  return std::filesystem::path(dir) / "qlat-cache-v1.jsonl";
}

bool cache_lookup(const std::string& dir, const CacheKey& key, DensityReport& rep) {
  std::ifstream in(cache_file(dir));
  if (!in) return false;
  const std::string rh = hex64(fnv64(key.ring)), mh = hex64(fnv64(key.matrix));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (j.value("v", 0) != 1) continue;
      if (j.value("rh", "") != rh || j.value("mh", "") != mh) continue;
      if (j.value("ring", "") != key.ring || j.value("matrix", "") != key.matrix)
        continue;
      if (j.value("N", -2) != key.N || j.value("method", "") != key.method)
        continue;
      rep.alpha = parse_rat(j.at("alpha").get<std::string>());
      rep.beta = parse_rat(j.at("beta").get<std::string>());
      rep.beta_C = parse_rat(j.at("beta_C").get<std::string>());
      rep.method = j.at("method_used").get<std::string>();
      rep.N_used = j.at("N_used").get<int>();
      rep.stabilized = j.at("stabilized").get<bool>();
      return true;
    } catch (const std::exception&) {
      continue; // unreadable line: treat as a miss
    }
  }
  return false;
}

void cache_store(const std::string& dir, const CacheKey& key,
                 const DensityReport& rep) {
  std::filesystem::create_directories(dir);
  json j;
  j["v"] = 1;
  j["rh"] = hex64(fnv64(key.ring));
  j["mh"] = hex64(fnv64(key.matrix));
  j["ring"] = key.ring;
  j["matrix"] = key.matrix;
  j["N"] = key.N;
  j["method"] = key.method;
  j["alpha"] = rep.alpha.str();
  j["beta"] = rep.beta.str();
  j["beta_C"] = rep.beta_C.str();
  j["method_used"] = rep.method;
  j["N_used"] = rep.N_used;
  j["stabilized"] = rep.stabilized;
  std::ofstream out(cache_file(dir), std::ios::app);
  if (!out) throw std::runtime_error("cannot write cache file in " + dir);
  out << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------
int cmd_gk(const Opt& opt) {
  ParsedMat pm = load_matrix(opt);
  GKResult r = gk(pm.T, search_opts(opt));
  emit_object(std::cout, opt, gk_json(r));
  return 0;
}

int cmd_egk(const Opt& opt) {
  ParsedMat pm = load_matrix(opt);
  EGK e = egk(pm.T, search_opts(opt));
  emit_object(std::cout, opt, egk_json(e));
  return 0;
}

std::vector<std::pair<int, EGK>> trunc_profile(const Mat& T, const SearchOpts& so) {
  Jordan J = jordan_split(T);
  std::vector<std::pair<int, EGK>> prof;
  for (const auto& P : J.parts)
    prof.emplace_back(P.scale, egk_trunc(sublattice_around(J, P.scale), so));
  return prof;
}

int cmd_egk_trunc(const Opt& opt) {
  ParsedMat pm = load_matrix(opt);
  auto prof = trunc_profile(pm.T, search_opts(opt));
  std::string fmt = resolved_format(opt, "json");
  if (fmt == "json") {
    std::cout << trunc_profile_json(prof) << "\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [scale, e] : prof)
      rows.push_back({std::to_string(scale), egk_cell(e)});
    emit_table(std::cout, fmt, {"scale", "egk"}, rows);
  }
  return 0;
}

int cmd_jordan(const Opt& opt) {
  ParsedMat pm = load_matrix(opt);
  Jordan J = jordan_split(pm.T);
  emit_object(std::cout, opt, jordan_json(J));
  return 0;
}

int cmd_density(const Opt& opt) {
  ParsedMat pm = load_matrix(opt);
  DensityReport rep;
  if (!opt.cache.empty()) {
    CacheKey key{pm.ring->ring_key(), mat_to_json(pm.T), "counted-lifted", opt.N};
    if (!cache_lookup(opt.cache, key, rep)) {
      rep = alpha_beta(pm.T, opt.N, count_opts(opt));
      cache_store(opt.cache, key, rep);
    }
  } else {
    rep = alpha_beta(pm.T, opt.N, count_opts(opt));
  }
  emit_object(std::cout, opt, density_json(rep));
  return 0;
}

int cmd_binary(const Opt& opt, int xi, int d, int f) {
  if (opt.ring.empty()) throw std::invalid_argument("--ring is required");
  auto ring = ring_from_json(opt.ring);
  const Ring& R = *ring;
  BinaryLattice L = make_binary(R, xi, d, f);
  BinaryProfile prof = binary_profile(R, xi, d, f);
  ClosedBinary cb = closed_binary(kind_of(d), R.e, R.q, d / 2, f, xi);
  DensityReport rep = binary_beta(kind_of(d), R.e, R.q, d / 2, f, xi);
  json j;
  j["xi"] = xi;
  j["d"] = d;
  j["f"] = f;
  j["kind"] = d == 0 ? "unramified" : (d % 2 == 0 ? "ramified-even" : "ramified-odd");
  j["jordan_scales"] = prof.jordan_scales;
  j["block_gk"] = {prof.block_gk.first, prof.block_gk.second};
  j["trunc"] = json::parse(egk_json(prof.trunc));
  j["double_gk"] = prof.double_gk;
  j["alpha"] = rep.alpha.str();
  j["beta"] = rep.beta.str();
  j["beta_q"] = cb.rendered;
  j["beta_C"] = rep.beta_C.str();
  j["method"] = rep.method;
  j["matrix"] = json::parse(mat_to_json(L.T));
  emit_object(std::cout, opt, j.dump());
  return 0;
}

int cmd_theorem_check(const Opt& opt) {
  ParsedMat pmL = load_matrix(opt, "--matrix");
  if (opt.matrix2.empty()) throw std::invalid_argument("--matrix2 is required");
  ParsedMat pmM{pmL.ring,
                mat_from_json(slurp_or_inline(opt.matrix2), pmL.ring).T};
  TheoremVerdict v = theorem_check(pmL.T, pmM.T, count_opts(opt));
  emit_object(std::cout, opt, theorem_json(v));
  return 0;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------
void example_table(std::ostream& os, const std::string& fmt, bool named) {
  std::vector<std::vector<std::string>> rows;
  for (const BinaryExampleRow& r : example_a1_report()) {
    rows.push_back({std::to_string(r.d), std::to_string(r.f),
                    join_ints(r.double_gk), join_ints(r.jordan_scales),
                    egk_cell(r.trunc), r.beta_q, "binary-closed"});
  }
  emit_table(os, fmt, {"d", "f", "gk_double", "jordan", "trunc", "beta", "method"},
             rows, named ? "binary-pair-example" : "");
}

void case_table(std::ostream& os, const std::string& fmt, bool named) {
  struct Case {
    BinaryKind kind;
    const char* kind_name;
    int e, d, f, xi;
    const char* cond;
  };
  const Case cases[] = {
      {BinaryKind::unramified, "unramified", 1, 0, 0, 1, "f = 0"},
      {BinaryKind::unramified, "unramified", 1, 0, 0, -1, "f = 0"},
      {BinaryKind::unramified, "unramified", 1, 0, 2, 1, "0 < f <= 2e"},
      {BinaryKind::unramified, "unramified", 1, 0, 3, 1, "f > 2e"},
      {BinaryKind::ramified_even, "ramified-even", 2, 4, 1, 0, "0 <= f < g"},
      {BinaryKind::ramified_even, "ramified-even", 2, 2, 2, 0, "g <= f <= 2e-g"},
      {BinaryKind::ramified_even, "ramified-even", 1, 2, 2, 0, "f > 2e-g"},
      {BinaryKind::ramified_odd, "ramified-odd", 1, 3, 0, 0, "0 <= f < e+1"},
      {BinaryKind::ramified_odd, "ramified-odd", 1, 3, 2, 0, "f >= e+1"},
  };
  std::vector<std::vector<std::string>> rows;
  for (const Case& c : cases) {
    ClosedBinary cb = closed_binary(c.kind, c.e, 2, c.d / 2, c.f, c.xi);
    rows.push_back({c.kind_name, std::to_string(c.e), "2", std::to_string(c.d),
                    std::to_string(c.f), std::to_string(c.xi), c.cond,
                    cb.rendered, "binary-closed"});
  }
  emit_table(os, fmt,
             {"kind", "e", "q", "d", "f", "xi", "condition", "beta", "method"},
             rows, named ? "binary-closed-form-cases" : "");
}

int cmd_tables(const Opt& opt, bool example_a1) {
  std::string fmt = resolved_format(opt, "csv");
  if (example_a1) {
    example_table(std::cout, fmt, false);
    return 0;
  }
  if (fmt == "json") {
    // one array with a "table" discriminator per row
    std::ostringstream a, b;
    example_table(a, fmt, true);
    case_table(b, fmt, true);
    json ja = json::parse(a.str()), jb = json::parse(b.str());
    for (auto& r : jb) ja.push_back(std::move(r));
    std::cout << ja.dump() << "\n";
    return 0;
  }
  example_table(std::cout, fmt, true);
  std::cout << "\n";
  case_table(std::cout, fmt, true);
  return 0;
}

// ---------------------------------------------------------------------------
// suite: deterministic invariant batteries with pass/fail counts
// ---------------------------------------------------------------------------
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

Mat rand_doubled(const Ring& R, Rng& g, int n, long long span) {
  std::vector<std::vector<long long>> rows(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) {
    rows[i][i] = 2 * (g.ri(2 * span + 1) - span);
    for (int j = i + 1; j < n; ++j)
      rows[i][j] = rows[j][i] = g.ri(2 * span + 1) - span;
  }
  return Mat::from_ints(&R, rows);
}

Mat rand_doubled_nondeg(const Ring& R, Rng& g, int n, long long span) {
  for (int tries = 0; tries < 1000; ++tries) {
    Mat T = rand_doubled(R, g, n, span);
    if (!R.is_zero(mat_det(T))) return T;
  }
  throw std::logic_error("random nondegenerate lattice: generator starved");
}

Mat mat_scale_unit(const Mat& T, const RElem& u) {
  Mat S = T;
  for (RElem& x : S.a) x = T.R->mul(x, u);
  return S;
}

struct Battery {
  std::string name;
  std::string method;
  long long pass = 0, fail = 0;
  void tally(bool ok) { ok ? ++pass : ++fail; }
};

Battery battery_double_scaling(const Ring& R, uint64_t seed, int count) {
  Battery b{"gk-double-scaling", "search-certified", 0, 0};
  Rng g(seed ^ 0xa5a5a5a5ULL);
  for (int i = 0; i < count; ++i) {
    int n = 1 + (int)g.ri(3);
    Mat T = rand_doubled_nondeg(R, g, n, 8);
    GKResult r1 = gk(T);
    GKResult r2 = gk(mat_scale_pi(T, R.e));
    bool ok = r1.certified && r2.certified && r1.a.size() == r2.a.size();
    if (ok)
      for (size_t k = 0; k < r1.a.size(); ++k)
        if (r2.a[k] != r1.a[k] + 1) ok = false;
    b.tally(ok);
  }
  return b;
}

Battery battery_unit_invariance(const Ring& R, uint64_t seed, int count) {
  Battery b{"gk-unit-invariance", "search-certified", 0, 0};
  Rng g(seed ^ 0x5a5a5a5aULL);
  for (int i = 0; i < count; ++i) {
    int n = 1 + (int)g.ri(3);
    Mat T = rand_doubled_nondeg(R, g, n, 8);
    long long u = 2 * g.ri(8) + 3; // odd unit > 1
    GKResult r1 = gk(T);
    GKResult r2 = gk(mat_scale_unit(T, R.from_int(u)));
    b.tally(r1.certified && r2.certified && r1.a == r2.a);
  }
  return b;
}

// Exhaustive sweep of rank <= 2 doubled Gram matrices whose entries run over
// unit-class representatives times bounded powers of two, certified search
// against the rank-2 closed form (and the order of the entry at rank 1).
Battery battery_rank2_closed(const Ring& R, int vdiag, int voff) {
  Battery b{"rank2-closed-form", "search-vs-closed", 0, 0};
  std::vector<long long> diag{0}, off{0};
  for (int v = 0; v <= vdiag; ++v)
    for (long long u : {1, 3, 5, 7}) diag.push_back(u << v);
  for (int v = 0; v <= voff; ++v)
    for (long long u : {1, 3, 5, 7}) off.push_back(u << v);
  for (long long d : diag) {
    if (d == 0) continue;
    GKResult r = gk(Mat::from_ints(&R, {{2 * d}}));
    int want = 0;
    for (long long t = d; t % 2 == 0; t /= 2) ++want;
    b.tally(r.certified && r.a == std::vector<int>{want});
  }
  for (long long d1 : diag)
    for (long long d2 : diag)
      for (long long c : off) {
        Mat T = Mat::from_ints(&R, {{2 * d1, c}, {c, 2 * d2}});
        if (R.is_zero(mat_det(T))) continue;
        auto closed = gk_binary_values(T);
        GKResult r = gk(T);
        b.tally(r.certified && r.a.size() == 2 && r.a[0] == closed.first &&
                r.a[1] == closed.second);
      }
  return b;
}

Battery battery_counter_agreement(const Ring& R, uint64_t seed, int count) {
  Battery b{"counter-agreement", "counted-naive-vs-lifted", 0, 0};
  Rng g(seed ^ 0x3c3c3c3cULL);
  for (int i = 0; i < count; ++i) {
    int m = 1 + (int)g.ri(2);
    int n = 1 + (int)g.ri(m);
    Mat TA = rand_doubled(R, g, m, 4);
    Mat TB = rand_doubled(R, g, n, 4);
    int N = 2 + (int)g.ri(2);
    b.tally(count_naive(TB, TA, N) == count_lifted(TB, TA, N));
  }
  return b;
}

Battery battery_trunc_closed(const Ring& R, int stride) {
  Battery b{"truncated-datum-closed-form", "search-vs-closed", 0, 0};
  std::vector<Mat> corpus = corpus_z2(R);
  for (size_t i = 0; i < corpus.size(); i += (size_t)stride) {
    try {
      Jordan J = jordan_split(corpus[i]);
      bool ok = true;
      for (const auto& P : J.parts) {
        Mat Ai = sublattice_around(J, P.scale);
        // egk_trunc cross-checks the search result against the closed form
        // internally on this ring; agreement is re-checked here regardless.
        if (egk_trunc(Ai) != egk_trunc_closed_e1(Ai)) ok = false;
      }
      b.tally(ok);
    } catch (const std::exception&) {
      b.tally(false);
    }
  }
  return b;
}

Battery battery_stabilization(const Ring& R, int stride) {
  Battery b{"density-stabilization", "counted-lifted", 0, 0};
  std::vector<Mat> corpus = corpus_z2(R);
  for (size_t i = 0; i < corpus.size(); i += (size_t)stride) {
    try {
      DensityReport rep = alpha_beta(corpus[i]);
      b.tally(rep.stabilized);
    } catch (const std::exception&) {
      b.tally(false);
    }
  }
  return b;
}

int cmd_suite(const Opt& opt) {
  Ring R(2, 1, 1);
  std::vector<Battery> bs;
  bs.push_back(battery_double_scaling(R, opt.seed, 100));
  bs.push_back(battery_unit_invariance(R, opt.seed, 100));
  bs.push_back(battery_rank2_closed(R, 2, 3));
  bs.push_back(battery_counter_agreement(R, opt.seed, 60));
  bs.push_back(battery_trunc_closed(R, 7));
  bs.push_back(battery_stabilization(R, 9));
  long long pass = 0, fail = 0;
  for (const Battery& b : bs) {
    pass += b.pass;
    fail += b.fail;
  }
  std::string fmt = resolved_format(opt, "json");
  if (fmt == "json") {
    json arr = json::array();
    for (const Battery& b : bs) {
      json j;
      j["name"] = b.name;
      j["method"] = b.method;
      j["pass"] = b.pass;
      j["fail"] = b.fail;
      arr.push_back(std::move(j));
    }
    json out;
    out["batteries"] = std::move(arr);
    out["pass"] = pass;
    out["fail"] = fail;
    std::cout << out.dump() << "\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const Battery& b : bs)
      rows.push_back({b.name, std::to_string(b.pass), std::to_string(b.fail),
                      b.method});
    rows.push_back({"total", std::to_string(pass), std::to_string(fail), ""});
    emit_table(std::cout, fmt, {"battery", "pass", "fail", "method"}, rows);
  }
  return fail == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact invariants and local densities of quadratic lattices "
               "over dyadic local rings"};
  app.require_subcommand(1);
  Opt opt;
  bool example_a1 = false;
  int xi = 0, d = 0, f = 0;

  auto add_common = [&](CLI::App* sub, bool matrix, bool matrix2 = false) {
    sub->add_option("--ring", opt.ring, "ring spec as inline JSON");
    if (matrix)
      sub->add_option("--matrix", opt.matrix,
                      "doubled Gram matrix: inline JSON or a file path");
    if (matrix2)
      sub->add_option("--matrix2", opt.matrix2,
                      "second lattice (same ring): inline JSON or a file path");
    sub->add_option("--N", opt.N, "precision target override");
    sub->add_option("--budget", opt.budget, "search/count budget override");
    sub->add_option("--seed", opt.seed, "search seed (default 0)");
    sub->add_option("--cache", opt.cache, "density cache directory");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "md"}));
  };

  CLI::App* c_gk = app.add_subcommand("gk", "invariant of a doubled Gram matrix");
  add_common(c_gk, true);
  CLI::App* c_egk = app.add_subcommand("egk", "extended datum (dyadic rings)");
  add_common(c_egk, true);
  CLI::App* c_egkt = app.add_subcommand(
      "egk-trunc", "truncated datum of every normalized block sublattice");
  add_common(c_egkt, true);
  CLI::App* c_jor = app.add_subcommand("jordan", "block (Jordan) splitting");
  add_common(c_jor, true);
  CLI::App* c_den =
      app.add_subcommand("density", "counted representation density alpha/beta");
  add_common(c_den, true);
  CLI::App* c_bin = app.add_subcommand(
      "binary", "closed-form invariants and density of a rank-2 lattice");
  add_common(c_bin, false);
  c_bin->add_option("--xi", xi, "discriminant class: +1 split, -1 unramified, 0 ramified");
  c_bin->add_option("--d", d, "discriminant valuation (0, even 2g, or 2e+1)");
  c_bin->add_option("--f", f, "conductor exponent (f >= 0)");
  CLI::App* c_thm = app.add_subcommand(
      "theorem-check", "compare invariants and counted densities of two lattices");
  add_common(c_thm, true, true);
  CLI::App* c_suite =
      app.add_subcommand("suite", "deterministic invariant batteries");
  add_common(c_suite, false);
  CLI::App* c_tab = app.add_subcommand("tables", "reference tables");
  add_common(c_tab, false);
  c_tab->add_flag("--example-a1", example_a1,
                  "only the two-row binary pair example table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_gk)) return cmd_gk(opt);
    if (app.got_subcommand(c_egk)) return cmd_egk(opt);
    if (app.got_subcommand(c_egkt)) return cmd_egk_trunc(opt);
    if (app.got_subcommand(c_jor)) return cmd_jordan(opt);
    if (app.got_subcommand(c_den)) return cmd_density(opt);
    if (app.got_subcommand(c_bin)) return cmd_binary(opt, xi, d, f);
    if (app.got_subcommand(c_thm)) return cmd_theorem_check(opt);
    if (app.got_subcommand(c_suite)) return cmd_suite(opt);
    if (app.got_subcommand(c_tab)) return cmd_tables(opt, example_a1);
    std::cerr << "no command selected\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    if (std::strstr(e.what(), "budget") != nullptr) {
      std::cerr << "budget exhausted: " << e.what() << "\n";
      return 3;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
