#include "qlat/json_io.hpp"

#include <json.hpp>

#include <stdexcept>
#include <utility>

namespace qlat {

using nlohmann::json;

namespace {

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("malformed JSON");
  return j;
}

long long get_int(const json& j, const char* key, long long dflt,
                  bool required = false) {
  if (!j.contains(key)) {
    if (required) throw std::invalid_argument(std::string("missing key: ") + key);
    return dflt;
  }
  if (!j[key].is_number_integer() && !j[key].is_number_unsigned())
    throw std::invalid_argument(std::string("key is not an integer: ") + key);
  return j[key].get<long long>();
}

std::shared_ptr<Ring> ring_from_value(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("ring spec must be an object");
  const long long p = get_int(j, "p", 2);
  const long long f = get_int(j, "f", 1);
  const long long e = get_int(j, "e", 1);
  const long long prec = get_int(j, "precision", 0);
  std::vector<long long> eis;
  if (j.contains("eisenstein")) {
    if (!j["eisenstein"].is_array())
      throw std::invalid_argument("eisenstein must be an array");
    for (const auto& v : j["eisenstein"]) {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw std::invalid_argument("eisenstein entries must be integers");
      eis.push_back(v.get<long long>());
    }
  }
  if (p < 2 || p > 1000 || f < 1 || e < 1 || prec < 0 || prec > 62)
    throw std::invalid_argument("ring parameters out of range");
  try {
    return std::make_shared<Ring>((int)p, (int)f, (int)e, std::move(eis),
                                  (int)prec);
  } catch (const std::exception& ex) {
    throw std::invalid_argument(std::string("bad ring spec: ") + ex.what());
  }
}

json ring_to_value(const Ring& R) {
  json j;
  j["p"] = R.p;
  j["f"] = R.f;
  j["e"] = R.e;
  j["precision"] = R.Pw;
  if (R.e > 1) {
    json eis = json::array();
    for (int i = R.e - 1; i >= 0; --i) eis.push_back((unsigned long long)R.eis[i]);
    j["eisenstein"] = std::move(eis);
  }
  return j;
}

RElem elem_from_value(const Ring& R, const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned())
    return R.from_int(v.get<long long>());
  if (v.is_array()) {
    std::vector<int> d;
    for (const auto& x : v) {
      if (!x.is_number_integer() && !x.is_number_unsigned())
        throw std::invalid_argument("element digits must be integers");
      long long dv = x.get<long long>();
      if (dv < 0 || dv >= R.q)
        throw std::invalid_argument("element digit out of residue range");
      d.push_back((int)dv);
    }
    if ((int)d.size() > R.P)
      throw std::invalid_argument("element digit array longer than precision");
    return R.from_digits(d);
  }
  throw std::invalid_argument("matrix entries must be integers or digit arrays");
}

json elem_to_value(const Ring& R, const RElem& x) {
  std::vector<int> d = R.digits(x, R.P);
  while (!d.empty() && d.back() == 0) d.pop_back();
  return json(d);
}

json mat_entries_value(const Mat& T) {
  const Ring& R = *T.R;
  json rows = json::array();
  for (int i = 0; i < T.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < T.cols; ++j) row.push_back(elem_to_value(R, T.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json egk_value(const EGK& e) {
  json j;
  j["n"] = e.n;
  j["m"] = e.m;
  j["zeta"] = e.zeta;
  return j;
}

json trunc_profile_value(const std::vector<std::pair<int, EGK>>& prof) {
  json arr = json::array();
  for (const auto& [scale, e] : prof) {
    json row;
    row["scale"] = scale;
    row["egk"] = egk_value(e);
    arr.push_back(std::move(row));
  }
  return arr;
}

std::string dump(const json& j) { return j.dump(); }

} // namespace

std::shared_ptr<Ring> ring_from_json(const std::string& text) {
  return ring_from_value(parse_text(text));
}

std::string ring_to_json(const Ring& R) { return dump(ring_to_value(R)); }

ParsedMat mat_from_json(const std::string& text, std::shared_ptr<Ring> ring) {
  json j = parse_text(text);
  if (!j.is_object()) throw std::invalid_argument("matrix spec must be an object");
  ParsedMat out;
  if (ring) {
    out.ring = std::move(ring);
  } else if (j.contains("ring")) {
    out.ring = ring_from_value(j["ring"]);
  } else {
    throw std::invalid_argument("matrix spec has no ring (pass one explicitly)");
  }
  if (!j.contains("doubled") || !j["doubled"].is_array())
    throw std::invalid_argument("matrix spec needs a \"doubled\" array");
  const json& rows = j["doubled"];
  const int n = (int)rows.size();
  const long long n_declared = get_int(j, "n", n);
  if (n_declared != n)
    throw std::invalid_argument("declared rank disagrees with the row count");
  if (n == 0) throw std::invalid_argument("empty matrix");
  Mat T(out.ring.get(), n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || (int)rows[i].size() != n)
      throw std::invalid_argument("matrix rows must all have length n");
    for (int jj = 0; jj < n; ++jj) T.at(i, jj) = elem_from_value(*out.ring, rows[i][jj]);
  }
  out.T = std::move(T);
  return out;
}

std::string mat_to_json(const Mat& T) {
  json j;
  j["ring"] = ring_to_value(*T.R);
  j["n"] = T.rows;
  j["doubled"] = mat_entries_value(T);
  return dump(j);
}

std::string gk_json(const GKResult& r, bool include_certificate) {
  json j;
  j["gk"] = r.a;
  j["certified"] = r.certified;
  j["method"] = r.method;
  if (include_certificate && r.has_witness) {
    json cert;
    cert["U"] = mat_entries_value(r.U);
    cert["reduced"] = mat_entries_value(r.R);
    cert["sigma"] = r.sigma;
    j["certificate"] = std::move(cert);
  }
  return dump(j);
}

std::string egk_json(const EGK& e) { return dump(egk_value(e)); }

std::string jordan_json(const Jordan& J) {
  json parts = json::array();
  for (const auto& P : J.parts) {
    json part;
    part["scale"] = P.scale;
    part["rank"] = P.rank;
    part["type"] = P.typeI ? "I" : "II";
    part["block"] = mat_entries_value(P.block);
    parts.push_back(std::move(part));
  }
  json j;
  j["parts"] = std::move(parts);
  j["U"] = mat_entries_value(J.U);
  return dump(j);
}

std::string density_json(const DensityReport& rep) {
  json j;
  j["alpha"] = rep.alpha.str();
  j["beta"] = rep.beta.str();
  j["beta_C"] = rep.beta_C.str();
  j["method"] = rep.method;
  j["N"] = rep.N_used;
  j["stabilized"] = rep.stabilized;
  return dump(j);
}

std::string theorem_json(const TheoremVerdict& v) {
  json j;
  j["verdict"] = v.verdict;
  j["hypothesis_met"] = v.hypothesis_met;
  j["densities_equal"] = v.densities_equal;
  j["gk_double_L"] = v.gk_double_L;
  j["gk_double_M"] = v.gk_double_M;
  j["trunc_L"] = trunc_profile_value(v.trunc_L);
  j["trunc_M"] = trunc_profile_value(v.trunc_M);
  j["beta_L"] = v.beta_L.str();
  j["beta_M"] = v.beta_M.str();
  return dump(j);
}

std::string trunc_profile_json(const std::vector<std::pair<int, EGK>>& prof) {
  return dump(trunc_profile_value(prof));
}

} // namespace qlat
