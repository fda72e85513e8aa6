#pragma once
// JSON parsing and canonical serialization for rings, matrices, and result
// records.  All serializers emit objects with sorted keys and exact rational
// strings, so equal inputs produce byte-identical output.
//
// Ring specification:  {"p":2, "f":1, "e":2, "eisenstein":[0,1], "precision":16}
//   "eisenstein" lists [u_{e-1}, ..., u_0] with pi^e = -p (u_{e-1} pi^{e-1}
//   + ... + u_0); it is omitted/ignored when e == 1.  "precision" (optional)
//   is the number of p-digits carried per unramified coefficient.
// Matrix:  {"ring": <ring spec>, "n": 2, "doubled": [[...], [...]]}
//   row-major entries of the doubled Gram matrix T = 2B; each entry is a
//   plain integer or a little-endian digit array in pi (digits are residue
//   field indices).  Elements always serialize as digit arrays with trailing
//   zeros stripped.
#include "qlat/density.hpp"

#include <memory>
#include <string>

namespace qlat {

struct ParsedMat {
  std::shared_ptr<Ring> ring;
  Mat T;
};

// Parse a ring specification from JSON text.  Malformed input throws
// std::invalid_argument.
std::shared_ptr<Ring> ring_from_json(const std::string& text);
std::string ring_to_json(const Ring& R);

// Parse a matrix; `ring` (when non-null) supplies the ring and overrides any
// "ring" key in the text.  The returned ParsedMat keeps the ring alive.
ParsedMat mat_from_json(const std::string& text,
                        std::shared_ptr<Ring> ring = nullptr);
std::string mat_to_json(const Mat& T);

// Result serializers.
std::string gk_json(const GKResult& r, bool include_certificate = true);
std::string egk_json(const EGK& e);
std::string jordan_json(const Jordan& J);
std::string density_json(const DensityReport& rep);
std::string theorem_json(const TheoremVerdict& v);
std::string trunc_profile_json(const std::vector<std::pair<int, EGK>>& prof);

} // namespace qlat
