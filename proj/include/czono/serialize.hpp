#pragma once

#include <json.hpp>

#include "czono/sets.hpp"

namespace czono {

// JSON form of the constrained generator representation:
//   {"n": dim, "G": row-major flat, "c": [n], "A": row-major flat, "b": [n_c]}
// with n_g = len(G)/n and n_c = len(b). Zonotopes carry empty "A" and "b".
// Round-trips are bit-exact (shortest-representation decimal floats).
nlohmann::json cz_to_json(const ConstrainedZonotope& z);

// SchemaMismatch on missing keys, unknown keys, non-numeric entries, or
// inconsistent lengths.
ConstrainedZonotope cz_from_json(const nlohmann::json& j);

}  // namespace czono
