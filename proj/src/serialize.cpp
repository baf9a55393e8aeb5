#include "czono/serialize.hpp"

#include <string>
#include <vector>

namespace czono {

namespace {

std::vector<double> flatten_row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

std::vector<double> numeric_array(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& arr = j.at(key);
  if (!arr.is_array()) {
    throw SchemaMismatch("\"" + key + "\" must be an array");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const nlohmann::json& v : arr) {
    if (!v.is_number()) {
      throw SchemaMismatch("\"" + key + "\" must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::MatrixXd unflatten(const std::vector<double>& flat, Eigen::Index rows,
                          Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return m;
}

}  // namespace

nlohmann::json cz_to_json(const ConstrainedZonotope& z) {
  nlohmann::json j;
  j["n"] = z.dim();
  j["G"] = flatten_row_major(z.G);
  j["c"] = std::vector<double>(z.c.data(), z.c.data() + z.c.size());
  j["A"] = flatten_row_major(z.A);
  j["b"] = std::vector<double>(z.b.data(), z.b.data() + z.b.size());
  return j;
}

ConstrainedZonotope cz_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaMismatch("set must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "n" && key != "G" && key != "c" && key != "A" && key != "b") {
      throw SchemaMismatch("unknown key \"" + key + "\" in set object");
    }
  }
  for (const char* key : {"n", "G", "c", "A", "b"}) {
    if (!j.contains(key)) {
      throw SchemaMismatch(std::string("missing key \"") + key + "\" in set object");
    }
  }
  if (!j.at("n").is_number_integer()) throw SchemaMismatch("\"n\" must be an integer");
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  if (n < 1) throw SchemaMismatch("\"n\" must be at least 1");

  const std::vector<double> g_flat = numeric_array(j, "G");
  const std::vector<double> c_flat = numeric_array(j, "c");
  const std::vector<double> a_flat = numeric_array(j, "A");
  const std::vector<double> b_flat = numeric_array(j, "b");

  if (static_cast<Eigen::Index>(c_flat.size()) != n) {
    throw SchemaMismatch("\"c\" length must equal n");
  }
  if (g_flat.size() % static_cast<std::size_t>(n) != 0) {
    throw SchemaMismatch("\"G\" length must be a multiple of n");
  }
  const Eigen::Index ng = static_cast<Eigen::Index>(g_flat.size()) / n;
  const Eigen::Index nc = static_cast<Eigen::Index>(b_flat.size());
  if (static_cast<Eigen::Index>(a_flat.size()) != nc * ng) {
    throw SchemaMismatch("\"A\" length must equal len(b) times n_g");
  }

  ConstrainedZonotope out;
  out.G = unflatten(g_flat, n, ng);
  out.c = Eigen::Map<const Eigen::VectorXd>(c_flat.data(), n);
  out.A = unflatten(a_flat, nc, ng);
  out.b = Eigen::Map<const Eigen::VectorXd>(b_flat.data(), nc);
  return out;
}

}  // namespace czono
