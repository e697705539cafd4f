#include "geolab/subalgebras.hpp"

#include "geolab/expr.hpp"

#include <cctype>
#include <stdexcept>
#include <utility>

namespace geolab {

namespace {

CMat unit(int n, int r, int c) {
  CMat e = CMat::Zero(n, n);
  e(r, c) = cplx(1, 0);
  return e;
}

// skew-Hermitian basis of the full j x j block at offset (r0, r0) in n x n
std::vector<CMat> block_u_basis(int n, int j, int r0) {
  std::vector<CMat> b;
  const cplx im(0, 1);
  for (int r = 0; r < j; ++r) {
    CMat d = CMat::Zero(n, n);
    d(r0 + r, r0 + r) = im;
    b.push_back(d);
  }
  for (int r = 0; r < j; ++r)
    for (int c = r + 1; c < j; ++c) {
      b.push_back(unit(n, r0 + r, r0 + c) - unit(n, r0 + c, r0 + r));
      b.push_back(im * (unit(n, r0 + r, r0 + c) + unit(n, r0 + c, r0 + r)));
    }
  return b;
}

Subalgebra from_raw(std::string name, std::vector<CMat> raw) {
  return make_subalgebra(std::move(name), orthonormalize(raw));
}

}  // namespace

Subalgebra su3_t2() {
  CMat d1 = CMat::Zero(3, 3), d2 = CMat::Zero(3, 3);
  d1(0, 0) = cplx(0, 1);
  d1(1, 1) = cplx(0, -1);
  d2(0, 0) = d2(1, 1) = cplx(0, 1);
  d2(2, 2) = cplx(0, -2);
  return from_raw("su3.t2", {d1, d2});
}

Subalgebra su3_u1_traceless() {
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = cplx(0, 1);
  d(2, 2) = cplx(0, -1);
  return from_raw("su3.u1", {d});
}

Subalgebra su3_u2_traceless() {
  const cplx im(0, 1);
  CMat d1 = CMat::Zero(3, 3), d2 = CMat::Zero(3, 3);
  d1(0, 0) = im;
  d1(2, 2) = -im;
  d2(1, 1) = im;
  d2(2, 2) = -im;
  std::vector<CMat> raw = {d1, d2, unit(3, 0, 1) - unit(3, 1, 0),
                           im * (unit(3, 0, 1) + unit(3, 1, 0))};
  return from_raw("su3.u2", raw);
}

Subalgebra corner_u(int n, int j, bool tail) {
  if (j < 1 || j > n) throw std::invalid_argument("corner_u: need 1 <= j <= n");
  const int r0 = tail ? n - j : 0;
  std::string name = "su" + std::to_string(n) + ".u" + std::to_string(j) +
                     (tail ? "_tail" : "_block");
  return from_raw(std::move(name), block_u_basis(n, j, r0));
}

Subalgebra corner_so_tail(int n, int j) {
  if (j < 2 || j > n) throw std::invalid_argument("corner_so_tail: need 2 <= j <= n");
  const int r0 = n - j;
  std::vector<CMat> raw;
  for (int r = 0; r < j; ++r)
    for (int c = r + 1; c < j; ++c)
      raw.push_back(unit(n, r0 + r, r0 + c) - unit(n, r0 + c, r0 + r));
  std::string name = "so" + std::to_string(n) + ".so" + std::to_string(j) + "_tail";
  return from_raw(std::move(name), raw);
}

namespace {

QMat2 qdiag(const Quat& a, const Quat& b) {
  QMat2 m;
  m.e[0][0] = a;
  m.e[0][1] = Quat{0, 0, 0, 0};
  m.e[1][0] = Quat{0, 0, 0, 0};
  m.e[1][1] = b;
  return m;
}

}  // namespace

Subalgebra sp2_so2() {
  QMat2 d5;
  d5.e[0][0] = Quat{0, 0, 0, 0};
  d5.e[0][1] = q_one();
  d5.e[1][0] = Quat{-1, 0, 0, 0};
  d5.e[1][1] = Quat{0, 0, 0, 0};
  return from_raw("sp2.so2", {quaternion_embed(d5)});
}

Subalgebra sp2_sp1x1() {
  std::vector<CMat> raw;
  for (const Quat& q : {q_i(), q_j(), q_k()})
    raw.push_back(quaternion_embed(qdiag(q, Quat{0, 0, 0, 0})));
  return from_raw("sp2.sp1x1", raw);
}

Subalgebra sp2_1xsp1() {
  std::vector<CMat> raw;
  for (const Quat& q : {q_i(), q_j(), q_k()})
    raw.push_back(quaternion_embed(qdiag(Quat{0, 0, 0, 0}, q)));
  return from_raw("sp2.1xsp1", raw);
}

Subalgebra sp2_sp1xsp1() {
  std::vector<CMat> raw;
  for (const Quat& q : {q_i(), q_j(), q_k()}) {
    raw.push_back(quaternion_embed(qdiag(q, Quat{0, 0, 0, 0})));
    raw.push_back(quaternion_embed(qdiag(Quat{0, 0, 0, 0}, q)));
  }
  return from_raw("sp2.sp1xsp1", raw);
}

Subalgebra sp2_diag_sp1() {
  std::vector<CMat> raw;
  for (const Quat& q : {q_i(), q_j(), q_k()})
    raw.push_back(quaternion_embed(qdiag(q, q)));
  return from_raw("sp2.diag_sp1", raw);
}

Subalgebra sp2_line_l() {
  return from_raw("sp2.line_l", {quaternion_embed(qdiag(Quat{0, 0, 0, 0}, q_k()))});
}

namespace {

// parses "su4.u2_block" style names; returns true and fills out on match
bool parse_patterned(const std::string& name, Subalgebra* out) {
  auto read_int = [](const std::string& s, size_t* pos) -> int {
    size_t start = *pos;
    while (*pos < s.size() && std::isdigit(static_cast<unsigned char>(s[*pos]))) ++*pos;
    if (*pos == start) return -1;
    return std::stoi(s.substr(start, *pos - start));
  };
  size_t pos = 0;
  if (name.rfind("su", 0) == 0) {
    pos = 2;
    int n = read_int(name, &pos);
    if (n < 0 || pos >= name.size() || name[pos] != '.') return false;
    ++pos;
    if (name.compare(pos, 1, "u") != 0) return false;
    ++pos;
    int j = read_int(name, &pos);
    if (j < 0) return false;
    std::string rest = name.substr(pos);
    if (rest == "_block") {
      *out = corner_u(n, j, false);
      return true;
    }
    if (rest == "_tail") {
      *out = corner_u(n, j, true);
      return true;
    }
    return false;
  }
  if (name.rfind("so", 0) == 0) {
    pos = 2;
    int n = read_int(name, &pos);
    if (n < 0 || pos >= name.size() || name[pos] != '.') return false;
    ++pos;
    if (name.compare(pos, 2, "so") != 0) return false;
    pos += 2;
    int j = read_int(name, &pos);
    if (j < 0 || name.substr(pos) != "_tail") return false;
    *out = corner_so_tail(n, j);
    return true;
  }
  return false;
}

}  // namespace

Subalgebra subalgebra_by_name(const std::string& name) {
  if (name == "su3.t2") return su3_t2();
  if (name == "su3.u1") return su3_u1_traceless();
  if (name == "su3.u2") return su3_u2_traceless();
  if (name == "sp2.so2") return sp2_so2();
  if (name == "sp2.sp1x1") return sp2_sp1x1();
  if (name == "sp2.1xsp1") return sp2_1xsp1();
  if (name == "sp2.sp1xsp1") return sp2_sp1xsp1();
  if (name == "sp2.diag_sp1") return sp2_diag_sp1();
  if (name == "sp2.line_l") return sp2_line_l();
  Subalgebra h;
  if (parse_patterned(name, &h)) return h;
  throw std::invalid_argument("unknown subalgebra name: " + name);
}

std::vector<std::string> catalog_names() {
  return {"su3.t2",       "su3.u1",     "su3.u2",       "su3.u1_block",
          "su3.u2_block", "sp2.so2",    "sp2.sp1x1",    "sp2.1xsp1",
          "sp2.sp1xsp1",  "sp2.diag_sp1", "sp2.line_l"};
}

CMat direct_sum(const CMat& a, const CMat& b) {
  CMat m = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

Subalgebra product_subalgebra(std::string name, const std::vector<CMat>& left,
                              const std::vector<CMat>& right, int n_left, int n_right) {
  const CMat zl = CMat::Zero(n_left, n_left);
  const CMat zr = CMat::Zero(n_right, n_right);
  std::vector<CMat> raw;
  for (const CMat& x : left) raw.push_back(direct_sum(x, zr));
  for (const CMat& y : right) raw.push_back(direct_sum(zl, y));
  return from_raw(std::move(name), raw);
}

Subalgebra diagonal_subalgebra(std::string name, const std::vector<CMat>& basis) {
  std::vector<CMat> raw;
  for (const CMat& x : basis) raw.push_back(direct_sum(x, x));
  return from_raw(std::move(name), raw);
}

namespace {

double entry_value(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_expr(v.get<std::string>());
  throw std::invalid_argument("basis entry must be a number or expression string");
}

}  // namespace

nlohmann::json subalgebra_to_json(const Subalgebra& h) {
  nlohmann::json doc;
  doc["name"] = h.name;
  doc["ambient_dim"] = h.ambient_dim();
  nlohmann::json basis = nlohmann::json::array();
  for (const CMat& b : h.basis) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c)
        row.push_back({b(r, c).real(), b(r, c).imag()});
      rows.push_back(row);
    }
    basis.push_back(rows);
  }
  doc["basis"] = basis;
  return doc;
}

Subalgebra subalgebra_from_json(const nlohmann::json& doc) {
  if (!doc.contains("name") || !doc.contains("ambient_dim") || !doc.contains("basis"))
    throw std::invalid_argument("subalgebra document needs name, ambient_dim, basis");
  const std::string name = doc["name"].get<std::string>();
  const int n = doc["ambient_dim"].get<int>();
  std::vector<CMat> raw;
  for (const auto& mat : doc["basis"]) {
    if (static_cast<int>(mat.size()) != n)
      throw std::invalid_argument("basis matrix row count does not match ambient_dim");
    CMat b(n, n);
    for (int r = 0; r < n; ++r) {
      const auto& row = mat[r];
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument("basis matrix column count does not match ambient_dim");
      for (int c = 0; c < n; ++c) {
        const auto& cell = row[c];
        if (!cell.is_array() || cell.size() != 2)
          throw std::invalid_argument("basis entry must be a [re, im] pair");
        b(r, c) = cplx(entry_value(cell[0]), entry_value(cell[1]));
      }
    }
    raw.push_back(b);
  }
  return make_subalgebra(name, orthonormalize(raw));
}

}  // namespace geolab
