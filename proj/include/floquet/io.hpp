#pragma once

// JSON reading/writing of operators and reports, CSV profile export.
// Complex numbers are written as [re, im].

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "floquet/liouville.hpp"
#include "floquet/positive.hpp"

namespace floquet::io {

using json = nlohmann::ordered_json;

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json vector_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json vector_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

inline json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------- operators

/// Schema: {"rank", "energy_shift", "vertices": [labels],
///          "terms": [{"from", "to", "shift": [ints], "w_re", "w_im"}]}.
/// Structural problems raise parse errors; label/shape consistency is left
/// to validate_operator.
inline OperatorDescription parse_operator(const json& j) {
  auto require = [&](const json& obj, const char* key, const std::string& where) -> const json& {
    if (!obj.is_object() || !obj.contains(key)) fail(ErrorKind::parse, where + "missing field '" + key + "'");
    return obj.at(key);
  };
  try {
    OperatorDescription d;
    const json& rank = require(j, "rank", "");
    if (!rank.is_number_integer()) fail(ErrorKind::parse, "'rank' must be an integer");
    d.rank = rank.get<int>();
    if (j.contains("energy_shift")) {
      if (!j.at("energy_shift").is_number()) fail(ErrorKind::parse, "'energy_shift' must be a number");
      d.energy_shift = j.at("energy_shift").get<double>();
    }
    const json& verts = require(j, "vertices", "");
    if (!verts.is_array()) fail(ErrorKind::parse, "'vertices' must be an array of labels");
    for (const auto& v : verts) {
      if (!v.is_string()) fail(ErrorKind::parse, "vertex labels must be strings");
      d.vertices.push_back(v.get<std::string>());
    }
    const json& terms = require(j, "terms", "");
    if (!terms.is_array()) fail(ErrorKind::parse, "'terms' must be an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const json& t = terms[i];
      const std::string where = "term " + std::to_string(i) + ": ";
      OperatorDescription::RawTerm rt;
      const json& from = require(t, "from", where);
      const json& to = require(t, "to", where);
      if (!from.is_string() || !to.is_string()) fail(ErrorKind::parse, where + "'from'/'to' must be vertex labels");
      rt.from = from.get<std::string>();
      rt.to = to.get<std::string>();
      const json& shift = require(t, "shift", where);
      if (!shift.is_array()) fail(ErrorKind::parse, where + "'shift' must be an array of integers");
      for (const auto& s : shift) {
        if (!s.is_number_integer()) fail(ErrorKind::parse, where + "shift components must be integers");
        rt.shift.push_back(s.get<std::int64_t>());
      }
      double re = 0.0, im = 0.0;
      if (t.contains("w_re")) {
        if (!t.at("w_re").is_number()) fail(ErrorKind::parse, where + "'w_re' must be a number");
        re = t.at("w_re").get<double>();
      } else {
        fail(ErrorKind::parse, where + "missing field 'w_re'");
      }
      if (t.contains("w_im")) {
        if (!t.at("w_im").is_number()) fail(ErrorKind::parse, where + "'w_im' must be a number");
        im = t.at("w_im").get<double>();
      }
      rt.weight = cplx(re, im);
      d.terms.push_back(std::move(rt));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed operator JSON: ") + e.what());
  }
}

inline OperatorDescription parse_operator_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse, std::string("invalid JSON: ") + e.what());
  }
  return parse_operator(j);
}

inline OperatorDescription read_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse, "cannot open operator file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_operator_text(ss.str());
}

/// Parses and validates; invalid descriptions raise a validation error that
/// lists every problem found.
inline PeriodicGraphOperator load_operator(const std::string& path) {
  const auto d = read_operator_file(path);
  const auto rep = validate_operator(d);
  if (!rep.valid) {
    std::string msg = "invalid operator:";
    for (const auto& e : rep.errors) msg += "\n  " + e;
    fail(ErrorKind::validation, msg);
  }
  return PeriodicGraphOperator::from_description(d);
}

inline json operator_json(const PeriodicGraphOperator& op) {
  json j;
  j["rank"] = op.rank();
  j["energy_shift"] = op.energy_shift();
  j["vertices"] = op.vertices();
  json terms = json::array();
  for (const auto& t : op.terms()) {
    json tj;
    tj["from"] = op.vertices()[t.from];
    tj["to"] = op.vertices()[t.to];
    tj["shift"] = t.shift.components();
    tj["w_re"] = t.weight.real();
    tj["w_im"] = t.weight.imag();
    terms.push_back(std::move(tj));
  }
  j["terms"] = std::move(terms);
  return j;
}

// ---------------------------------------------------------------- reports

inline json validation_json(const ValidationReport& r) {
  json j;
  j["valid"] = r.valid;
  j["errors"] = r.errors;
  j["selfadjoint"] = r.selfadjoint;
  j["positive_structure"] = r.positive_structure;
  return j;
}

inline json certificate_json(const EmptinessCertificate& c) {
  json j;
  j["bound"] = c.bound;
  j["grid_min"] = c.grid_min;
  j["lipschitz"] = c.lipschitz;
  j["grid_res"] = c.grid_res;
  j["certified"] = c.certified();
  return j;
}

inline json fermi_point_json(const FermiPoint& p) {
  json j;
  j["k"] = vector_json(p.k0);
  j["r_geom"] = p.r_geom;
  j["r_alg"] = p.r_alg;
  j["sigma_min"] = p.sigma_min;
  return j;
}

inline json fermi_json(const FermiSurfaceReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(fermi_point_json(p));
  j["points"] = std::move(pts);
  j["bound"] = r.certificate ? json(r.certificate->bound) : json(nullptr);
  j["grid_resolution"] = r.grid_resolution;
  j["candidates"] = {r.candidates_coarse, r.candidates_fine};
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate);
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline json polynomial_json(const HomogeneousMatrixPolynomial& q) {
  json j;
  j["degree"] = q.degree();
  json coeffs = json::array();
  for (const auto& [alpha, c] : q.coefficients()) {
    json cj;
    cj["mono"] = alpha.exponents();
    cj["matrix"] = matrix_json(c);
    coeffs.push_back(std::move(cj));
  }
  j["coeffs"] = std::move(coeffs);
  return j;
}

/// Columns of `basis` as lists of {component, mono, coefficient}; entries
/// below chop are left out.
inline json basis_json(const PolySpaceBasis& space, const CMatrix& basis, double chop = 1e-12) {
  json out = json::array();
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    json elem = json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
      const cplx z = basis(static_cast<Eigen::Index>(i), c);
      if (std::abs(z) <= chop) continue;
      elem.push_back(json{{"component", space[i].component}, {"mono", space[i].mono.exponents()}, {"coefficient", complex_json(z)}});
    }
    out.push_back(std::move(elem));
  }
  return out;
}

inline json local_json(const LocalSpectralData& d) {
  json j;
  j["k0"] = vector_json(d.k0);
  j["r"] = d.r;
  j["l0"] = d.l0 ? json(*d.l0) : json(nullptr);
  j["lambda_l0"] = polynomial_json(d.lambda_l0);
  j["nondegenerate"] = d.nondegenerate;
  j["det_sample_max"] = d.det_sample_max;
  j["contour_radius"] = d.contour_radius;
  json taylor = json::array();
  for (const auto& t : d.taylor.terms) taylor.push_back(polynomial_json(t));
  j["taylor"] = std::move(taylor);
  return j;
}

inline json solution_json(const FloquetSolution& s) {
  json j;
  j["k"] = vector_json(s.k);
  j["order"] = s.order;
  json coeffs = json::array();
  for (const auto& [mono, p] : s.coeffs) {
    json cj;
    cj["mono"] = mono.exponents();
    cj["p"] = vector_json(p);
    coeffs.push_back(std::move(cj));
  }
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline json liouville_json(const LiouvilleReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["N_max"] = r.N_max;
  j["fermi"] = fermi_json(r.fermi);
  json pts = json::array();
  for (const auto& p : r.points) {
    json pj;
    pj["k"] = vector_json(p.k);
    pj["r_geom"] = p.r_geom;
    pj["r_alg"] = p.r_alg;
    pj["l0"] = p.l0 ? json(*p.l0) : json(nullptr);
    pj["nondegenerate"] = p.nondegenerate;
    pj["path"] = to_string(p.path);
    pj["contribution"] = p.contribution;
    pj["oracle_contribution"] = p.oracle_contribution;
    pj["caveats"] = p.caveats;
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  j["d_N"] = r.d_N;
  j["oracle_d_N"] = r.oracle_d_N;
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline json profile_json(const LambdaProfile& p) {
  json j;
  j["lambda0"] = p.lambda0;
  j["xi_star"] = vector_json(p.xi_star);
  j["lambda_at_zero"] = p.lambda_at_zero;
  j["gradient_norm"] = p.gradient_norm;
  j["hessian"] = matrix_json(p.hessian);
  j["hessian_negative_definite"] = p.hessian_negative_definite;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : p.concavity) worst = std::min(worst, s.margin);
  json cert;
  cert["pairs"] = p.concavity.size();
  cert["min_margin"] = p.concavity.empty() ? json(nullptr) : json(worst);
  cert["certified"] = p.concavity_certified;
  j["concavity"] = std::move(cert);
  return j;
}

inline json classification_json(const Classification& c) {
  json j;
  j["case"] = to_string(c.kind);
  j["profile"] = profile_json(c.profile);
  j["d_N"] = c.d_N;
  j["check_fermi"] = c.check_fermi;
  j["notes"] = c.notes;
  return j;
}

/// CSV "xi1..xin,lambda" over a uniform grid with `samples` points per axis
/// on [center - half_width, center + half_width].
inline void write_profile_csv(std::ostream& os, const PeriodicGraphOperator& op, const RVector& center, double half_width,
                              int samples) {
  if (samples < 2) fail(ErrorKind::precondition, "profile needs at least two samples per axis");
  const std::size_t n = op.n();
  for (std::size_t i = 0; i < n; ++i) os << "xi" << (i + 1) << ',';
  os << "lambda\n";
  os << std::setprecision(17);
  const Box idx{DeckIndex(n), DeckIndex(std::vector<std::int64_t>(n, samples - 1))};
  idx.for_each([&](const DeckIndex& g) {
    RVector xi(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      xi(static_cast<Eigen::Index>(i)) =
          center(static_cast<Eigen::Index>(i)) - half_width + 2.0 * half_width * static_cast<double>(g[i]) / (samples - 1);
    for (std::size_t i = 0; i < n; ++i) os << xi(static_cast<Eigen::Index>(i)) << ',';
    os << principal_eigenvalue(op, xi).lambda << '\n';
  });
}

}  // namespace floquet::io
