#pragma once

// Batch pipelines behind the command-line tool. Every artifact starts with a
// header carrying the configuration and seed, and contains nothing
// run-dependent, so identical configs give byte-identical files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "floquet/io.hpp"

namespace floquet::cli {

inline constexpr const char* version = "0.1.0";

enum class Command { validate, bands, fermi, local, dim, solutions, lambda, classify };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names{
      {"validate", Command::validate}, {"bands", Command::bands},         {"fermi", Command::fermi},
      {"local", Command::local},       {"dim", Command::dim},             {"solutions", Command::solutions},
      {"lambda", Command::lambda},     {"classify", Command::classify}};
  return names;
}

inline std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "unknown";
}

struct RunConfig {
  Command command = Command::validate;
  std::string op_path;
  std::optional<double> energy_shift;
  std::optional<int> grid_res;
  int N_max = 4;
  std::int64_t window = 10;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string path;  ///< bands: waypoints "k;k;..." with comma-separated coordinates
  int samples = 50;  ///< bands: samples per segment
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return 1;
    case ErrorKind::validation:
    case ErrorKind::precondition: return 2;
    case ErrorKind::inconclusive:
    case ErrorKind::numerical: return 3;
  }
  return 3;
}

/// Parses one coordinate: a decimal number, or [sign][coef]pi[/denom]
/// such as "pi", "-pi/2", "2pi/3".
inline double parse_coordinate(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(ErrorKind::parse, "empty k coordinate");
  const auto p = s.find("pi");
  try {
    if (p == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    std::string head = s.substr(0, p);
    double coef = 1.0;
    if (head == "-") coef = -1.0;
    else if (head == "+" || head.empty()) coef = 1.0;
    else {
      if (head.back() == '*') head.pop_back();
      std::size_t used = 0;
      coef = std::stod(head, &used);
      if (used != head.size()) throw std::invalid_argument(head);
    }
    double denom = 1.0;
    const std::string tail = s.substr(p + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') throw std::invalid_argument(tail);
      std::size_t used = 0;
      denom = std::stod(tail.substr(1), &used);
      if (used != tail.size() - 1 || denom == 0.0) throw std::invalid_argument(tail);
    }
    return coef * pi / denom;
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse, "cannot parse k coordinate '" + raw + "'");
  }
}

inline std::vector<RVector> parse_path(const std::string& text, std::size_t n) {
  std::vector<RVector> pts;
  std::stringstream ss(text);
  std::string point;
  while (std::getline(ss, point, ';')) {
    std::vector<double> coords;
    std::stringstream ps(point);
    std::string c;
    while (std::getline(ps, c, ',')) coords.push_back(parse_coordinate(c));
    if (coords.size() != n)
      fail(ErrorKind::parse, "waypoint '" + point + "' has " + std::to_string(coords.size()) + " coordinates, rank is " +
                                 std::to_string(n));
    pts.push_back(Eigen::Map<RVector>(coords.data(), static_cast<Eigen::Index>(n)));
  }
  return pts;
}

/// Gamma -> X -> M -> Gamma style default: 0 -> pi e_1 -> ... -> pi (1,..,1) -> 0.
inline std::vector<RVector> default_path(std::size_t n) {
  if (n == 1) return {RVector::Constant(1, -pi), RVector::Constant(1, pi)};
  std::vector<RVector> pts{RVector::Zero(static_cast<Eigen::Index>(n))};
  RVector k = RVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    k(static_cast<Eigen::Index>(i)) = pi;
    pts.push_back(k);
  }
  pts.push_back(RVector::Zero(static_cast<Eigen::Index>(n)));
  return pts;
}

namespace detail {

inline io::json header(const RunConfig& cfg, const PeriodicGraphOperator* op) {
  io::json h;
  h["tool"] = "floquet";
  h["version"] = version;
  h["command"] = to_string(cfg.command);
  h["operator"] = std::filesystem::path(cfg.op_path).filename().string();
  h["energy_shift"] = op ? io::json(op->energy_shift()) : io::json(nullptr);
  h["grid"] = op ? io::json(cfg.grid_res.value_or(default_grid_resolution(op->n()))) : io::json(nullptr);
  h["N_max"] = cfg.N_max;
  h["window"] = cfg.window;
  h["seed"] = cfg.seed;
  return h;
}

inline void write_text(const RunConfig& cfg, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::precondition, "cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const RunConfig& cfg, const std::string& name, const io::json& j) {
  write_text(cfg, name, j.dump(2) + "\n");
}

inline std::string format_k(const RVector& k) {
  std::ostringstream os;
  os << std::setprecision(10) << '(';
  for (Eigen::Index i = 0; i < k.size(); ++i) os << (i ? ", " : "") << k(i);
  os << ')';
  return os.str();
}

}  // namespace detail

/// Runs one command, writing artifacts into cfg.out_dir and a short summary
/// to `log`. Returns the process exit status.
inline int run(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    if (cfg.command == Command::validate) {
      const auto desc = io::read_operator_file(cfg.op_path);
      const auto rep = validate_operator(desc);
      io::json j{{"header", detail::header(cfg, nullptr)}, {"validation", io::validation_json(rep)}};
      detail::write_json(cfg, "report.json", j);
      if (!rep.valid) {
        for (const auto& e : rep.errors) err << "invalid: " << e << '\n';
        return 2;
      }
      log << "valid; selfadjoint=" << rep.selfadjoint << " positive_structure=" << rep.positive_structure << '\n';
      return 0;
    }

    PeriodicGraphOperator op = io::load_operator(cfg.op_path);
    if (cfg.energy_shift) op = op.with_energy_shift(*cfg.energy_shift);
    const int grid = cfg.grid_res.value_or(default_grid_resolution(op.n()));
    if (cfg.N_max < 0) fail(ErrorKind::precondition, "--N-max must be nonnegative");
    io::json report{{"header", detail::header(cfg, &op)}};

    switch (cfg.command) {
      case Command::validate: break;

      case Command::bands: {
        const auto pts = cfg.path.empty() ? default_path(op.n()) : parse_path(cfg.path, op.n());
        const auto rows = band_path(op, pts, cfg.samples);
        std::ostringstream csv;
        csv << "# floquet " << version << " bands operator=" << std::filesystem::path(cfg.op_path).filename().string()
            << " energy_shift=" << op.energy_shift() << " seed=" << cfg.seed << '\n';
        write_band_csv(csv, rows);
        detail::write_text(cfg, "bands.csv", csv.str());
        log << rows.size() << " band samples written\n";
        return 0;
      }

      case Command::fermi: {
        const auto rep = real_fermi_surface(op, grid);
        report["fermi"] = io::fermi_json(rep);
        detail::write_json(cfg, "report.json", report);
        log << "verdict: " << to_string(rep.verdict) << '\n';
        for (const auto& p : rep.points)
          log << "  k = " << detail::format_k(p.k0) << "  r_geom=" << p.r_geom << " r_alg=" << p.r_alg << '\n';
        if (rep.certificate) log << "  emptiness bound: " << rep.certificate->bound << '\n';
        return 0;
      }

      case Command::local: {
        const auto rep = real_fermi_surface(op, grid);
        report["fermi"] = io::fermi_json(rep);
        io::json pts = io::json::array();
        for (const auto& p : rep.points) {
          try {
            const auto local = taylor_expand(op, p.k0, local_defaults::L_max, local_defaults::tol_zero, cfg.seed);
            io::json lj = io::local_json(local);
            if (local.nondegenerate) {
              const auto h = q_harmonic_basis(local.lambda_l0, cfg.N_max);
              lj["harmonic_dimension"] = h.dimension();
              lj["harmonic_basis"] = io::basis_json(PolySpaceBasis::up_to(op.n(), static_cast<std::size_t>(local.r), cfg.N_max), h.basis);
            }
            pts.push_back(std::move(lj));
            log << "k = " << detail::format_k(p.k0) << "  l0=" << pts.back()["l0"] << " r=" << pts.back()["r"]
                << " nondegenerate=" << pts.back()["nondegenerate"] << '\n';
          } catch (const Error& e) {
            pts.push_back(io::json{{"k0", io::vector_json(p.k0)}, {"error", e.what()}});
            log << "k = " << detail::format_k(p.k0) << "  local data unavailable: " << e.what() << '\n';
          }
        }
        report["local"] = std::move(pts);
        detail::write_json(cfg, "report.json", report);
        return rep.verdict == FermiVerdict::likely_positive_dimensional ? 3 : 0;
      }

      case Command::dim: {
        const auto rep = liouville_dimension(op, cfg.N_max, grid, cfg.seed);
        report["liouville"] = io::liouville_json(rep);
        detail::write_json(cfg, "report.json", report);
        log << "Liouville: " << to_string(rep.verdict) << '\n';
        if (!rep.d_N.empty()) {
          log << "   N   d_N  oracle\n";
          for (std::size_t N = 0; N < rep.d_N.size(); ++N)
            log << std::setw(4) << N << std::setw(6) << rep.d_N[N] << std::setw(8) << rep.oracle_d_N[N] << '\n';
        }
        for (const auto& d : rep.diagnostics) log << "note: " << d << '\n';
        return rep.fermi.verdict == FermiVerdict::likely_positive_dimensional ? 3 : 0;
      }

      case Command::solutions: {
        const auto rep = real_fermi_surface(op, grid);
        report["fermi"] = io::fermi_json(rep);
        if (rep.verdict == FermiVerdict::likely_positive_dimensional) {
          detail::write_json(cfg, "report.json", report);
          err << "real Fermi surface is likely positive dimensional; no finite solution basis\n";
          return 3;
        }
        io::json sols = io::json::array();
        io::json summary = io::json::array();
        const Box box = Box::centered(op.n(), cfg.window);
        for (const auto& p : rep.points) {
          const auto basis = build_floquet_solutions(op, p.k0, cfg.N_max);
          for (const auto& s : basis) {
            const auto chk = verify_solution(op, s, cfg.window);
            const auto w = s.on_window(box, op.vertex_count());
            io::json sj = io::solution_json(s);
            sj["residual"] = chk.residual;
            sj["growth_constant"] = chk.growth_constant;
            sj["growth_exponent"] = chk.growth_exponent;
            sj["order_test"] = floquet_order_test(w, s.k, s.order);
            if (s.order > 0) sj["lower_order_test"] = floquet_order_test(w, s.k, s.order - 1);
            sols.push_back(std::move(sj));
          }
          summary.push_back(io::json{{"k", io::vector_json(p.k0)}, {"count", basis.size()}});
          log << "k = " << detail::format_k(p.k0) << ": " << basis.size() << " solution(s) of order <= " << cfg.N_max << '\n';
        }
        report["solutions"] = std::move(summary);
        detail::write_json(cfg, "report.json", report);
        detail::write_json(cfg, "solutions.json", io::json{{"header", detail::header(cfg, &op)}, {"solutions", std::move(sols)}});
        return 0;
      }

      case Command::lambda: {
        const auto prof = maximize_lambda(op, cfg.seed);
        report["profile"] = io::profile_json(prof);
        detail::write_json(cfg, "report.json", report);
        std::ostringstream csv;
        csv << "# floquet " << version << " lambda operator=" << std::filesystem::path(cfg.op_path).filename().string()
            << " seed=" << cfg.seed << '\n';
        io::write_profile_csv(csv, op, prof.xi_star, 2.0, op.n() <= 2 ? 41 : 11);
        detail::write_text(cfg, "profile.csv", csv.str());
        log << std::setprecision(10) << "Lambda0 = " << prof.lambda0 << " at xi* = " << detail::format_k(prof.xi_star)
            << "; Lambda(0) = " << prof.lambda_at_zero << '\n';
        return 0;
      }

      case Command::classify: {
        const auto cl = classify_liouville_case(op, cfg.N_max, cfg.seed);
        report["classification"] = io::classification_json(cl);
        if (cl.kind != LiouvilleCase::vacuous) {
          const auto lv = liouville_dimension(op, cfg.N_max, grid, cfg.seed);
          io::json cross;
          cross["fermi_verdict"] = to_string(lv.fermi.verdict);
          cross["d_N"] = lv.d_N;
          cross["agrees"] = lv.d_N == cl.d_N;
          report["cross_check"] = std::move(cross);
          if (lv.d_N != cl.d_N) log << "warning: classification d_N disagrees with liouville_dimension\n";
        }
        detail::write_json(cfg, "report.json", report);
        log << "case: " << to_string(cl.kind) << std::setprecision(10) << "  Lambda0 = " << cl.profile.lambda0
            << "  xi* = " << detail::format_k(cl.profile.xi_star) << '\n';
        for (const auto& n : cl.notes) log << "note: " << n << '\n';
        return 0;
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "error (" << floquet::to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace floquet::cli
