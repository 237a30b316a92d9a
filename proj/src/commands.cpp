#include "penaparab/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace penaparab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

fs::path output_dir(const Invocation& inv, const Config& cfg) {
  fs::path dir = inv.out_dir ? *inv.out_dir : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CertifyOptions certify_options(const Config& cfg) {
  CertifyOptions o;
  o.grid = grid_for_mesh(cfg.nx, cfg.nt);
  o.constants = cfg.transform;
  return o;
}

// Returns the transformed problem or logs the reasons and yields nullopt.
std::optional<TransformedProblem> certified(const Config& cfg, Certificate* cert_out,
                                            std::ostream& log) {
  Prepared prep = prepare(cfg.spec, certify_options(cfg));
  if (cert_out) *cert_out = prep.certificate;
  for (const auto& r : prep.certificate.reasons) log << "hypothesis violated: " << r << "\n";
  return std::move(prep.problem);
}

json stats_json(const AssemblyStats& s) {
  return {{"min_K", finite_or_null(s.min_K)},
          {"min_residual", finite_or_null(s.min_residual)},
          {"min_a11", finite_or_null(s.min_a11)}};
}

json mesh_json(const SpaceTimeMesh& m, int nt) {
  return {{"nx", m.nx},
          {"nt", nt},
          {"levels", m.num_levels()},
          {"nodes", m.nodes.size()},
          {"triangles", m.triangles.size()}};
}

json errors_json(const ErrorReport& e) {
  return {{"l2", e.l2}, {"energy", e.energy}, {"sigma1", e.sigma1}};
}

json report_json(const SolveReport& rep, const Certificate& cert, const SpaceTimeMesh& mesh,
                 int nt) {
  json steps = json::array();
  for (const auto& s : rep.steps) {
    steps.push_back({{"m", s.m},
                     {"e_pen", s.energies.e_pen},
                     {"e_grad", s.energies.e_grad},
                     {"trace0", s.energies.trace0},
                     {"traceT", s.energies.traceT},
                     {"cauchy_gap", finite_or_null(s.cauchy_gap)},
                     {"relative_residual", s.relative_residual},
                     {"picard",
                      {{"iterations", s.picard.iterations},
                       {"gaps", s.picard.gaps},
                       {"ratio", s.picard.ratio},
                       {"converged", s.picard.converged}}}});
  }
  json doc = {{"certificate", certificate_json(cert)},
              {"mesh", mesh_json(mesh, nt)},
              {"bandwidth", rep.bandwidth},
              {"assembly", stats_json(rep.stats)},
              {"steps", steps},
              {"failure", rep.failure ? json(*rep.failure) : json(nullptr)}};
  if (rep.steps.size() >= 3 && !rep.failure) {
    json verdicts = json::array();
    for (const auto& v : diagnostics(rep))
      verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    doc["diagnostics"] = verdicts;
  } else {
    doc["diagnostics"] = nullptr;
  }
  return doc;
}

std::string solution_csv(const SpaceTimeMesh& mesh, const SolveReport& rep) {
  const bool rich = !rep.y_richardson.empty();
  std::string out = rich ? "x,t,u,y,y_richardson\n" : "x,t,u,y\n";
  const auto& u = rep.steps.back().u;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    out += format_double(mesh.nodes[i].x) + "," + format_double(mesh.nodes[i].t) + "," +
           format_double(u[i]) + "," + format_double(rep.y[i]);
    if (rich) out += "," + format_double(rep.y_richardson[i]);
    out += "\n";
  }
  return out;
}

int cmd_certify(const Invocation& inv, const Config& cfg, std::ostream& log) {
  const fs::path dir = output_dir(inv, cfg);
  Certificate cert;
  auto tp = certified(cfg, &cert, log);
  json doc = certificate_json(cert);
  int code = cert.ok() ? kExitOk : kExitHypothesis;
  if (tp) {
    // Re-check K and the residual at the assembly quadrature points.
    try {
      const SpaceTimeMesh mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, cfg.nx, cfg.nt);
      const SparseSystem sys = assemble(*tp, mesh, cfg.schedule.values().back());
      doc["assembly"] = stats_json(sys.stats);
      if (sys.stats.min_residual < 0.0) {
        log << "hypothesis violated: coercivity residual " << sys.stats.min_residual
            << " < 0 at an assembly quadrature point\n";
        code = kExitHypothesis;
      }
    } catch (const HypothesisError& e) {
      log << "hypothesis violated: " << e.what() << "\n";
      doc["reasons"].push_back(e.what());
      doc["ok"] = false;
      code = kExitHypothesis;
    }
  }
  write_json(dir / "certificate.json", doc);
  return code;
}

int cmd_solve(const Invocation& inv, const Config& cfg, std::ostream& log) {
  const fs::path dir = output_dir(inv, cfg);
  Certificate cert;
  auto tp = certified(cfg, &cert, log);
  if (!tp) return kExitHypothesis;
  const SpaceTimeMesh mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, cfg.nx, cfg.nt);
  if (cfg.write_mesh) {
    std::ostringstream m;
    write_mesh(m, mesh);
    write_file(dir / "mesh.txt", m.str());
  }
  const SolveReport rep = run_schedule(*tp, mesh, cfg.schedule, cfg.picard);
  json doc = report_json(rep, cert, mesh, cfg.nt);
  if (cfg.manufactured && !rep.y.empty()) {
    doc["errors"] = errors_json(error_norms(mesh, rep.y, *cfg.manufactured));
    if (!rep.y_richardson.empty())
      doc["errors_richardson"] = errors_json(error_norms(mesh, rep.y_richardson, *cfg.manufactured));
  }
  if (!rep.steps.empty()) write_file(dir / "solution.csv", solution_csv(mesh, rep));
  write_json(dir / "report.json", doc);
  if (rep.failure) {
    log << "numerical failure: " << *rep.failure << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_convergence(const Invocation& inv, const Config& cfg, std::ostream& log) {
  if (!cfg.manufactured) throw ConfigError("convergence needs a manufactured section");
  const fs::path dir = output_dir(inv, cfg);
  ConvergenceOptions opt;
  opt.levels.clear();
  for (int i = 0; i < cfg.convergence_levels; ++i)
    opt.levels.push_back({cfg.nx << i, cfg.nt << i});
  opt.constants = cfg.transform;
  opt.picard = cfg.picard;
  opt.threads = thread_count();
  const auto rows = convergence_study(cfg.spec, *cfg.manufactured, opt);
  std::string csv = "nx,nt,m,l2_error,energy_error,observed_order\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.nx) + "," + std::to_string(r.nt) + "," + format_double(r.m) + "," +
           format_double(r.errors.l2) + "," + format_double(r.errors.energy) + "," +
           (std::isnan(r.observed_order) ? std::string() : format_double(r.observed_order)) +
           "\n";
  }
  write_file(dir / "rates.csv", csv);
  if (rows.size() < 3) log << "note: observed orders need at least 3 levels\n";
  return kExitOk;
}

int cmd_oracle_compare(const Invocation& inv, const Config& cfg, std::ostream& log) {
  if (!cfg.spec.domain.is_static())
    throw ConfigError("oracle-compare needs a static domain (a and b independent of t)");
  if (!cfg.spec.c.is_linear()) throw ConfigError("oracle-compare needs a linear reaction");
  const fs::path dir = output_dir(inv, cfg);
  auto tp = certified(cfg, nullptr, log);
  if (!tp) return kExitHypothesis;
  const SpaceTimeMesh mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, cfg.nx, cfg.nt);
  const SolveReport rep = run_schedule(*tp, mesh, cfg.schedule, cfg.picard);
  const std::vector<double> fd = fd_oracle(cfg.spec, cfg.nx, mesh.levels);
  std::string csv = "nx,nt,m,rel_l2_gap\n";
  double last = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : rep.steps) {
    const auto y = inverse_transform(mesh.nodes, s.u, tp->phi(), tp->k1(), tp->k2());
    last = relative_l2_gap(mesh, y, fd);
    csv += std::to_string(cfg.nx) + "," + std::to_string(cfg.nt) + "," + format_double(s.m) +
           "," + format_double(last) + "\n";
  }
  write_file(dir / "compare.csv", csv);
  if (rep.failure) {
    log << "numerical failure: " << *rep.failure << "\n";
    return kExitNumerical;
  }
  if (!(last <= kOracleTolerance)) {
    log << "oracle gap " << format_double(last) << " exceeds tolerance "
        << format_double(kOracleTolerance) << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int thread_count() {
  const char* env = std::getenv("PENAPARAB_THREADS");
  int n = 0;
  if (env && *env) {
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || n < 0)
      throw ConfigError("PENAPARAB_THREADS must be a non-negative integer, got '" + s + "'");
  }
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

nlohmann::json certificate_json(const Certificate& c) {
  return {{"rho", c.rho},
          {"eta", c.eta},
          {"k1", c.k1},
          {"k2", c.k2},
          {"minK", finite_or_null(c.min_K)},
          {"coercivity_margin", c.coercivity_margin},
          {"sigma0_nonempty", c.sigma0_nonempty},
          {"sigma0_cylindrical", c.sigma0_cylindrical},
          {"lipschitz_check", c.lipschitz_pass ? "pass" : "fail"},
          {"slope_check", c.slope_pass ? "pass" : "fail"},
          {"width_check", c.width_pass ? "pass" : "fail"},
          {"constants_overridden", c.constants_overridden},
          {"ok", c.ok()},
          {"reasons", c.reasons}};
}

int run(const Invocation& inv, std::ostream& log) {
  try {
    thread_count();
    const Config cfg = load_config(inv.config);
    if (inv.command == "certify") return cmd_certify(inv, cfg, log);
    if (inv.command == "solve") return cmd_solve(inv, cfg, log);
    if (inv.command == "convergence") return cmd_convergence(inv, cfg, log);
    if (inv.command == "oracle-compare") return cmd_oracle_compare(inv, cfg, log);
    log << "unknown command '" << inv.command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HypothesisError& e) {
    log << "hypothesis violated: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace penaparab::cli
