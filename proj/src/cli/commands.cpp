#include "shapecalc/cli.hpp"

#include "../common/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace shapecalc::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kTaylorSlope = 1.8;
constexpr double kFdRelative = 1e-2;
constexpr double kLinearity = 1e-8;
constexpr double kIdentity = 1e-3;
constexpr double kHadamardOrder = 1.9;
constexpr double kLaplacian = 1e-10;

std::ofstream open_output(const ExperimentConfig& c, const std::string& name, std::ostream& log) {
  fs::create_directories(c.output_dir);
  const fs::path p = fs::path(c.output_dir) / name;
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  log << "wrote " << p.string() << "\n";
  return out;
}

std::string level_tag(int level) { return "level" + std::to_string(level); }

control::DeformationBasis basis_for(const ExperimentConfig& c, const geometry::DomainPtr& domain) {
  try {
    if (c.basis == "bump") return control::bump_basis(domain, c.basis_size, c.bump_width);
    return control::fourier_basis(domain, c.basis_size);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("basis: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

Check at_least(std::string name, double v, double thr) { return {std::move(name), v, ">=", thr, v >= thr}; }
Check below(std::string name, double v, double thr) { return {std::move(name), v, "<", thr, v < thr}; }
Check above(std::string name, double v, double thr) { return {std::move(name), v, ">", thr, v > thr}; }
Check info(std::string name, double v) { return {std::move(name), v, "info", 0.0, true}; }

}  // namespace

bool VerifyReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void VerifyReport::write(std::ostream& out) const {
  int failed = 0;
  for (const auto& c : checks) {
    if (c.relation == "info") {
      out << "INFO " << c.name << " = " << fmt(c.value) << "\n";
      continue;
    }
    failed += c.passed ? 0 : 1;
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << fmt(c.value) << " " << c.relation << " "
        << fmt(c.threshold) << "\n";
  }
  out << "summary: " << checks.size() << " entries, " << failed << " failed\n";
}

VerifyReport run_verify(const ExperimentConfig& cfg) {
  VerifyReport rep;
  const Setup s = build_setup(cfg, cfg.level);
  const auto kind = s.flow_case.kind;
  std::vector<geometry::DeformationField> fields;
  for (const auto& f : cfg.fields) fields.emplace_back(parse_wall_function(s.domain, f));
  std::vector<geometry::WallFunction> mus;
  for (const auto& m : cfg.multipliers) mus.push_back(parse_wall_function(s.domain, m));

  ops::Linearization lin(s.flow_case);
  mesh::MeshDeformer deformer(s.mesh);
  const std::string op = kind == ops::FlowKind::Potential ? "dSp" : "dSs";

  validation::TaylorOptions topts;
  topts.t_list = cfg.t_list;
  topts.threads = cfg.threads;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto r = validation::taylor_test(lin, deformer, fields[i], topts);
    const std::string name = "taylor." + op + "[" + std::to_string(i) + "].slope";
    for (double t : r.dropped) rep.checks.push_back(info("taylor." + op + "[" + std::to_string(i) + "].dropped_t", t));
    if (r.exact)
      rep.checks.push_back({name + " (exact)", 0.0, ">=", 0.0, true});
    else
      rep.checks.push_back(at_least(name, r.slope, kTaylorSlope));
  }

  {
    const auto dS = lin.apply(fields.front());
    const auto fd = validation::fd_oracle(s.flow_case, deformer, fields.front(), cfg.fd_step);
    const double scale = std::max(fem::wall_norm(dS), 1e-300);
    rep.checks.push_back(below("fd." + op + "[0].relative_error", fem::wall_norm(fd - dS) / scale, kFdRelative));
  }
  if (fields.size() >= 2) {
    const auto lhs = lin.apply(fields[0] + 2.0 * fields[1]);
    const auto rhs = lin.apply(fields[0]) + lin.apply(fields[1]) * 2.0;
    const double scale = std::max(fem::wall_norm(rhs), 1e-300);
    rep.checks.push_back(below("linearity." + op + ".relative_error", fem::wall_norm(lhs - rhs) / scale, kLinearity));
  }

  adjoint::IdentityOptions iopts;
  iopts.flip_kappa = cfg.flip_kappa;
  const int npairs = static_cast<int>(fields.size() * mus.size());
  std::vector<adjoint::IdentityReport> ids(static_cast<std::size_t>(npairs));
  detail::parallel_for(npairs, cfg.threads, [&](int k) {
    const auto i = static_cast<std::size_t>(k) / mus.size(), j = static_cast<std::size_t>(k) % mus.size();
    ids[static_cast<std::size_t>(k)] = adjoint::identity_check(lin, fields[i], mus[j], iopts);
  });
  for (int k = 0; k < npairs; ++k) {
    const auto i = static_cast<std::size_t>(k) / mus.size(), j = static_cast<std::size_t>(k) % mus.size();
    rep.checks.push_back(below("identity." + op + "[V" + std::to_string(i) + ",mu" + std::to_string(j) + "].residual",
                               ids[static_cast<std::size_t>(k)].residual, kIdentity));
  }

  {
    const auto theta = validation::wave_field(0.05, Vec2(0.7, 0.4), Vec2(-0.3, 0.9));
    const auto y0 = validation::polynomial_function({1.0, 0.3, -0.2, 0.1, 0.05, -0.1, 0.02, 0.01});
    const auto y1 = validation::polynomial_function({0.2, -0.1, 0.4, 0.0, 0.1, 0.0, 0.0, -0.03});
    const auto f = validation::polynomial_function({0.5, 0.1, 0.2, -0.05, 0.0, 0.1, 0.01, 0.0});
    const auto hd = validation::hadamard_domain_check(*s.mesh, *theta, y0, y1, f, cfg.t_list);
    rep.checks.push_back(at_least("hadamard.domain.order", hd.order, kHadamardOrder));
    const auto hb = validation::hadamard_boundary_check(*s.mesh, *theta, y0, y1, f, cfg.t_list);
    rep.checks.push_back(at_least("hadamard.boundary.order", hb.order, kHadamardOrder));
    double lap = 0.0;
    for (const auto& th : {validation::rotation_field(0.1), theta}) {
      lap = std::max(lap, validation::pulled_back_laplacian_check(*s.mesh, *th, f).max_residual);
      lap = std::max(lap, validation::pulled_back_laplacian_check(*s.mesh, *th, y0).max_residual);
    }
    rep.checks.push_back(below("laplacian.pulled_back.residual", lap, kLaplacian));
  }

  if (kind == ops::FlowKind::Potential) {
    adjoint::EigenOptions eo;
    eo.seed = cfg.seed;
    const auto r0 = adjoint::robin_uniqueness_probe(*s.disc, *s.quad, adjoint::curvature_coefficient(), eo);
    const auto r1 = adjoint::robin_uniqueness_probe(*s.disc, *s.quad, adjoint::curvature_coefficient(1.0, 1.0), eo);
    double kmin = HUGE_VAL;
    for (const auto& p : s.quad->points) kmin = std::min(kmin, p.kappa);
    // Positivity is only guaranteed for nonnegative wall curvature.
    if (kmin >= 0)
      rep.checks.push_back(above("robin.eigenvalue", r0.eigenvalue, 0.0));
    else
      rep.checks.push_back(info("robin.eigenvalue", r0.eigenvalue));
    rep.checks.push_back(at_least("robin.monotone_in_kappa", r1.eigenvalue - r0.eigenvalue, -1e-8));
  } else {
    const Setup ps = cfg.probe_level == cfg.level ? s : build_setup(cfg, cfg.probe_level);
    const ops::Linearization plin(ps.flow_case);
    const auto c11 = adjoint::c11_profile(plin);
    const auto ob = adjoint::stokes_obstruction_probe(*ps.disc, ps.quad, c11, cfg.obstruction_threshold, cfg.threads);
    rep.checks.push_back(info("obstruction.level", ob.level));
    rep.checks.push_back(info("obstruction.smallest_singular_value", ob.smallest));
    rep.checks.push_back(info("obstruction.dimension", ob.dimension));
    rep.checks.push_back(info("obstruction.dimension_threshold_div10", ob.dimension_low));
    rep.checks.push_back(info("obstruction.dimension_threshold_mul10", ob.dimension_high));
    rep.checks.push_back(info("obstruction.gap", ob.gap));
  }
  return rep;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
  const auto rep = run_verify(cfg);
  std::ostringstream text;
  text << "shapecalc verify: flow " << cfg.flow << ", domain " << cfg.domain_type << ", level " << cfg.level
       << ", degree " << cfg.degree << (cfg.flip_kappa ? ", debug: flipped kappa" : "") << "\n";
  rep.write(text);
  auto out = open_output(cfg, "verify_report.txt", log);
  out << text.str();
  log << text.str();
  for (const auto& c : rep.checks)
    if (!c.passed) log << "verification failed: " << c.name << "\n";
  return rep.passed() ? kOk : kVerificationFailed;
}

int cmd_solve(const ExperimentConfig& cfg, std::ostream& log) {
  const Setup s = build_setup(cfg, cfg.level);
  const auto base = ops::solve_base(s.flow_case);
  const std::string tag = level_tag(cfg.level);
  {
    auto out = open_output(cfg, "S_" + cfg.flow + "_" + tag + ".csv", log);
    fem::write_profile_csv(base.S, out);
  }
  {
    auto out = open_output(cfg, "psi_" + cfg.flow + "_" + tag + ".csv", log);
    fem::write_field_csv(base.psi, out);
  }
  if (s.flow_case.kind == ops::FlowKind::Stokes) {
    auto out = open_output(cfg, "omega_" + cfg.flow + "_" + tag + ".csv", log);
    fem::write_field_csv(base.omega, out);
  }
  log << "S on the wall: min " << fmt(base.S.values.minCoeff()) << ", max " << fmt(base.S.values.maxCoeff())
      << ", dofs " << s.disc->num_dofs() << ", wall points " << s.quad->size() << "\n";
  return kOk;
}

int cmd_linearize(const ExperimentConfig& cfg, int index, const std::string& field_spec, std::ostream& log) {
  const Setup s = build_setup(cfg, cfg.level);
  geometry::DeformationField V;
  std::string name;
  if (!field_spec.empty()) {
    V = geometry::DeformationField(parse_wall_function(s.domain, field_spec));
    name = "field";
  } else {
    const auto basis = basis_for(cfg, s.domain);
    if (index < 0 || index >= basis.size())
      throw ConfigError("--index: expected 0.." + std::to_string(basis.size() - 1) + ", got " + std::to_string(index));
    V = basis.fields[static_cast<std::size_t>(index)];
    name = "V" + std::to_string(index);
    log << "basis member " << index << ": " << basis.names[static_cast<std::size_t>(index)] << "\n";
  }
  const ops::Linearization lin(s.flow_case);
  auto dS = lin.apply(V);
  dS.name = cfg.flow == "potential" ? "dSp" : "dSs";
  auto vn = lin.normal_speed(V);
  vn.name = "vn";
  auto out = open_output(cfg, "dS_" + cfg.flow + "_" + name + "_" + level_tag(cfg.level) + ".csv", log);
  fem::write_profiles_csv({vn, dS}, out);
  log << "dS norm " << fmt(fem::wall_norm(dS)) << "\n";
  return kOk;
}

int cmd_control(const ExperimentConfig& cfg, std::ostream& log) {
  const Setup s = build_setup(cfg, cfg.level);
  const auto basis = basis_for(cfg, s.domain);
  const ops::Linearization lin(s.flow_case);
  const auto sys = control::assemble_response(lin, basis, cfg.threads);
  const auto target = build_target(cfg, s, sys);
  if (fem::wall_norm(target) == 0.0) throw ConfigError("control.target: target vanishes on the wall");

  std::vector<fem::WallProfile> kernel;
  if (s.flow_case.kind == ops::FlowKind::Stokes && cfg.project_kernel) {
    const Setup ps = cfg.probe_level == cfg.level ? s : build_setup(cfg, cfg.probe_level);
    const ops::Linearization plin(ps.flow_case);
    const auto ob = adjoint::stokes_obstruction_probe(*ps.disc, ps.quad, adjoint::c11_profile(plin),
                                                      cfg.obstruction_threshold, cfg.threads);
    adjoint::write_obstruction_report(ob, log);
    kernel = control::transfer_kernel(ob.kernel, s.quad);
  }
  const auto rows = control::residual_study(sys, target, cfg.n_list, cfg.alpha_list, kernel);
  {
    auto out = open_output(cfg, "control_study_" + cfg.flow + "_" + level_tag(cfg.level) + ".csv", log);
    control::write_study_csv(rows, out);
  }
  {
    const auto fit = control::fit_target(sys.prefix(cfg.n_list.back()), target, cfg.alpha_list.back());
    auto out = open_output(cfg, "control_coefficients_" + cfg.flow + "_" + level_tag(cfg.level) + ".csv", log);
    control::write_coefficients_csv(fit, basis.prefix(cfg.n_list.back()), out);
  }
  control::write_study_csv(rows, log);
  const bool mono = control::columns_monotone(rows);
  log << "residual columns " << (mono ? "monotone" : "NOT monotone") << " in N\n";
  return mono ? kOk : kVerificationFailed;
}

int cmd_mesh_export(const ExperimentConfig& cfg, std::ostream& log) {
  const auto domain = build_domain(cfg);
  const auto m = mesh::build_mesh(domain, cfg.h0, cfg.level);
  {
    auto out = open_output(cfg, "mesh_" + level_tag(cfg.level) + ".txt", log);
    mesh::write_mesh(*m, out);
  }
  auto out = open_output(cfg, "wall_quadrature_" + level_tag(cfg.level) + ".csv", log);
  mesh::write_quadrature_csv(*mesh::wall_quadrature(*m, cfg.quadrature_order), out);
  log << m->num_triangles() << " triangles, " << m->num_nodes() << " nodes, h " << fmt(m->max_edge_length()) << "\n";
  return kOk;
}

int cmd_mesh_import(const ExperimentConfig& cfg, const fs::path& mesh_path, std::ostream& log) {
  const auto domain = build_domain(cfg);
  std::ifstream in(mesh_path);
  if (!in) throw ConfigError("--mesh: cannot open '" + mesh_path.string() + "'");
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  const auto m = first.rfind("$MeshFormat", 0) == 0 ? mesh::read_gmsh(in, domain) : mesh::read_mesh(in, domain);
  m->check();
  {
    auto out = open_output(cfg, "imported_mesh.txt", log);
    mesh::write_mesh(*m, out);
  }
  auto out = open_output(cfg, "imported_wall_quadrature.csv", log);
  mesh::write_quadrature_csv(*mesh::wall_quadrature(*m, cfg.quadrature_order), out);
  log << m->num_triangles() << " triangles, " << m->num_nodes() << " nodes, " << m->edges.size() << " boundary edges\n";
  return kOk;
}

}  // namespace shapecalc::cli
