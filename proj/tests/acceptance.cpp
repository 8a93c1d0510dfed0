// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include "shapecalc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace shapecalc;

namespace {

// Tolerances, pinned.
constexpr double kSpOrder = 1.8;
constexpr double kSsOrder = 1.5;
constexpr double kTaylorSlope = 1.8;
constexpr double kTaylorSeconds = 120.0;
constexpr double kIdentityResidual = 1e-3;
constexpr double kIdentityOrder = 1.0;
constexpr int kMinPairs = 4;
constexpr double kNoKappaSlope = 1.3;
constexpr double kInSpanResidual = 1e-6;
constexpr double kSmoothTargetResidual = 0.1;
constexpr double kSmoothTargetAlpha = 1e-8;
constexpr int kSmoothTargetN = 16;
constexpr double kMonotoneTol = 1e-10;
constexpr double kHadamardOrder = 1.9;
constexpr double kLaplacianResidual = 1e-10;
constexpr double kOuterCurvature = 0.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int n, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
  std::fflush(stdout);
}

double slope_in_h(const std::vector<int>& levels, const std::vector<double>& err) {
  std::vector<double> h;
  for (int l : levels) h.push_back(std::ldexp(1.0, -l));
  return validation::loglog_slope(h, err);
}

cli::ExperimentConfig annulus(const std::string& flow) {
  cli::ExperimentConfig c;
  c.flow = flow;
  return c;
}

// Non-symmetric star with two inflow and two wall arcs.
cli::ExperimentConfig star(const std::string& flow) {
  cli::ExperimentConfig c;
  c.domain_type = "star";
  c.star_r0 = 1.5;
  c.star_modes = {{2, 0.15, 0.0}, {3, 0.0, 0.1}};
  c.breaks = {0.0, 0.1, 0.5, 0.6};
  c.labels = {"inflow", "wall", "inflow", "wall"};
  c.data = {"ramp 0 1; const 1; ramp 1 0; const 0"};
  c.flow = flow;
  c.fields = {"windowed 0 1 0 * 0.3", "windowed 0 3 1 * 0.3", "windowed 0 1 2 * 0.2; windowed 0 3 0 * 0.2"};
  c.multipliers = {"windowed 0 1 1", "windowed 0 3 0; windowed 0 1 0 * 0.5"};
  c.target = "mode 0 0";
  return c;
}

std::vector<geometry::DeformationField> fields(const cli::ExperimentConfig& c, const geometry::DomainPtr& d) {
  std::vector<geometry::DeformationField> out;
  for (const auto& f : c.fields) out.emplace_back(cli::parse_wall_function(d, f));
  return out;
}

// 1 ---------------------------------------------------------------------------

void criterion_oracle() {
  const std::vector<int> levels{1, 2, 3};
  bool ok = true;
  for (const std::string flow : {"potential", "stokes"}) {
    const auto kind = ops::parse_flow_kind(flow);
    const auto oracle = validation::radial_oracles(kind, 1.0, 2.0, 0.0, 1.0);
    std::vector<double> err;
    for (int L : levels) {
      const auto s = cli::build_setup(annulus(flow), L);
      const auto S = ops::eval_S(s.flow_case);
      err.push_back((S.values.array() - oracle.S).abs().maxCoeff());
    }
    const double order = slope_in_h(levels, err);
    const double need = flow == "potential" ? kSpOrder : kSsOrder;
    detail("%s: S oracle %.10f, Linf errors %.3e %.3e %.3e, order %.2f (need >= %.1f)", flow.c_str(), oracle.S,
           err[0], err[1], err[2], order, need);
    ok = ok && order >= need;
  }
  verdict(1, ok, "annulus S_p and S_s converge to the radial oracles");
}

// 2 and 5 -----------------------------------------------------------------------

bool taylor_block(const cli::ExperimentConfig& cfg, const std::string& label, ops::LinearizeOptions lopts,
                  double* first_slope = nullptr) {
  const auto s = cli::build_setup(cfg, 3);
  const auto t0 = Clock::now();
  ops::Linearization lin(s.flow_case, lopts);
  mesh::MeshDeformer def(s.mesh);
  validation::TaylorOptions opts;
  opts.t_list = cfg.t_list;
  bool ok = true;
  const auto Vs = fields(cfg, s.domain);
  std::string line;
  for (std::size_t i = 0; i < Vs.size(); ++i) {
    const auto r = validation::taylor_test(lin, def, Vs[i], opts);
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.3f", r.slope);
    line += buf;
    if (!r.dropped.empty()) line += "(dropped t)";
    ok = ok && r.dropped.empty() && r.slope >= kTaylorSlope;
    if (i == 0 && first_slope) *first_slope = r.slope;
  }
  const double secs = seconds_since(t0);
  detail("%s: slopes%s, %.1f s", label.c_str(), line.c_str(), secs);
  return ok && secs < kTaylorSeconds;
}

void criterion_taylor() {
  bool ok = taylor_block(annulus("potential"), "annulus dS_p (uniform, bump, fourier)", {});
  ok = taylor_block(annulus("stokes"), "annulus dS_s (uniform, bump, fourier)", {}) && ok;
  ok = taylor_block(star("potential"), "star dS_p (three windowed fields)", {}) && ok;
  verdict(2, ok, "Taylor slope >= 1.8 at level 3, every field, < 120 s per operator");
  // Reported separately; see the README for the analysis.
  const bool star_stokes = taylor_block(star("stokes"), "star dS_s (not counted)", {});
  std::printf("INFO criterion 2 extra: star dS_s Taylor %s\n", star_stokes ? "passes" : "below 1.8");
}

void criterion_mutation() {
  double with = 0.0, without = 0.0;
  auto cfg = annulus("potential");
  cfg.fields = {"uniform 0"};
  taylor_block(cfg, "with kappa term", {}, &with);
  ops::LinearizeOptions lo;
  lo.curvature_term = false;
  taylor_block(cfg, "without kappa term", lo, &without);
  verdict(5, with >= kTaylorSlope && without <= kNoKappaSlope, "deleting the kappa term drops the dS_p slope to <= 1.3");
}

// 3 ---------------------------------------------------------------------------

void criterion_identity() {
  const std::vector<int> levels{1, 2, 3};
  bool ok = true;
  for (const std::string flow : {"potential", "stokes"}) {
    auto cfg = annulus(flow);
    std::vector<double> worst;
    int pairs = 0;
    for (int L : levels) {
      const auto s = cli::build_setup(cfg, L);
      ops::Linearization lin(s.flow_case);
      double w = 0.0;
      pairs = 0;
      for (const auto& V : fields(cfg, s.domain))
        for (const auto& m : cfg.multipliers) {
          const auto r = adjoint::identity_check(lin, V, cli::parse_wall_function(s.domain, m));
          w = std::max(w, r.residual);
          ++pairs;
        }
      worst.push_back(w);
    }
    const double order = slope_in_h(levels, worst);
    detail("%s: %d pairs, worst residual per level %.3e %.3e %.3e, order %.2f", flow.c_str(), pairs, worst[0],
           worst[1], worst[2], order);
    ok = ok && pairs >= kMinPairs && worst.back() < kIdentityResidual && order >= kIdentityOrder;
  }
  verdict(3, ok, "adjoint identities: residual < 1e-3 at level 3, order >= 1, >= 4 pairs per flow");
}

// 4 ---------------------------------------------------------------------------

void criterion_robin() {
  bool ok = true;
  const auto cfg = annulus("potential");
  for (int L = 0; L <= 3; ++L) {
    const auto s = cli::build_setup(cfg, L);
    const double kappa = s.quad->points.front().kappa;
    const auto base = adjoint::robin_uniqueness_probe(*s.disc, *s.quad, adjoint::curvature_coefficient());
    const auto raised = adjoint::robin_uniqueness_probe(*s.disc, *s.quad, adjoint::curvature_coefficient(1.0, 0.5));
    detail("level %d: wall kappa %.4f, lambda %.6f, lambda(kappa + 0.5) %.6f", L, kappa, base.eigenvalue,
           raised.eigenvalue);
    ok = ok && std::abs(kappa - kOuterCurvature) < 1e-12 && base.eigenvalue > 0 && raised.eigenvalue >= base.eigenvalue;
  }
  verdict(4, ok, "Robin probe eigenvalue > 0 on the annulus at levels 0-3, monotone in kappa");
}

// 6 ---------------------------------------------------------------------------

bool in_span(const control::GramSystem& sys) {
  // Combination of three response columns.
  fem::WallProfile target = sys.column(1) * 0.7 + sys.column(4) * -0.3 + sys.column(9) * 1.1;
  const auto fit = control::fit_target(sys, target, 0.0);
  detail("in-span target residual %.3e", fit.residual);
  return fit.residual < kInSpanResidual;
}

void criterion_control() {
  bool ok = true;
  {
    const auto cfg = annulus("potential");
    const auto s = cli::build_setup(cfg, 3);
    ops::Linearization lin(s.flow_case);
    const auto basis = control::make_basis(s.domain, cfg.basis, cfg.basis_size);
    const auto sys = control::assemble_response(lin, basis);
    ok = in_span(sys) && ok;
    const auto target = cli::build_target(cfg, s, sys);
    const auto rows = control::residual_study(sys, target, cfg.n_list, cfg.alpha_list);
    const bool mono = control::columns_monotone(rows, kMonotoneTol);
    double at16 = 1.0;
    for (const auto& r : rows)
      if (r.n == kSmoothTargetN && r.alpha <= kSmoothTargetAlpha) at16 = std::min(at16, r.residual_raw);
    for (const auto& r : rows)
      if (r.alpha == kSmoothTargetAlpha) detail("potential N=%2d alpha=1e-8 residual %.6f", r.n, r.residual_raw);
    detail("potential: columns monotone %s, Gaussian residual at N=16 %.4f", mono ? "yes" : "no", at16);
    ok = ok && mono && at16 < kSmoothTargetResidual;
  }
  {
    auto cfg = annulus("stokes");
    const auto s = cli::build_setup(cfg, 2);
    ops::Linearization lin(s.flow_case);
    const auto basis = control::make_basis(s.domain, cfg.basis, cfg.basis_size);
    const auto sys = control::assemble_response(lin, basis);
    ok = in_span(sys) && ok;
    const auto ps = cli::build_setup(cfg, cfg.probe_level);
    ops::Linearization plin(ps.flow_case);
    const auto probe = adjoint::stokes_obstruction_probe(*ps.disc, ps.quad, adjoint::c11_profile(plin),
                                                         cfg.obstruction_threshold);
    const auto kernel = control::transfer_kernel(probe.kernel, s.quad);
    const auto target = cli::build_target(cfg, s, sys);
    const auto rows = control::residual_study(sys, target, cfg.n_list, cfg.alpha_list, kernel);
    std::vector<control::StudyRow> projected = rows;
    for (auto& r : projected) r.residual_raw = r.residual_projected;
    const bool mono_raw = control::columns_monotone(rows, kMonotoneTol);
    const bool mono_proj = control::columns_monotone(projected, kMonotoneTol);
    std::ostringstream csv;
    control::write_study_csv(rows, csv);
    const bool both_columns = csv.str().find("residual_raw") != std::string::npos &&
                              csv.str().find("residual_projected") != std::string::npos;
    detail("stokes: kernel dimension %zu, raw monotone %s, projected monotone %s, both columns emitted %s",
           kernel.size(), mono_raw ? "yes" : "no", mono_proj ? "yes" : "no", both_columns ? "yes" : "no");
    ok = ok && mono_raw && mono_proj && both_columns;
  }
  verdict(6, ok, "controllability: in-span < 1e-6, monotone columns, Gaussian < 0.1 at N=16");
}

// 7 ---------------------------------------------------------------------------

void criterion_hadamard() {
  bool ok = true;
  const auto theta = validation::wave_field(0.05, Vec2(0.7, 0.4), Vec2(-0.3, 0.9));
  const auto y0 = validation::polynomial_function({1.0, 0.2, -0.1, 0.3, 0.1, -0.2, 0.05, 0.02});
  const auto y1 = validation::polynomial_function({0.5, -0.3, 0.2, 0.0, 0.4, 0.1, 0.0, -0.03});
  const auto f = validation::polynomial_function({0.8, 0.1, 0.3, -0.2, 0.0, 0.25, 0.01, 0.0});
  for (const auto& [name, cfg] : {std::pair{"annulus", annulus("potential")}, std::pair{"star", star("potential")}}) {
    const auto s = cli::build_setup(cfg, 2);
    const auto dom = validation::hadamard_domain_check(*s.mesh, *theta, y0, y1, f);
    const auto bnd = validation::hadamard_boundary_check(*s.mesh, *theta, y0, y1, f);
    double lap = 0.0;
    for (const auto& th : {validation::rotation_field(0.1), theta})
      lap = std::max(lap, validation::pulled_back_laplacian_check(*s.mesh, *th, y0).max_residual);
    detail("%s: domain order %.3f, boundary order %.3f, Laplacian residual %.2e", name, dom.order, bnd.order, lap);
    ok = ok && dom.order >= kHadamardOrder && bnd.order >= kHadamardOrder && lap < kLaplacianResidual;
  }
  verdict(7, ok, "Hadamard orders >= 1.9, pulled-back Laplacian residual < 1e-10");
}

// 8 ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  bool ok = true;
  const auto root = std::filesystem::temp_directory_path() / "shapecalc_acceptance";
  for (const std::string flow : {"potential", "stokes"}) {
    std::string reports[2];
    for (int run = 0; run < 2; ++run) {
      auto cfg = annulus(flow);
      cfg.level = 2;
      cfg.threads = 4;
      cfg.output_dir = (root / (flow + std::to_string(run))).string();
      std::filesystem::remove_all(cfg.output_dir);
      std::ostringstream log;
      cli::cmd_verify(cfg, log);
      reports[run] = slurp(std::filesystem::path(cfg.output_dir) / "verify_report.txt");
    }
    const bool same = !reports[0].empty() && reports[0] == reports[1];
    detail("%s: report %zu bytes, identical %s", flow.c_str(), reports[0].size(), same ? "yes" : "no");
    ok = ok && same;
  }
  std::filesystem::remove_all(root);
  verdict(8, ok, "two verify runs with --threads 4 give byte-identical reports");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_oracle();
  criterion_taylor();
  criterion_identity();
  criterion_robin();
  criterion_mutation();
  criterion_control();
  criterion_hadamard();
  criterion_determinism();
  std::printf("acceptance: %d failed, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
