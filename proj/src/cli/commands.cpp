#include "gyrospec/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gyrospec/cli/csv.hpp"
#include "gyrospec/errors.hpp"
#include "gyrospec/floquet.hpp"
#include "gyrospec/perturbation.hpp"
#include "gyrospec/qep_solver.hpp"
#include "gyrospec/stability_atlas.hpp"

namespace gyrospec::cli
{

namespace
{

using Row = std::vector<std::string>;

std::string num(double x)
{
  return format_number(x);
}

std::string opt(const std::optional<double> &x)
{
  return x ? format_number(*x) : std::string();
}

class Context
{
public:
  Context(const RunConfig &config, int threads, std::ostream &out) : cfg(config), threads(threads), out_(out) {}

  void write(const std::string &suffix, const std::string &content)
  {
    const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / (cfg.prefix + "_" + suffix + ".csv");
    write_atomic(path, content);
    files.push_back(path);
    out_ << "wrote " << path.string() << "\n";
  }

  const RunConfig &cfg;
  int threads;
  std::vector<std::filesystem::path> files;

private:
  std::ostream &out_;
};

Eigen::Matrix2d doublet_matrix(const Eigen::MatrixXd &M)
{
  if (M.rows() != 2 || M.cols() != 2)
    throw NotImplemented("this command needs a single doublet (model.n = 1)");
  return M;
}

Row gains_row(const Gains &g)
{
  return {num(g.Omega), num(g.kappa), num(g.delta), num(g.nu)};
}

Row verdict_row(const StabilityVerdict &v)
{
  return {num(v.max_re), num(v.critical_eigenvalue.imag()), to_string(v.cls)};
}

std::string sweep_csv(const StabilityChart &chart)
{
  CsvTable t({"Omega", "kappa", "delta", "nu", "max_re", "im_at_max", "class"});
  for (int iy = 0; iy < chart.grid.y.count; ++iy)
    for (int ix = 0; ix < chart.grid.x.count; ++ix)
    {
      Row r = gains_row(chart.gains_at(chart.grid.x.value(ix), chart.grid.y.value(iy)));
      const CellResult &c = chart.cell(ix, iy);
      if (c.error)
      {
        for (const char *f : {"nan", "nan", "error"})
          r.push_back(f);
      }
      else
      {
        const Row v = verdict_row(c.verdict);
        r.insert(r.end(), v.begin(), v.end());
      }
      t.add_row(std::move(r));
    }
  return t.str();
}

std::string polyline_csv(const Polyline &line)
{
  CsvTable t({"param1", "param2", "max_re_residual"});
  for (std::size_t k = 0; k < line.points.size(); ++k)
    t.add_row({num(line.points[k].x()), num(line.points[k].y()), num(line.residuals[k])});
  // closed contours repeat their first vertex
  if (line.closed && !line.points.empty())
    t.add_row({num(line.points.front().x()), num(line.points.front().y()), num(line.residuals.front())});
  return t.str();
}

// Writes one file per polyline plus an index; returns the polyline count.
std::size_t write_boundaries(Context &ctx, const std::string &stem, const StabilityChart &chart)
{
  CsvTable index({"polyline", "points", "closed", "frame_endpoints"});
  for (std::size_t k = 0; k < chart.boundaries.size(); ++k)
  {
    const Polyline &line = chart.boundaries[k];
    ctx.write(stem + "_boundary_" + std::to_string(k), polyline_csv(line));
    int frame = 0;
    if (!line.closed && !line.points.empty())
      frame = on_frame(line.points.front(), chart.grid) + on_frame(line.points.back(), chart.grid);
    index.add_row({std::to_string(k), std::to_string(line.points.size()), line.closed ? "1" : "0", std::to_string(frame)});
  }
  ctx.write(stem + "_boundaries", index.str());
  return chart.boundaries.size();
}

Grid configured_grid(const RunConfig &cfg, const Grid &fallback)
{
  Grid g = fallback;
  if (cfg.x && cfg.x->param == fallback.x.param)
    g.x = *cfg.x;
  else if (cfg.x)
    g.x.count = cfg.x->count;
  if (cfg.y && cfg.y->param == fallback.y.param)
    g.y = *cfg.y;
  else if (cfg.y)
    g.y.count = cfg.y->count;
  return g;
}

// Best one-to-one assignment of `b` to `a` (indices into b), by total distance.
std::vector<std::size_t> match(const std::vector<Complex> &a, const std::vector<Complex> &b)
{
  std::vector<std::size_t> perm(b.size()), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do
  {
    double cost = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      cost += std::abs(a[i] - b[perm[i]]);
    if (cost < best_cost)
    {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void cmd_spectrum(Context &ctx)
{
  const Spectrum s = solve_qep(build_pencil(ctx.cfg.model(), ctx.cfg.perturbation()), ctx.cfg.tol);
  CsvTable t({"re", "im", "residual"});
  for (Eigen::Index i = 0; i < s.size(); ++i)
    t.add_row({num(s.eigenvalues(i).real()), num(s.eigenvalues(i).imag()), num(s.residuals(i))});
  ctx.write("spectrum", t.str());
}

void cmd_mesh(Context &ctx)
{
  const RotorModel model = ctx.cfg.model();
  const double Omega = ctx.cfg.gains.Omega;
  CsvTable t({"s", "branch", "conj", "re", "im", "wave"});
  for (const auto &e : mesh_spectrum(model, Omega))
    t.add_row({std::to_string(e.s), to_string(e.branch), e.conj ? "1" : "0", num(e.value.real()), num(e.value.imag()),
               to_string(classify_wave(e.s, e.branch, Omega, model))});
  ctx.write("mesh", t.str());
}

void cmd_report(Context &ctx)
{
  const RotorModel model = ctx.cfg.model();
  const PerturbationSet pert = ctx.cfg.perturbation();
  const PerturbationReport r = perturbation_report(model, pert);
  const StabilityVerdict v = classify(model, pert, ctx.cfg.tol);
  CsvTable t({"Omega", "kappa", "delta", "nu", "A", "beta0", "kappa0", "omega0", "Omega_cr_nu", "c_re", "c_im", "B",
              "epsilon", "predicted_stable", "max_re", "im_at_max", "class"});
  Row row = gains_row(pert.gains());
  for (const std::string &f : {num(r.A), opt(r.beta0), opt(r.kappa0), opt(r.omega0), opt(r.Omega_cr_nu.value),
                               num(r.c.real()), num(r.c.imag()), num(r.B), num(r.epsilon),
                               std::string(r.predicted_stable ? "1" : "0")})
    row.push_back(f);
  const Row vr = verdict_row(v);
  row.insert(row.end(), vr.begin(), vr.end());
  t.add_row(std::move(row));
  ctx.write("report", t.str());
}

StabilityChart chart_for(Context &ctx, const PerturbationSet &pert, const Grid &grid)
{
  return sweep2d(ctx.cfg.model(), pert, grid, ctx.threads, ctx.cfg.tol);
}

void cmd_sweep(Context &ctx)
{
  const StabilityChart chart = chart_for(ctx, ctx.cfg.perturbation(), Grid{*ctx.cfg.x, *ctx.cfg.y});
  ctx.write("sweep", sweep_csv(chart));
}

void cmd_boundary(Context &ctx)
{
  StabilityChart chart = chart_for(ctx, ctx.cfg.perturbation(), Grid{*ctx.cfg.x, *ctx.cfg.y});
  trace_boundary(chart);
  write_boundaries(ctx, "boundary", chart);
}

void cmd_ep(Context &ctx)
{
  const auto found = find_exceptional_points(ctx.cfg.model(), ctx.cfg.perturbation(), ctx.cfg.ep_box, ctx.cfg.tol);
  CsvTable t({"kind", "Omega", "kappa", "delta", "nu", "re", "im", "discriminant", "poly_residual", "eigenvector_count",
              "min_singular_value", "newton_iterations"});
  for (const auto &p : found.points)
  {
    Row r{to_string(p.kind)};
    const Row g = gains_row(p.location);
    r.insert(r.end(), g.begin(), g.end());
    for (const std::string &f : {num(p.eigenvalue.real()), num(p.eigenvalue.imag()), num(p.discriminant),
                                 num(p.poly_residual), std::to_string(p.eigenvector_count),
                                 num(p.singular_values.size() ? p.singular_values.minCoeff() : 0.0),
                                 std::to_string(p.newton_iterations)})
      r.push_back(f);
    t.add_row(std::move(r));
  }
  ctx.write("ep", t.str());
  CsvTable misses({"Omega", "kappa", "delta", "nu", "re", "im", "discriminant", "reason"});
  for (const auto &m : found.near_misses)
  {
    Row r = gains_row(m.location);
    for (const std::string &f : {num(m.eigenvalue.real()), num(m.eigenvalue.imag()), num(m.discriminant), m.reason})
      r.push_back(f);
    misses.add_row(std::move(r));
  }
  ctx.write("ep_near_misses", misses.str());
}

void cmd_floquet(Context &ctx)
{
  const PeriodicSystem ps(ctx.cfg.model(), ctx.cfg.perturbation());
  const FloquetResult r = monodromy(ps, ctx.cfg.floquet_steps, ctx.cfg.tol);
  std::vector<Complex> predicted(r.predicted_multipliers.begin(), r.predicted_multipliers.end());
  std::vector<Complex> computed(r.multipliers.begin(), r.multipliers.end());
  const auto order = match(predicted, computed);
  CsvTable t({"index", "re", "im", "abs", "predicted_re", "predicted_im"});
  for (std::size_t i = 0; i < predicted.size(); ++i)
  {
    const Complex m = computed[order[i]];
    t.add_row({std::to_string(i), num(m.real()), num(m.imag()), num(std::abs(m)), num(predicted[i].real()),
               num(predicted[i].imag())});
  }
  ctx.write("floquet", t.str());
  CsvTable s({"period", "steps", "match_error", "resolution_estimate", "liouville_error"});
  s.add_row({num(ps.period()), std::to_string(r.steps), num(r.match_error), num(r.resolution_estimate),
             num(r.liouville_error)});
  ctx.write("floquet_summary", s.str());
}

void cmd_fig1(Context &ctx)
{
  const RunConfig &cfg = ctx.cfg;
  const Eigen::Matrix2d D = doublet_matrix(cfg.D), K = doublet_matrix(cfg.K);
  const ModalData md = modal_data(D, K, cfg.omegas(0));
  const RotorModel model = cfg.model();
  const Grid g = configured_grid(cfg, Grid{{Param::Omega, -0.5, 0.5, 201}, {Param::delta, 0.0, 1.0, 2}});
  const PerturbationSet base = cfg.perturbation();
  for (const auto &[panel, delta] : {std::pair{"a", 0.0}, std::pair{"b", cfg.gains.delta}})
  {
    CsvTable t({"Omega", "branch", "exact_re", "exact_im", "approx_re", "approx_im"});
    for (int i = 0; i < g.x.count; ++i)
    {
      Gains gains = cfg.gains;
      gains.delta = delta;
      gains.Omega = g.x.value(i);
      const Spectrum s = solve_qep(build_pencil(model, base.with_gains(gains)), cfg.tol);
      const auto approx = approx_eigenvalues(md, gains.Omega, gains.delta, gains.kappa, gains.nu);
      const std::vector<Complex> a(approx.begin(), approx.end());
      const std::vector<Complex> e(s.eigenvalues.data(), s.eigenvalues.data() + s.size());
      const auto order = match(a, e);
      for (std::size_t b = 0; b < a.size(); ++b)
        t.add_row({num(gains.Omega), std::to_string(b + 1), num(e[order[b]].real()), num(e[order[b]].imag()),
                   num(a[b].real()), num(a[b].imag())});
    }
    ctx.write(std::string("fig1") + panel, t.str());
  }
}

struct Fig2Panel
{
  const char *name;
  Eigen::Matrix2d D;
  Grid grid;
};

void cmd_fig2(Context &ctx)
{
  const RunConfig &cfg = ctx.cfg;
  const Eigen::Matrix2d K = doublet_matrix(cfg.K);
  const double stripe = 0.5 * (3.0 + std::sqrt(5.0));
  const std::vector<Fig2Panel> panels{
      {"a", (Eigen::Matrix2d() << -0.1, 0, 0, 2).finished(), {{Param::Omega, -0.2, 0.2, 101}, {Param::kappa, -0.3, 0.3, 101}}},
      {"b", (Eigen::Matrix2d() << -1, 0, 0, 2).finished(), {{Param::Omega, -0.5, 0.5, 101}, {Param::kappa, -0.25, 0.25, 101}}},
      {"c", (Eigen::Matrix2d() << -1, 0, 0, stripe).finished(), {{Param::Omega, -0.5, 0.5, 101}, {Param::kappa, -0.2, 0.2, 101}}}};
  CsvTable summary({"panel", "d11", "d12", "d22", "A", "delta", "nu", "polylines", "closed", "open"});
  for (const auto &p : panels)
  {
    const double A = invariant_A(p.D, K);
    if (p.name[0] == 'a' && !(A > 0.0))
      throw DomainError("the ellipse panel needs A > 0, got A = " + num(A));
    if (p.name[0] == 'b' && !(A < 0.0))
      throw DomainError("the hyperbola panel needs A < 0, got A = " + num(A));
    const PerturbationSet pert(Eigen::MatrixXd(p.D), cfg.K, cfg.N, cfg.gains, cfg.tol);
    StabilityChart chart = chart_for(ctx, pert, configured_grid(cfg, p.grid));
    trace_boundary(chart);
    const std::string stem = std::string("fig2") + p.name;
    ctx.write(stem + "_sweep", sweep_csv(chart));
    write_boundaries(ctx, stem, chart);
    const auto closed = std::count_if(chart.boundaries.begin(), chart.boundaries.end(), [](const Polyline &l) { return l.closed; });
    summary.add_row({p.name, num(p.D(0, 0)), num(p.D(0, 1)), num(p.D(1, 1)), num(A), num(cfg.gains.delta),
                     num(cfg.gains.nu), std::to_string(chart.boundaries.size()), std::to_string(closed),
                     std::to_string(chart.boundaries.size() - closed)});
  }
  ctx.write("fig2_summary", summary.str());
}

void cmd_fig3(Context &ctx)
{
  const RunConfig &cfg = ctx.cfg;
  const Eigen::Matrix2d D = doublet_matrix(cfg.D), K = doublet_matrix(cfg.K);
  const Grid plane = configured_grid(cfg, Grid{{Param::Omega, -0.3, 0.3, 101}, {Param::kappa, -0.5, 0.5, 101}});
  CsvTable levels({"level", "delta", "polylines", "closed"});
  for (std::size_t i = 0; i < cfg.fig3_deltas.size(); ++i)
  {
    Gains g = cfg.gains;
    g.delta = cfg.fig3_deltas[i];
    StabilityChart chart = chart_for(ctx, cfg.perturbation().with_gains(g), plane);
    trace_boundary(chart);
    const std::size_t count = write_boundaries(ctx, "fig3_level" + std::to_string(i), chart);
    const auto closed = std::count_if(chart.boundaries.begin(), chart.boundaries.end(), [](const Polyline &l) { return l.closed; });
    levels.add_row({std::to_string(i), num(g.delta), std::to_string(count), std::to_string(closed)});
  }
  ctx.write("fig3_levels", levels.str());

  const ModalData md = modal_data(D, K, cfg.omegas(0));
  CsvTable slopes({"kappa_ratio", "kappa", "nu", "slope_upper", "slope_lower", "predicted_upper", "predicted_lower",
                   "beta0", "status"});
  if (cfg.gains.nu != 0.0 && md.rho_gap() > 0.0)
  {
    const double b0 = beta0(D, K);
    const double k0 = ep_location(K, cfg.gains.nu, cfg.omegas(0)).kappa0;
    for (double ratio : {1.001, 1.01, 1.1, 2.0})
    {
      Gains g = cfg.gains;
      g.kappa = ratio * k0;
      g.delta = 0.0;
      g.Omega = 0.0;
      const auto predicted = umbrella_omega(md, D, K, g.kappa, 1.0, g.nu);
      StabilityChart chart = chart_for(ctx, cfg.perturbation().with_gains(g), slope_grid(b0, md.trD, ratio));
      trace_boundary(chart);
      Row r{num(ratio), num(g.kappa), num(g.nu)};
      try
      {
        const auto [upper, lower] = boundary_slope_at_origin(chart);
        r.push_back(num(upper));
        r.push_back(num(lower));
        r.push_back(predicted ? num(std::max(predicted->first, predicted->second)) : "");
        r.push_back(predicted ? num(std::min(predicted->first, predicted->second)) : "");
        r.push_back(num(b0));
        r.push_back("ok");
      }
      catch (const ResolutionError &e)
      {
        for (int k = 0; k < 2; ++k)
          r.push_back("nan");
        r.push_back(predicted ? num(std::max(predicted->first, predicted->second)) : "");
        r.push_back(predicted ? num(std::min(predicted->first, predicted->second)) : "");
        r.push_back(num(b0));
        r.push_back("unresolved");
      }
      slopes.add_row(std::move(r));
    }
  }
  ctx.write("fig3_slopes", slopes.str());
}

}  // namespace

Grid slope_grid(double beta0, double trD, double ratio, int nx, int ny)
{
  if (!(ratio > 1.0))
    throw DomainError("umbrella lines exist only for kappa > kappa0");
  const double root = trD * std::sqrt(ratio * ratio - 1.0) / 4.0;
  const double upper = beta0 * ratio + std::abs(root), lower = beta0 * ratio - std::abs(root);
  const double dmax = std::min(2e-3, 0.9 * (ratio - 1.0)), dmin = dmax / 3.0;
  const double lo = std::min({lower * dmin, lower * dmax, upper * dmin, upper * dmax});
  const double hi = std::max({lower * dmin, lower * dmax, upper * dmin, upper * dmax});
  const double pad = 0.2 * (hi - lo);
  return Grid{{Param::Omega, lo - pad, hi + pad, nx}, {Param::delta, dmin, dmax, ny}};
}

RunResult run(const RunConfig &config, int threads, std::ostream &out, std::ostream &err)
{
  Context ctx(config, threads, out);
  RunResult result;
  try
  {
    switch (config.command)
    {
    case Command::spectrum:
      cmd_spectrum(ctx);
      break;
    case Command::mesh:
      cmd_mesh(ctx);
      break;
    case Command::report:
      cmd_report(ctx);
      break;
    case Command::sweep:
      cmd_sweep(ctx);
      break;
    case Command::boundary:
      cmd_boundary(ctx);
      break;
    case Command::ep:
      cmd_ep(ctx);
      break;
    case Command::floquet:
      cmd_floquet(ctx);
      break;
    case Command::fig1:
      cmd_fig1(ctx);
      break;
    case Command::fig2:
      cmd_fig2(ctx);
      break;
    case Command::fig3:
      cmd_fig3(ctx);
      break;
    }
  }
  catch (const ConfigError &e)
  {
    err << "gyrospec: " << e.what() << "\n";
    result.exit_code = 2;
  }
  catch (const std::exception &e)
  {
    err << "gyrospec: " << to_string(config.command) << ": " << e.what() << "\n";
    result.exit_code = 1;
  }
  result.files = ctx.files;
  return result;
}

}  // namespace gyrospec::cli
