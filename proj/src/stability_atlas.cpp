#include "gyrospec/stability_atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gyrospec/errors.hpp"

namespace gyrospec
{

const char *to_string(StabilityClass cls)
{
  switch (cls)
  {
    case StabilityClass::asymptotically_stable:
      return "asymptotically_stable";
    case StabilityClass::marginal:
      return "marginal";
    case StabilityClass::flutter:
      return "flutter";
    case StabilityClass::divergence:
      return "divergence";
  }
  return "?";
}

const char *to_string(Param p)
{
  switch (p)
  {
    case Param::Omega:
      return "Omega";
    case Param::kappa:
      return "kappa";
    case Param::delta:
      return "delta";
    case Param::nu:
      return "nu";
  }
  return "?";
}

const char *to_string(SingularKind kind)
{
  return kind == SingularKind::diabolical ? "diabolical" : "exceptional";
}

std::optional<Param> param_from_string(const std::string &name)
{
  for (Param p : {Param::Omega, Param::kappa, Param::delta, Param::nu})
    if (name == to_string(p))
      return p;
  return std::nullopt;
}

double get(const Gains &g, Param p)
{
  switch (p)
  {
    case Param::Omega:
      return g.Omega;
    case Param::kappa:
      return g.kappa;
    case Param::delta:
      return g.delta;
    case Param::nu:
      return g.nu;
  }
  return 0.0;
}

Gains with_param(Gains g, Param p, double value)
{
  switch (p)
  {
    case Param::Omega:
      g.Omega = value;
      break;
    case Param::kappa:
      g.kappa = value;
      break;
    case Param::delta:
      g.delta = value;
      break;
    case Param::nu:
      g.nu = value;
      break;
  }
  return g;
}

double Axis::value(int i) const
{
  if (i == count - 1)
    return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

StabilityVerdict classify(const Spectrum &spectrum, const Tolerances &tol)
{
  StabilityVerdict v;
  if (spectrum.size() == 0)
    return v;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < spectrum.size(); ++k)
  {
    const Complex z = spectrum.eigenvalues(k), b = spectrum.eigenvalues(best);
    if (z.real() > b.real() || (z.real() == b.real() && z.imag() > b.imag()))
      best = k;
  }
  v.critical_eigenvalue = spectrum.eigenvalues(best);
  v.max_re = v.critical_eigenvalue.real();
  const double t = tol.marginal * std::max(1.0, std::abs(v.critical_eigenvalue));
  if (v.max_re < -t)
    v.cls = StabilityClass::asymptotically_stable;
  else if (v.max_re <= t)
    v.cls = StabilityClass::marginal;
  else
    v.cls = std::abs(v.critical_eigenvalue.imag()) > t ? StabilityClass::flutter : StabilityClass::divergence;
  return v;
}

StabilityVerdict classify(const RotorModel &model, const PerturbationSet &pert, const Tolerances &tol)
{
  return classify(solve_qep(build_pencil(model, pert), tol), tol);
}

Gains StabilityChart::gains_at(double x, double y) const
{
  return with_param(with_param(pert.gains(), grid.x.param, x), grid.y.param, y);
}

int StabilityChart::failed_cells() const
{
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const CellResult &c) { return c.error.has_value(); }));
}

namespace
{

void validate(const Axis &a, const char *name)
{
  if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.max > a.min) || a.count < 2)
    throw DomainError(std::string("grid axis ") + name + " must be finite with max > min and count >= 2");
}

}  // namespace

StabilityChart sweep2d(const RotorModel &model, const PerturbationSet &pert, const Grid &grid, int threads,
                       const Tolerances &tol)
{
  validate(grid.x, "x");
  validate(grid.y, "y");
  if (grid.x.param == grid.y.param)
    throw DomainError("grid axes must vary different parameters");
  StabilityChart chart{model, pert, grid, tol, {}, {}, 0, {}};
  chart.cells.resize(static_cast<std::size_t>(grid.x.count) * grid.y.count);

  std::atomic<int> next_row{0};
  const auto work = [&]() {
    for (int iy = next_row++; iy < grid.y.count; iy = next_row++)
      for (int ix = 0; ix < grid.x.count; ++ix)
      {
        CellResult &cell = chart.cells[static_cast<std::size_t>(iy) * grid.x.count + ix];
        try
        {
          cell.verdict = classify(model, pert.with_gains(chart.gains_at(grid.x.value(ix), grid.y.value(iy))), tol);
        }
        catch (const Error &e)
        {
          cell.error = e.what();
          cell.verdict.max_re = std::numeric_limits<double>::quiet_NaN();
        }
      }
  };

  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, grid.y.count);
  std::vector<std::thread> workers;
  for (int t = 1; t < n; ++t)
    workers.emplace_back(work);
  work();
  for (auto &w : workers)
    w.join();
  return chart;
}

}  // namespace gyrospec
