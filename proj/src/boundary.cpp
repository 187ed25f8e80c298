#include <cmath>
#include <map>
#include <set>

#include "gyrospec/errors.hpp"
#include "gyrospec/stability_atlas.hpp"

namespace gyrospec
{

namespace
{

struct EdgePoint
{
  Eigen::Vector2d point;
  double residual = 0;
  bool converged = false;
};

// Edges are numbered from their lower-left node: 2*node horizontal, 2*node+1 vertical.
struct EdgeIndex
{
  int nx;
  int horizontal(int ix, int iy) const { return 2 * (iy * nx + ix); }
  int vertical(int ix, int iy) const { return 2 * (iy * nx + ix) + 1; }
  std::pair<int, int> node(int edge) const { return {(edge / 2) % nx, (edge / 2) / nx}; }
  bool is_vertical(int edge) const { return edge % 2 == 1; }
};

class Refiner
{
public:
  explicit Refiner(const StabilityChart &chart) : chart_(chart) {}

  double evaluate(const Eigen::Vector2d &p) const
  {
    const PerturbationSet pert = chart_.pert.with_gains(chart_.gains_at(p.x(), p.y()));
    return classify(chart_.model, pert, chart_.tol).max_re;
  }

  // Illinois false position between two nodes of opposite sign.
  EdgePoint refine(Eigen::Vector2d a, double fa, Eigen::Vector2d b, double fb) const
  {
    EdgePoint out;
    int side = 0;
    for (int it = 0; it < chart_.tol.max_iterations; ++it)
    {
      const double t = fa / (fa - fb);
      Eigen::Vector2d c = a + t * (b - a);
      if (!(t > 0.0 && t < 1.0))
        c = 0.5 * (a + b);
      double fc;
      try
      {
        fc = evaluate(c);
      }
      catch (const Error &)
      {
        out.point = c;
        out.residual = std::numeric_limits<double>::quiet_NaN();
        return out;
      }
      out.point = c;
      out.residual = fc;
      if (std::abs(fc) < chart_.tol.boundary)
      {
        out.converged = true;
        return out;
      }
      if ((b - a).norm() <= 4.0 * std::numeric_limits<double>::epsilon() * (a.norm() + b.norm()))
        return out;
      if ((fc > 0) == (fa > 0))
      {
        a = c;
        fa = fc;
        if (side == -1)
          fb *= 0.5;
        side = -1;
      }
      else
      {
        b = c;
        fb = fc;
        if (side == 1)
          fa *= 0.5;
        side = 1;
      }
    }
    return out;
  }

private:
  const StabilityChart &chart_;
};

}  // namespace

bool on_frame(const Eigen::Vector2d &point, const Grid &grid)
{
  const double ex = 1e-12 * (grid.x.max - grid.x.min), ey = 1e-12 * (grid.y.max - grid.y.min);
  return std::abs(point.x() - grid.x.min) <= ex || std::abs(point.x() - grid.x.max) <= ex ||
         std::abs(point.y() - grid.y.min) <= ey || std::abs(point.y() - grid.y.max) <= ey;
}

std::vector<Polyline> trace_boundary(StabilityChart &chart)
{
  const Grid &g = chart.grid;
  const int nx = g.x.count, ny = g.y.count;
  const EdgeIndex index{nx};
  const auto value = [&](int ix, int iy) { return chart.cell(ix, iy).verdict.max_re; };
  const auto node = [&](int ix, int iy) { return Eigen::Vector2d(g.x.value(ix), g.y.value(iy)); };

  std::map<int, int> next;  // start edge -> end edge of the segment crossing one cell
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix)
    {
      const double v[4] = {value(ix, iy), value(ix + 1, iy), value(ix + 1, iy + 1), value(ix, iy + 1)};
      if (std::any_of(std::begin(v), std::end(v), [](double x) { return std::isnan(x); }))
        continue;
      const int edge[4] = {index.horizontal(ix, iy), index.vertical(ix + 1, iy), index.horizontal(ix, iy + 1),
                           index.vertical(ix, iy)};
      bool pos[4];
      for (int k = 0; k < 4; ++k)
        pos[k] = v[k] > 0.0;
      std::vector<int> crossings;
      for (int k = 0; k < 4; ++k)
        if (pos[k] != pos[(k + 1) % 4])
          crossings.push_back(k);
      if (crossings.size() == 2)
      {
        const int out = pos[crossings[0]] ? crossings[0] : crossings[1];
        const int in = out == crossings[0] ? crossings[1] : crossings[0];
        next[edge[out]] = edge[in];
      }
      else if (crossings.size() == 4)
      {
        const bool center = (v[0] + v[1] + v[2] + v[3]) > 0.0;
        for (int k = 0; k < 4; ++k)
          if (pos[k])
            next[edge[k]] = edge[center ? (k + 1) % 4 : (k + 3) % 4];
      }
    }

  Refiner refiner(chart);
  std::map<int, EdgePoint> cache;
  const auto point_on = [&](int edge) -> const EdgePoint & {
    auto it = cache.find(edge);
    if (it != cache.end())
      return it->second;
    const auto [ix, iy] = index.node(edge);
    const int jx = index.is_vertical(edge) ? ix : ix + 1;
    const int jy = index.is_vertical(edge) ? iy + 1 : iy;
    EdgePoint p = refiner.refine(node(ix, iy), value(ix, iy), node(jx, jy), value(jx, jy));
    return cache.emplace(edge, p).first->second;
  };

  std::set<int> ends;
  for (const auto &[s, e] : next)
    ends.insert(e);

  std::vector<Polyline> lines;
  std::set<int> visited;
  chart.flagged_edges = 0;
  const auto walk = [&](int start, bool cycle) {
    Polyline line;
    int edge = start;
    while (true)
    {
      visited.insert(edge);
      const EdgePoint &p = point_on(edge);
      if (p.converged)
      {
        line.points.push_back(p.point);
        line.residuals.push_back(p.residual);
      }
      else
      {
        ++chart.flagged_edges;
        if (line.points.size() > 1)
          lines.push_back(line);
        line = Polyline{};
        cycle = false;
      }
      const auto it = next.find(edge);
      if (it == next.end())
        break;
      edge = it->second;
      if (edge == start)
        break;
    }
    line.closed = cycle;
    if (line.points.size() > 1)
      lines.push_back(std::move(line));
  };

  for (const auto &[s, e] : next)
    if (!ends.count(s) && !visited.count(s))
      walk(s, false);
  for (const auto &[s, e] : next)
    if (!visited.count(s))
      walk(s, true);

  chart.boundaries = lines;
  return lines;
}

std::pair<double, double> boundary_slope_at_origin(const StabilityChart &chart, double fraction)
{
  const Grid &g = chart.grid;
  int omega_coord, delta_coord;
  if (g.x.param == Param::Omega && g.y.param == Param::delta)
    omega_coord = 0, delta_coord = 1;
  else if (g.x.param == Param::delta && g.y.param == Param::Omega)
    omega_coord = 1, delta_coord = 0;
  else
    throw DomainError("boundary slopes need an (Omega, delta) chart");
  const Axis &da = delta_coord == 1 ? g.y : g.x;
  if (!(da.min >= 0.0))
    throw DomainError("the delta axis must lie in delta >= 0");
  const double tol = 1e-12 * (da.max - da.min);
  const double cutoff = da.min + fraction * (da.max - da.min);

  std::vector<double> slopes;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  const auto fit = [&](const Polyline &line, bool reversed) {
    double sxy = 0, sxx = 0;
    std::size_t used = 0;
    const std::size_t n = line.points.size();
    for (std::size_t k = 0; k < n; ++k)
    {
      const Eigen::Vector2d &p = line.points[reversed ? n - 1 - k : k];
      if (p(delta_coord) > cutoff)
        break;
      sxy += p(omega_coord) * p(delta_coord);
      sxx += p(delta_coord) * p(delta_coord);
      ++used;
    }
    fewest = std::min(fewest, used);
    if (used >= 3)
      slopes.push_back(sxy / sxx);
  };
  for (const auto &line : chart.boundaries)
  {
    if (line.closed || line.points.empty())
      continue;
    if (std::abs(line.points.front()(delta_coord) - da.min) <= tol)
      fit(line, false);
    if (std::abs(line.points.back()(delta_coord) - da.min) <= tol)
      fit(line, true);
  }
  if (fewest < 3)
    throw ResolutionError("a boundary branch has fewer than 3 vertices near delta -> 0", static_cast<double>(fewest));
  if (slopes.size() != 2)
    throw ResolutionError("expected two boundary branches leaving delta = " + std::to_string(da.min) + ", found " +
                              std::to_string(slopes.size()),
                          static_cast<double>(slopes.size()));
  return {std::max(slopes[0], slopes[1]), std::min(slopes[0], slopes[1])};
}

}  // namespace gyrospec
