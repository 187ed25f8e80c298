#include "gyrospec/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "gyrospec/cli/csv.hpp"

namespace gyrospec::cli
{

namespace
{

const char *const command_names[] = {"spectrum", "mesh", "report", "sweep", "boundary",
                                     "ep", "floquet", "fig1", "fig2", "fig3"};

const char *const tolerance_names[] = {"symmetry", "cluster", "poly_residual", "eig_residual", "marginal",
                                       "boundary", "rank", "discriminant", "floquet_resolution", "max_iterations"};

struct Entry
{
  std::string value;
  int line;
};

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t levenshtein(const std::string &a, const std::string &b)
{
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j)
    row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
  {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
    {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string tail(const std::string &key)
{
  const auto dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string suggestion(const std::string &key)
{
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto &k : known_keys())
  {
    const std::size_t d = std::min(levenshtein(lower(key), lower(k)), levenshtein(lower(tail(key)), lower(tail(k))));
    if (d < best_d)
    {
      best_d = d;
      best = k;
    }
  }
  // "damping" style words name the matrix sections
  if (levenshtein(lower(tail(key)), "damping") <= 2)
    return "matrices.D";
  if (levenshtein(lower(tail(key)), "stiffness") <= 2)
    return "matrices.K";
  return best_d <= std::max<std::size_t>(2, tail(key).size() / 2) ? best : std::string();
}

double parse_double(const std::string &text, const std::string &key, int line)
{
  const std::string s = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected a number, got '" + s + "'", line);
  if (!std::isfinite(v))
    throw ConfigError(key + ": value must be finite", line);
  return v;
}

int parse_int(const std::string &text, const std::string &key, int line)
{
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected an integer, got '" + s + "'", line);
  return v;
}

std::vector<double> parse_list(const std::string &text, const std::string &key, int line)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double(item, key, line));
  if (out.empty())
    throw ConfigError(key + ": empty list", line);
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string &text, const std::string &key, int line, int dim)
{
  const std::vector<double> v = parse_list(text, key, line);
  if (static_cast<int>(v.size()) != dim * dim)
    throw ConfigError(key + ": expected " + std::to_string(dim * dim) + " row-major entries for a " + std::to_string(dim) +
                          "x" + std::to_string(dim) + " matrix, got " + std::to_string(v.size()),
                      line);
  Eigen::MatrixXd M(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      M(r, c) = v[r * dim + c];
  return M;
}

Eigen::MatrixXd block_generator(int n)
{
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int s = 0; s < n; ++s)
    N.block<2, 2>(2 * s, 2 * s) = rotation_generator();
  return N;
}

std::string join(const Eigen::MatrixXd &M)
{
  std::string out;
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      out += (out.empty() ? "" : ", ") + format_number(M(r, c));
  return out;
}

bool same(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const std::optional<Axis> &a, const std::optional<Axis> &b)
{
  if (a.has_value() != b.has_value())
    return false;
  return !a || (a->param == b->param && a->min == b->min && a->max == b->max && a->count == b->count);
}

}  // namespace

const char *to_string(Command c)
{
  return command_names[static_cast<int>(c)];
}

const std::vector<std::string> &known_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k{"model.n",       "model.omegas",  "model.preset", "matrices.D",     "matrices.K",
                               "matrices.N",    "gains.delta",   "gains.kappa",  "gains.nu",       "gains.Omega",
                               "grid.x",        "grid.x_min",    "grid.x_max",   "grid.x_count",   "grid.y",
                               "grid.y_min",    "grid.y_max",    "grid.y_count", "command.name",   "output.dir",
                               "output.prefix", "floquet.steps", "fig3.deltas",  "ep.Omega_min",   "ep.Omega_max",
                               "ep.kappa_min",  "ep.kappa_max",  "ep.coarse"};
    for (const char *t : tolerance_names)
      k.push_back(std::string("tol.") + t);
    return k;
  }();
  return keys;
}

void set_tolerance(Tolerances &tol, const std::string &name, const std::string &value, int line)
{
  const std::string key = "tol." + name;
  if (name == "max_iterations")
  {
    tol.max_iterations = parse_int(value, key, line);
    if (tol.max_iterations < 1)
      throw ConfigError(key + " must be positive", line);
    return;
  }
  double *field = nullptr;
  if (name == "symmetry")
    field = &tol.symmetry;
  else if (name == "cluster")
    field = &tol.cluster;
  else if (name == "poly_residual")
    field = &tol.poly_residual;
  else if (name == "eig_residual")
    field = &tol.eig_residual;
  else if (name == "marginal")
    field = &tol.marginal;
  else if (name == "boundary")
    field = &tol.boundary;
  else if (name == "rank")
    field = &tol.rank;
  else if (name == "discriminant")
    field = &tol.discriminant;
  else if (name == "floquet_resolution")
    field = &tol.floquet_resolution;
  if (!field)
  {
    const std::string hint = suggestion(key);
    throw ConfigError("unknown tolerance '" + name + "'" + (hint.empty() ? "" : " (did you mean '" + hint + "'?)"), line);
  }
  *field = parse_double(value, key, line);
  if (!(*field > 0.0))
    throw ConfigError(key + " must be positive", line);
}

bool operator==(const RunConfig &a, const RunConfig &b)
{
  const auto gains_eq = [](const Gains &x, const Gains &y) {
    return x.delta == y.delta && x.kappa == y.kappa && x.nu == y.nu && x.Omega == y.Omega;
  };
  const auto box_eq = [](const SearchBox &x, const SearchBox &y) {
    return x.Omega_min == y.Omega_min && x.Omega_max == y.Omega_max && x.kappa_min == y.kappa_min &&
           x.kappa_max == y.kappa_max && x.coarse == y.coarse;
  };
  return a.command == b.command && a.preset == b.preset && same(a.omegas, b.omegas) && same(a.D, b.D) &&
         same(a.K, b.K) && same(a.N, b.N) && gains_eq(a.gains, b.gains) && same(a.x, b.x) && same(a.y, b.y) &&
         a.tol == b.tol && a.output_dir == b.output_dir && a.prefix == b.prefix &&
         a.floquet_steps == b.floquet_steps && a.fig3_deltas == b.fig3_deltas && box_eq(a.ep_box, b.ep_box);
}

RunConfig parse_config(const std::string &text)
{
  std::map<std::string, Entry> entries;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw))
  {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty())
      continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'section.key = value', got '" + content + "'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
    {
      const std::string hint = suggestion(key);
      throw ConfigError("unknown key '" + key + "'" + (hint.empty() ? "" : " (did you mean '" + hint + "'?)"), line);
    }
    if (entries.count(key))
      throw ConfigError("key '" + key + "' repeated (first on line " + std::to_string(entries[key].line) + ")", line);
    if (value.empty())
      throw ConfigError("key '" + key + "' has no value", line);
    entries[key] = {value, line};
  }

  const auto has = [&](const std::string &k) { return entries.count(k) > 0; };
  const auto value = [&](const std::string &k) { return entries.at(k).value; };
  const auto line_of = [&](const std::string &k) { return entries.at(k).line; };
  const auto number = [&](const std::string &k) { return parse_double(value(k), k, line_of(k)); };

  RunConfig cfg;
  if (!has("command.name"))
    throw ConfigError("missing command.name (one of spectrum, mesh, report, sweep, boundary, ep, floquet, fig1, fig2, fig3)", 0);
  {
    const std::string name = value("command.name");
    const auto it = std::find(std::begin(command_names), std::end(command_names), name);
    if (it == std::end(command_names))
      throw ConfigError("unknown command '" + name + "'", line_of("command.name"));
    cfg.command = static_cast<Command>(it - std::begin(command_names));
  }
  const bool figure = cfg.command == Command::fig1 || cfg.command == Command::fig2 || cfg.command == Command::fig3;

  if (has("model.preset"))
  {
    cfg.preset = value("model.preset");
    if (cfg.preset != "string" && cfg.preset != "fig1")
      throw ConfigError("model.preset must be 'string' or 'fig1', got '" + cfg.preset + "'", line_of("model.preset"));
  }
  else if (figure)
    cfg.preset = "fig1";

  int n = 1;
  if (has("model.n"))
  {
    n = parse_int(value("model.n"), "model.n", line_of("model.n"));
    if (n < 1)
      throw ConfigError("model.n must be >= 1", line_of("model.n"));
  }
  if (cfg.preset == "fig1")
  {
    if (n != 1)
      throw ConfigError("the fig1 preset describes a single doublet (model.n = 1)", line_of("model.n"));
    cfg.omegas = Eigen::VectorXd::Ones(1);
    cfg.K = (Eigen::MatrixXd(2, 2) << 1, 1, 1, 2).finished();
    cfg.D = (Eigen::MatrixXd(2, 2) << -1, 0, 0, 2).finished();
    cfg.N = rotation_generator();
    cfg.gains = Gains{0.3, 0.2, 0.0, 0.0};
  }
  else
  {
    cfg.omegas = Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
    cfg.D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cfg.K = cfg.D;
    cfg.N = block_generator(n);
  }
  if (has("model.omegas"))
  {
    if (cfg.preset == "string")
      throw ConfigError("model.omegas conflicts with model.preset = string", line_of("model.omegas"));
    const auto w = parse_list(value("model.omegas"), "model.omegas", line_of("model.omegas"));
    if (has("model.n") && static_cast<int>(w.size()) != n)
      throw ConfigError("model.omegas has " + std::to_string(w.size()) + " entries but model.n = " + std::to_string(n),
                        line_of("model.omegas"));
    n = static_cast<int>(w.size());
    cfg.omegas = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    if (cfg.D.rows() != 2 * n)
    {
      cfg.D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      cfg.K = cfg.D;
      cfg.N = block_generator(n);
    }
  }
  try
  {
    (void)cfg.model();
  }
  catch (const DomainError &e)
  {
    throw ConfigError(e.what(), has("model.omegas") ? line_of("model.omegas") : 0);
  }

  if (has("matrices.D"))
    cfg.D = parse_matrix(value("matrices.D"), "matrices.D", line_of("matrices.D"), 2 * n);
  if (has("matrices.K"))
    cfg.K = parse_matrix(value("matrices.K"), "matrices.K", line_of("matrices.K"), 2 * n);
  if (has("matrices.N"))
    cfg.N = parse_matrix(value("matrices.N"), "matrices.N", line_of("matrices.N"), 2 * n);

  if (has("gains.delta"))
    cfg.gains.delta = number("gains.delta");
  if (has("gains.kappa"))
    cfg.gains.kappa = number("gains.kappa");
  if (has("gains.nu"))
    cfg.gains.nu = number("gains.nu");
  if (has("gains.Omega"))
    cfg.gains.Omega = number("gains.Omega");

  for (const char *t : tolerance_names)
  {
    const std::string k = std::string("tol.") + t;
    if (has(k))
      set_tolerance(cfg.tol, t, value(k), line_of(k));
  }

  try
  {
    (void)cfg.perturbation();
  }
  catch (const Error &e)
  {
    throw ConfigError(e.what(), 0);
  }

  for (const char *axis : {"x", "y"})
  {
    const std::string base = std::string("grid.") + axis;
    const bool any = has(base) || has(base + "_min") || has(base + "_max") || has(base + "_count");
    if (!any)
      continue;
    for (const std::string suffix : {"", "_min", "_max", "_count"})
      if (!has(base + suffix))
        throw ConfigError("axis " + base + " is incomplete: missing " + base + suffix, 0);
    const auto param = param_from_string(value(base));
    if (!param)
      throw ConfigError(base + " must be one of Omega, kappa, delta, nu", line_of(base));
    Axis a{*param, number(base + "_min"), number(base + "_max"), parse_int(value(base + "_count"), base + "_count", line_of(base + "_count"))};
    if (!(a.max > a.min))
      throw ConfigError(base + "_min must be below " + base + "_max", line_of(base + "_max"));
    if (a.count < 2)
      throw ConfigError(base + "_count must be at least 2", line_of(base + "_count"));
    (axis[0] == 'x' ? cfg.x : cfg.y) = a;
  }
  if (cfg.x && cfg.y && cfg.x->param == cfg.y->param)
    throw ConfigError("grid.x and grid.y vary the same parameter", line_of("grid.y"));
  if ((cfg.command == Command::sweep || cfg.command == Command::boundary) && !(cfg.x && cfg.y))
    throw ConfigError(std::string(to_string(cfg.command)) + " needs both grid.x and grid.y axes", 0);

  if (has("output.dir"))
    cfg.output_dir = value("output.dir");
  if (has("output.prefix"))
    cfg.prefix = value("output.prefix");
  if (has("floquet.steps"))
  {
    cfg.floquet_steps = parse_int(value("floquet.steps"), "floquet.steps", line_of("floquet.steps"));
    if (cfg.floquet_steps < 256 || cfg.floquet_steps % 2)
      throw ConfigError("floquet.steps must be even and >= 256", line_of("floquet.steps"));
  }
  if (has("fig3.deltas"))
  {
    cfg.fig3_deltas = parse_list(value("fig3.deltas"), "fig3.deltas", line_of("fig3.deltas"));
    for (double d : cfg.fig3_deltas)
      if (!(d > 0.0))
        throw ConfigError("fig3.deltas must be positive", line_of("fig3.deltas"));
  }
  if (has("ep.Omega_min"))
    cfg.ep_box.Omega_min = number("ep.Omega_min");
  if (has("ep.Omega_max"))
    cfg.ep_box.Omega_max = number("ep.Omega_max");
  if (has("ep.kappa_min"))
    cfg.ep_box.kappa_min = number("ep.kappa_min");
  if (has("ep.kappa_max"))
    cfg.ep_box.kappa_max = number("ep.kappa_max");
  if (has("ep.coarse"))
    cfg.ep_box.coarse = parse_int(value("ep.coarse"), "ep.coarse", line_of("ep.coarse"));
  if (!(cfg.ep_box.Omega_max > cfg.ep_box.Omega_min) || !(cfg.ep_box.kappa_max > cfg.ep_box.kappa_min) ||
      cfg.ep_box.coarse < 3)
    throw ConfigError("ep box needs min < max on both axes and ep.coarse >= 3", 0);
  return cfg;
}

std::string emit_config(const RunConfig &c)
{
  std::ostringstream o;
  const auto num = [](double x) { return format_number(x); };
  o << "command.name = " << to_string(c.command) << "\n";
  if (!c.preset.empty())
    o << "model.preset = " << c.preset << "\n";
  o << "model.n = " << c.doublets() << "\n";
  if (c.preset != "string")
    o << "model.omegas = " << join(c.omegas.transpose()) << "\n";
  o << "matrices.D = " << join(c.D) << "\n";
  o << "matrices.K = " << join(c.K) << "\n";
  o << "matrices.N = " << join(c.N) << "\n";
  o << "gains.delta = " << num(c.gains.delta) << "\n";
  o << "gains.kappa = " << num(c.gains.kappa) << "\n";
  o << "gains.nu = " << num(c.gains.nu) << "\n";
  o << "gains.Omega = " << num(c.gains.Omega) << "\n";
  for (const auto &[name, axis] : {std::pair{"x", c.x}, std::pair{"y", c.y}})
    if (axis)
    {
      o << "grid." << name << " = " << to_string(axis->param) << "\n";
      o << "grid." << name << "_min = " << num(axis->min) << "\n";
      o << "grid." << name << "_max = " << num(axis->max) << "\n";
      o << "grid." << name << "_count = " << axis->count << "\n";
    }
  const Tolerances &t = c.tol;
  o << "tol.symmetry = " << num(t.symmetry) << "\n";
  o << "tol.cluster = " << num(t.cluster) << "\n";
  o << "tol.poly_residual = " << num(t.poly_residual) << "\n";
  o << "tol.eig_residual = " << num(t.eig_residual) << "\n";
  o << "tol.marginal = " << num(t.marginal) << "\n";
  o << "tol.boundary = " << num(t.boundary) << "\n";
  o << "tol.rank = " << num(t.rank) << "\n";
  o << "tol.discriminant = " << num(t.discriminant) << "\n";
  o << "tol.floquet_resolution = " << num(t.floquet_resolution) << "\n";
  o << "tol.max_iterations = " << t.max_iterations << "\n";
  o << "output.dir = " << c.output_dir << "\n";
  o << "output.prefix = " << c.prefix << "\n";
  o << "floquet.steps = " << c.floquet_steps << "\n";
  std::string deltas;
  for (double d : c.fig3_deltas)
    deltas += (deltas.empty() ? "" : ", ") + num(d);
  o << "fig3.deltas = " << deltas << "\n";
  o << "ep.Omega_min = " << num(c.ep_box.Omega_min) << "\n";
  o << "ep.Omega_max = " << num(c.ep_box.Omega_max) << "\n";
  o << "ep.kappa_min = " << num(c.ep_box.kappa_min) << "\n";
  o << "ep.kappa_max = " << num(c.ep_box.kappa_max) << "\n";
  o << "ep.coarse = " << c.ep_box.coarse << "\n";
  return o.str();
}

}  // namespace gyrospec::cli
