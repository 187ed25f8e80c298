#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gyrospec/cli/commands.hpp"
#include "gyrospec/cli/config.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Spectra, stability charts and Floquet multipliers of rotating gyroscopic systems"};
  std::string config_file, out_dir;
  int threads = -1;
  std::vector<std::string> overrides;
  app.add_option("config", config_file, "Configuration file (section.key = value lines)")->required();
  app.add_option("--out", out_dir, "Output directory, overrides output.dir");
  app.add_option("--threads", threads, "Worker threads for sweeps (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", overrides, "Tolerance override KEY=VAL, repeatable");
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config_file);
  if (!in)
  {
    std::cerr << "gyrospec: cannot read " << config_file << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  gyrospec::cli::RunConfig config;
  try
  {
    config = gyrospec::cli::parse_config(text.str());
    for (const auto &o : overrides)
    {
      const auto eq = o.find('=');
      if (eq == std::string::npos)
        throw gyrospec::cli::ConfigError("--tol expects KEY=VAL, got '" + o + "'", 0);
      std::string key = o.substr(0, eq);
      if (key.rfind("tol.", 0) == 0)
        key = key.substr(4);
      gyrospec::cli::set_tolerance(config.tol, key, o.substr(eq + 1));
    }
  }
  catch (const gyrospec::Error &e)
  {
    std::cerr << "gyrospec: " << config_file << ": " << e.what() << "\n";
    return 2;
  }
  if (!out_dir.empty())
    config.output_dir = out_dir;
  if (threads < 0)
  {
    threads = 0;
    if (const char *env = std::getenv("GYROSPEC_THREADS"))
    {
      try
      {
        threads = std::max(0, std::stoi(env));
      }
      catch (const std::exception &)
      {
        std::cerr << "gyrospec: ignoring GYROSPEC_THREADS=" << env << "\n";
      }
    }
  }
  return gyrospec::cli::run(config, threads, std::cout, std::cerr).exit_code;
}
