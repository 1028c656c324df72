#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smalldig/fnv.hpp"
#include "smalldig/smalldig.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Kind { kValue, kFlag, kNegFlag };

struct Param {
  const char* flags; // CLI11 option names
  const char* key;   // parameter key
  Kind kind = Kind::kValue;
  const char* help = "";
};

struct Sub {
  const char* name;
  const char* help;
  const char* positional; // key bound to the first positional argument, or nullptr
  std::vector<Param> params;
  bool threaded = false;
};

const std::vector<Sub>& subcommands()
{
  static const std::vector<Sub> subs{
      {"digits", "expand n in several bases and count large digits", "n",
       {{"--bases", "bases", Kind::kValue, "base specs g[:p/q], comma separated"},
        {"--lo", "lo", Kind::kValue, "digit window lower end"},
        {"--hi", "hi", Kind::kValue, "digit window upper end"}}},
      {"kummer", "p-adic valuations of binom(2n, n) and the n1*n2 split", "n",
       {{"--primes", "primes", Kind::kValue, "primes, comma separated"}}},
      {"egrs", "two-base greedy repair from g1^N", nullptr,
       {{"--spec1", "spec1"}, {"--spec2", "spec2"}, {"-N,--start", "N", Kind::kValue, "start exponent"},
        {"--budget", "budget", Kind::kValue, "node budget"},
        {"--policy", "policy", Kind::kValue, "smallest-first | largest-first"}}},
      {"blocks", "top-down block construction", nullptr,
       {{"--specs", "specs"}, {"--ell", "ell"}, {"--h", "h"}, {"-H,--shift-cap", "H"}, {"--c-pad", "C_pad"},
        {"-N,--top", "N"}},
       true},
      {"spectrum", "large spectrum of a small-digit family", nullptr,
       {{"-g,--base", "g"}, {"-t,--alphabet", "t"}, {"-R,--length", "R"}, {"-K", "K"}, {"--eta", "eta"},
        {"-M", "M"}, {"--delta", "delta"}, {"--budget", "budget"}},
       true},
      {"bump", "Fourier-side properties of the bump function", nullptr,
       {{"--delta", "delta"}, {"-J", "J"}, {"--tail-cap", "tail_cap"}}},
      {"equidist", "fractional exponents, bad-n census, discrepancy", nullptr,
       {{"--task", "task", Kind::kValue, "census | discrepancy | norm | separation"},
        {"--bases", "bases"}, {"--ell", "ell"}, {"--h", "h"}, {"--zetas", "zetas"},
        {"--allow-dependent", "allow_dependent", Kind::kFlag}, {"--epsilon", "epsilon"}, {"-N,--count", "N"},
        {"--grid", "grid"}, {"--eps-grid", "eps_grid"}, {"-n", "n"}, {"--xs", "xs"}, {"--cs", "cs"},
        {"--points", "points"}, {"--budget", "budget"}},
       true},
      {"lattice", "small integer combinations of reciprocal logarithms", nullptr,
       {{"--bases", "bases"}, {"--ell", "ell"}, {"--h", "h"}, {"-M", "M"}, {"--Ms", "Ms"},
        {"--allow-dependent", "allow_dependent", Kind::kFlag}, {"--budget", "budget"}}},
      {"conditions", "evaluate threshold conditions on bases", nullptr,
       {{"--condition", "condition", Kind::kValue, "conjecture | theorem | prop | two-base"},
        {"--specs", "specs"}, {"--threshold", "threshold", Kind::kFlag, "equal-base threshold search"},
        {"-r", "r"}, {"--kappa", "kappa"}}},
      {"search", "integers with small digits in every base", nullptr,
       {{"--specs", "specs"}, {"--limit", "limit"}, {"--driver", "driver"},
        {"--no-zero", "include_zero", Kind::kNegFlag, "do not count 0"}, {"--budget", "budget"},
        {"--checkpoint", "checkpoint"}, {"--resume", "resume", Kind::kFlag},
        {"--checkpoint-every", "checkpoint_every"}, {"--stop-after", "stop_after"},
        {"--density", "density", Kind::kValue, "N values for a density fit"}},
       true},
      {"census", "n <= limit with binom(2n, n) coprime to given primes", nullptr,
       {{"--limit", "limit"}, {"--primes", "primes"}, {"--no-cross-check", "cross_check", Kind::kNegFlag},
        {"--budget", "budget"}}},
  };
  return subs;
}

bool write_file(const fs::path& p, const std::string& text)
{
  std::ofstream f(p, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"smalldig: integers with small digits in several bases"};
  app.set_help_flag("--help", "print help");
  app.set_version_flag("--version", std::string(sd_version()));
  app.require_subcommand(1);

  std::string out_dir = "out";
  bool dry_run = false;
  unsigned threads = 0;
  std::string params_file;
  bool quiet = false;
  app.add_option("--out", out_dir, "output root")->capture_default_str();
  app.add_flag("--dry-run", dry_run, "validate and print the manifest only");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--params", params_file, "JSON file with base parameters (flags override)");
  app.add_flag("-q,--quiet", quiet, "no summary on stdout");

  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const auto& s : subcommands()) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->set_help_flag("--help", "print help");
    if (s.positional)
      sub->add_option(s.positional, values[std::string(s.name) + "." + s.positional], s.positional);
    for (const auto& p : s.params) {
      const std::string id = std::string(s.name) + "." + p.key;
      if (p.kind == Kind::kValue)
        sub->add_option(p.flags, values[id], p.help);
      else
        sub->add_flag(p.flags, flags[id], p.help);
    }
    registered.emplace_back(sub, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const Sub* sub = nullptr;
  CLI::App* sapp = nullptr;
  for (auto& [a, s] : registered)
    if (a->parsed()) {
      sub = s;
      sapp = a;
    }

  json params = json::object();
  if (!params_file.empty()) {
    std::ifstream f(params_file);
    if (!f) {
      std::cerr << "error: cannot read " << params_file << "\n";
      return 2;
    }
    try {
      params = json::parse(f);
    } catch (const json::exception& e) {
      std::cerr << "error: " << params_file << ": " << e.what() << "\n";
      return 2;
    }
  }
  const std::string prefix = std::string(sub->name) + ".";
  if (sub->positional && sapp->count(sub->positional))
    params[sub->positional] = values[prefix + sub->positional];
  for (const auto& p : sub->params) {
    const std::string id = prefix + p.key;
    const std::string first = std::string(p.flags).substr(0, std::string(p.flags).find(','));
    if (sapp->count(first) == 0)
      continue;
    if (p.kind == Kind::kValue)
      params[p.key] = values[id];
    else
      params[p.key] = p.kind == Kind::kFlag;
  }
  if (sub->threaded && threads > 0)
    params["threads"] = threads;

  char* norm = nullptr;
  sd_status st = sd_validate(sub->name, params.dump().c_str(), &norm);
  if (st != SD_OK) {
    std::cerr << "error: " << sd_last_error() << "\n";
    return static_cast<int>(st);
  }
  json manifest{{"subcommand", sub->name}, {"params", json::parse(norm)}, {"tool_version", sd_version()}};
  sd_string_free(norm);
  const std::string hash = smalldig::fnv1a_hex(manifest.dump());

  if (dry_run) {
    std::cout << manifest.dump(2) << "\n";
    return 0;
  }

  const auto t0 = std::chrono::steady_clock::now();
  sd_result* res = nullptr;
  st = sd_run(sub->name, params.dump().c_str(), &res);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!res) {
    std::cerr << "error: " << sd_last_error() << "\n";
    return static_cast<int>(st);
  }

  const fs::path dir = fs::path(out_dir) / sub->name / hash;
  std::error_code ec;
  fs::create_directories(dir, ec);
  manifest["wall_time_seconds"] = wall;
  manifest["status"] = sd_status_name(st);
  const bool ok = !ec && write_file(dir / "manifest.json", manifest.dump(2) + "\n") &&
                  write_file(dir / "result.json", std::string(sd_result_json(res)) + "\n") &&
                  write_file(dir / "result.csv", sd_result_csv(res));
  if (!quiet)
    std::cout << sd_result_summary(res);
  sd_result_free(res);
  if (!ok) {
    std::cerr << "error: cannot write to " << dir.string() << "\n";
    return 1;
  }
  std::cerr << "wrote " << dir.string() << "\n";
  if (st != SD_OK)
    std::cerr << "status: " << sd_status_name(st) << "\n";
  return static_cast<int>(st);
}
