#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsz/coalescent.hpp"
#include "bsz/csv.hpp"
#include "bsz/pdmp.hpp"
#include "bsz/population.hpp"
#include "bsz/rng.hpp"
#include "bsz/stable.hpp"
#include "bsz/tree.hpp"
#include "bsz/verify.hpp"

namespace {

using namespace bsz;

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t s = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  return splitmix64(s);
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  size_t m = xs.size();
  if (m % 2 == 1) return xs[m / 2];
  return 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

nlohmann::ordered_json path_to_json(const PiecewisePath& p) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : p.samples) {
    nlohmann::ordered_json o;
    o["time"] = s.time;
    o["value"] = s.value;
    o["is_jump"] = s.is_jump;
    arr.push_back(std::move(o));
  }
  return arr;
}

nlohmann::ordered_json block_path_to_json(const BlockPath& p) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : p.events) {
    nlohmann::ordered_json o;
    o["time"] = e.time;
    o["block_count"] = e.block_count;
    if (e.merger_size)
      o["merger_size"] = *e.merger_size;
    else
      o["merger_size"] = nullptr;
    arr.push_back(std::move(o));
  }
  return arr;
}

nlohmann::ordered_json event_log_to_json(const EventLog& log) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : log.events) {
    nlohmann::ordered_json o;
    o["time"] = e.time;
    o["parent"] = e.parent;
    o["offspring_count"] = (long)e.victims.size() + 1;
    o["victims"] = e.victims;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::string path_to_csv(const PiecewisePath& p) { return p.to_csv(); }

// stable paths serialize like any piecewise path: a linear drift sample,
// then a pre/post pair per jump
PiecewisePath stable_to_piecewise(const StablePath& p) {
  PiecewisePath out;
  double sum = 0.0;
  out.add(p.t0, p.drift * p.t0 - sum);
  for (const auto& j : p.jumps) {
    out.add(j.t, p.drift * j.t - sum);
    sum += j.x;
    out.add(j.t, p.drift * j.t - sum, true);
  }
  out.add(p.t1, p.drift * p.t1 - sum);
  return out;
}

struct SimFlags {
  long n = -1;
  double horizon = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  long replicates = 1;
  uint64_t seed = 0;
  std::string out = ".";
  std::string format = "csv";
  bool stationary = false;
  std::optional<double> init;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int cmd_simulate(const std::string& kind, SimFlags f) {
  require(f.replicates >= 1, "replicates must be >= 1");
  std::filesystem::create_directories(f.out);
  auto t_start = std::chrono::steady_clock::now();
  long long events = 0;

  for (long r = 0; r < f.replicates; ++r) {
    rng g = rng::stream(f.seed, (uint64_t)r);
    std::string csv;
    nlohmann::ordered_json js;

    if (kind == "coalescent") {
      require(f.n >= 1, "coalescent needs --n >= 1");
      CoalescentOptions opt;
      if (!std::isnan(f.horizon)) opt.horizon = f.horizon;
      CoalescentRun run = simulate_coalescent(f.n, opt, g);
      events += (long long)run.path.events.size() - 1;
      if (f.format == "csv")
        csv = run.path.to_csv();
      else
        js = block_path_to_json(run.path);
    } else if (kind == "rrt") {
      require(f.n >= 3, "rrt needs --n >= 3");
      double h = std::isnan(f.horizon) ? 1.0 : f.horizon;
      require(h > 0.0, "rrt needs --horizon > 0");
      EvolvingTreeState st = init_evolving_tree(f.n, g);
      EvolveResult res = evolve_tree(st, h, g);
      events += res.cuts;
      if (f.format == "csv")
        csv = path_to_csv(res.rn_path);
      else
        js = path_to_json(res.rn_path);
    } else if (kind == "population") {
      require(f.n >= 2, "population needs --n >= 2");
      double h = std::isnan(f.horizon) ? 1.0 : f.horizon;
      require(h > 0.0, "population needs --horizon > 0");
      EventLog log = simulate_population(f.n, 0.0, h, g);
      events += (long long)log.events.size();
      if (f.format == "csv")
        csv = log.to_csv();
      else
        js = event_log_to_json(log);
    } else if (kind == "R" || kind == "A") {
      double h = std::isnan(f.horizon) ? 1.0 : f.horizon;
      require(h > 0.0, "--horizon must be > 0");
      std::optional<double> init = f.stationary ? std::nullopt : f.init;
      PiecewisePath p = kind == "R" ? simulate_r(0.0, h, init, g)
                                    : simulate_a(0.0, h, init, g);
      events += (long long)p.jump_times().size();
      if (f.format == "csv")
        csv = path_to_csv(p);
      else
        js = path_to_json(p);
    } else if (kind == "stable") {
      double h = std::isnan(f.horizon) ? 1.0 : f.horizon;
      double eps = std::isnan(f.eps) ? 1e-6 : f.eps;
      require(h > 0.0, "--horizon must be > 0");
      require(eps > 0.0, "--eps must be > 0");
      StablePath p = simulate_stable(eps, h, g);
      events += (long long)p.jumps.size();
      PiecewisePath pw = stable_to_piecewise(p);
      if (f.format == "csv")
        csv = path_to_csv(pw);
      else
        js = path_to_json(pw);
    } else if (kind == "limit-length") {
      double h = std::isnan(f.horizon) ? 1.0 : f.horizon;
      double eps = std::isnan(f.eps) ? 1e-2 : f.eps;
      require(h > 0.0, "--horizon must be > 0");
      require(eps > 0.0, "--eps must be > 0");
      const double tail = 40.0;
      StablePath p = simulate_stable_window(eps, -h - 0.1, tail + 0.1, g);
      events += (long long)p.jumps.size();
      PiecewisePath pw;
      const int cells = 512;
      for (int k = 0; k <= cells; ++k) {
        double s = h * double(k) / double(cells);
        pw.add(s, limit_length(p, s, tail));
      }
      if (f.format == "csv")
        csv = path_to_csv(pw);
      else
        js = path_to_json(pw);
    } else {
      require(false, "unknown simulate kind: " + kind);
    }

    std::string ext = f.format == "csv" ? ".csv" : ".json";
    std::string path = f.out + "/" + kind + "_" + fmt_int(r) + ext;
    write_file(path, f.format == "csv" ? csv : js.dump(2) + "\n");
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_start)
                    .count();
  std::printf("%s: replicates=%ld events=%lld wall=%.3fs dir=%s\n", kind.c_str(),
              f.replicates, events, wall, f.out.c_str());
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& config_path,
               uint64_t seed, const std::string& out, const std::string& format) {
  VerifyConfig cfg;
  try {
    if (!config_path.empty())
      cfg = VerifyConfig::from_json_file(config_path,
                                         suite == "fast" ? "fast" : "acceptance");
    else
      cfg = suite == "fast" ? VerifyConfig::fast() : VerifyConfig::acceptance();
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  std::vector<std::string> names;
  if (suite == "all" || suite == "fast") {
    names = suite_names();
  } else {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
      std::fprintf(stderr, "unknown test name: %s\nknown tests:\n", suite.c_str());
      for (const auto& n : known) std::fprintf(stderr, "  %s\n", n.c_str());
      return 2;
    }
    names.push_back(suite);
  }

  auto t_start = std::chrono::steady_clock::now();
  std::vector<TestReport> reports = run_suite(names, cfg, seed);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_start)
                    .count();

  long passed = 0;
  for (const auto& r : reports) {
    std::printf("%-26s %s  statistic=%.6g threshold=%g replicates=%ld\n",
                r.name.c_str(), r.pass ? "pass" : "FAIL", r.statistic, r.threshold,
                r.replicates);
    passed += r.pass ? 1 : 0;
  }
  std::printf("%ld/%zu passed, wall=%.3fs\n", passed, reports.size(), wall);

  std::filesystem::create_directories(out);
  write_file(out + "/verify_report.json", reports_to_json(reports));
  if (format == "csv") write_file(out + "/verify_report.csv", reports_to_csv(reports));
  return passed == (long)reports.size() ? 0 : 1;
}

int cmd_coupling(std::vector<long> grid, long replicates, uint64_t seed,
                 double horizon, const std::string& out) {
  require(!grid.empty(), "coupling needs a non-empty --n-grid");
  require(std::is_sorted(grid.begin(), grid.end()), "--n-grid must be nondecreasing");
  require(replicates >= 1, "replicates must be >= 1");
  std::filesystem::create_directories(out);

  auto t_start = std::chrono::steady_clock::now();
  std::string med_csv = "n,median_sup,replicates,structure_ok\n";
  std::vector<double> medians;
  for (size_t i = 0; i < grid.size(); ++i) {
    long n = grid[i];
    double tn = horizon > 0.0 ? horizon : 2.0 * std::log(std::log(double(n)));
    std::vector<double> sups((size_t)replicates);
    bool structure = true;
    for (long r = 0; r < replicates; ++r) {
      rng g = rng::stream(mix(seed, i), (uint64_t)r);
      CouplingResult cr = run_coupling_experiment(n, tn, g);
      sups[(size_t)r] = cr.sup_distance;
      structure = structure && cr.structure_ok;
      if (r == 0) {
        write_file(out + "/coupling_x_" + fmt_int(n) + ".csv", cr.x_path.to_csv());
        write_file(out + "/coupling_y_" + fmt_int(n) + ".csv", cr.y_path.to_csv());
      }
    }
    double med = median_of(sups);
    medians.push_back(med);
    med_csv += fmt_int(n);
    med_csv += ',';
    med_csv += fmt_double(med);
    med_csv += ',';
    med_csv += fmt_int(replicates);
    med_csv += ',';
    med_csv += structure ? '1' : '0';
    med_csv += '\n';
    std::printf("n=%ld median_sup=%.6g replicates=%ld structure=%s\n", n, med,
                replicates, structure ? "ok" : "BROKEN");
  }
  write_file(out + "/coupling_medians.csv", med_csv);

  for (size_t i = 1; i < medians.size(); ++i)
    if (medians[i] > medians[i - 1])
      std::fprintf(stderr,
                   "warning: median sup distance increased from n=%ld to n=%ld "
                   "(%.6g -> %.6g)\n",
                   grid[i - 1], grid[i], medians[i - 1], medians[i]);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_start)
                    .count();
  std::printf("coupling: grid=%zu replicates=%ld wall=%.3fs dir=%s\n", grid.size(),
              replicates, wall, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for an evolving coalescent"};
  app.require_subcommand(1);

  SimFlags f;
  double init_value = std::numeric_limits<double>::quiet_NaN();
  std::string kind;
  auto* sim = app.add_subcommand("simulate", "run one simulator and write paths");
  sim->add_option("kind", kind, "coalescent|rrt|population|R|A|stable|limit-length")
      ->required()
      ->check(CLI::IsMember({"coalescent", "rrt", "population", "R", "A", "stable",
                             "limit-length"}));
  sim->add_option("--n", f.n, "sample or population size");
  sim->add_option("--horizon", f.horizon, "time window length");
  sim->add_option("--eps", f.eps, "small-jump truncation level");
  sim->add_option("--replicates", f.replicates, "independent runs, numbered files");
  sim->add_option("--seed", f.seed, "master seed");
  sim->add_option("--out", f.out, "output directory")->envname("BSZSIM_OUT");
  sim->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* stat_flag =
      sim->add_flag("--stationary", f.stationary, "stationary start (R and A)");
  sim->add_option("--init", init_value, "fixed start level (R and A)")
      ->excludes(stat_flag);

  std::string suite = "all";
  std::string config_path;
  uint64_t vseed = 0;
  std::string vout = ".";
  std::string vformat = "json";
  auto* ver = app.add_subcommand("verify", "run the verification suite");
  ver->add_option("--suite", suite, "all, fast, or one test name");
  ver->add_option("--config", config_path, "JSON file with suite profiles");
  ver->add_option("--seed", vseed, "master seed");
  ver->add_option("--out", vout, "output directory")->envname("BSZSIM_OUT");
  ver->add_option("--format", vformat, "json or csv (json report always written)")
      ->check(CLI::IsMember({"csv", "json"}));

  std::vector<long> grid;
  long creps = 1;
  uint64_t cseed = 0;
  double chorizon = -1.0;
  std::string cout_dir = ".";
  auto* cpl = app.add_subcommand("coupling", "shared-field coupling experiment");
  cpl->add_option("--n-grid", grid, "population sizes, nondecreasing")
      ->delimiter(',');
  cpl->add_option("--replicates", creps, "replicates per grid point");
  cpl->add_option("--seed", cseed, "master seed");
  cpl->add_option("--horizon", chorizon,
                  "window length; <= 0 picks 2 log log n per point");
  cpl->add_option("--out", cout_dir, "output directory")->envname("BSZSIM_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      if (!std::isnan(init_value)) f.init = init_value;
      return cmd_simulate(kind, std::move(f));
    }
    if (ver->parsed()) return cmd_verify(suite, config_path, vseed, vout, vformat);
    if (cpl->parsed())
      return cmd_coupling(std::move(grid), creps, cseed, chorizon, cout_dir);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulation error: %s\n", e.what());
    return 3;
  }
  return 2;
}
