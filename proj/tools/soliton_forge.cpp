// soliton-forge: build exact multi-soliton bound states of the coupled cubic
// Schrodinger system and verify their invariants from the command line.
//
// Exit codes: 0 all good, 1 a verification check failed, 2 bad configuration,
// 3 numeric failure.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "soliton/classify.hpp"
#include "soliton/errors.hpp"
#include "soliton/hirota.hpp"
#include "soliton/invariants.hpp"
#include "soliton/linearize.hpp"
#include "soliton/numeric.hpp"

using json = nlohmann::ordered_json;
using namespace soliton;

namespace {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

struct RunConfig {
  std::vector<double> mu;
  std::vector<double> a;
  std::optional<double> half_width;
  std::optional<int> grid_points;
  double tol = 1e-8;
  std::uint64_t seed = 0x5011704f04c3dULL;
  std::optional<double> q;
  std::optional<double> p;
  int n_points = 101;
};

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  require_keys(j, {"mu", "a", "grid", "tol", "seed", "q", "p", "n_points"}, "config");
  RunConfig cfg;
  if (!j.contains("mu")) throw ConfigError("config needs the key 'mu'");
  cfg.mu = j.at("mu").get<std::vector<double>>();
  if (j.contains("a")) cfg.a = j.at("a").get<std::vector<double>>();
  if (j.contains("grid")) {
    require_keys(j.at("grid"), {"half_width", "points"}, "config.grid");
    if (j.at("grid").contains("half_width"))
      cfg.half_width = j.at("grid").at("half_width").get<double>();
    if (j.at("grid").contains("points")) cfg.grid_points = j.at("grid").at("points").get<int>();
  }
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("q")) cfg.q = j.at("q").get<double>();
  if (j.contains("p")) cfg.p = j.at("p").get<double>();
  if (j.contains("n_points")) cfg.n_points = j.at("n_points").get<int>();
  return cfg;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_points;
  std::optional<double> half_width;
  std::optional<double> tol;
  bool json_only = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool need_config = true) {
  auto* opt = cmd->add_option("--config", fl.config_path, "JSON run configuration");
  if (need_config) opt->required();
  cmd->add_option("--out", fl.out_dir, "output directory");
  cmd->add_option("--seed", fl.seed, "seed for randomized suites");
  cmd->add_option("--grid-points", fl.grid_points, "override grid point count (odd)");
  cmd->add_option("--half-width", fl.half_width, "override grid half width");
  cmd->add_option("--tol", fl.tol, "override base tolerance");
  cmd->add_flag("--json", fl.json_only, "machine output only");
}

RunConfig merged_config(const CommonFlags& fl) {
  RunConfig cfg = load_config(fl.config_path);
  if (fl.seed) cfg.seed = *fl.seed;
  if (fl.grid_points) cfg.grid_points = *fl.grid_points;
  if (fl.half_width) cfg.half_width = *fl.half_width;
  if (fl.tol) cfg.tol = *fl.tol;
  return cfg;
}

Spectrum make_spectrum(const RunConfig& cfg) {
  try {
    return Spectrum(cfg.mu);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SolutionRep make_solution(const RunConfig& cfg) {
  Spectrum sp = make_spectrum(cfg);
  if (cfg.a.size() != cfg.mu.size())
    throw ConfigError("'a' must have the same length as 'mu'");
  return build_solution(sp, SolitonParams{cfg.a});
}

GridSpec make_grid(const RunConfig& cfg, const Spectrum& sp) {
  GridSpec g = GridSpec::for_spectrum(sp);
  if (cfg.half_width) g = GridSpec(*cfg.half_width, g.n_points);
  if (cfg.grid_points) g = GridSpec(g.half_width, *cfg.grid_points);
  return g;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SOLITON_FORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min(n, 16u));
}

// deterministic result order regardless of scheduling
void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- checks

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

json to_json(const CheckRecord& c) {
  return json{{"name", c.name},
              {"value", c.value},
              {"expected", c.expected},
              {"tolerance", c.tolerance},
              {"pass", c.pass}};
}

CheckRecord make_check(std::string name, double value, double expected, double tol) {
  CheckRecord c;
  c.name = std::move(name);
  c.value = value;
  c.expected = expected;
  c.tolerance = tol;
  c.pass = std::abs(value - expected) <= tol;
  return c;
}

std::vector<CheckRecord> verify_solution(const SolutionRep& rep, const GridSpec& grid,
                                         double tol) {
  std::vector<CheckRecord> out;
  const Spectrum& sp = rep.spectrum();
  const int n = rep.size();
  const double mu_scale = 1.0 - sp.mu(0);

  out.push_back(make_check("residual_sup", residual_sup(rep, grid), 0.0, tol * mu_scale));

  for (int k = 1; k <= n; ++k) {
    MotionReport mr = motion_report(rep, k, grid);
    out.push_back(make_check("motion_constant_" + std::to_string(k), mr.sup_abs, 0.0,
                             tol * std::max(mr.sup_scale, 1e-30)));
  }

  std::vector<double> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    m[static_cast<std::size_t>(i)] = mass(rep, i, MassMethod::analytic);
    const double quad = mass(rep, i, MassMethod::quadrature);
    out.push_back(make_check("mass_quadrature_vs_analytic_" + std::to_string(i + 1), quad,
                             m[static_cast<std::size_t>(i)], 1e-6));
    out.push_back(make_check("antiderivative_defect_" + std::to_string(i + 1),
                             antiderivative_defect(rep, i, grid), 0.0, 1e-10));
  }
  // grouped mass law: each distinct-mu group with an active component carries
  // total mass 2 eta_group
  for (int i = 0; i < n;) {
    int j = i;
    double total = 0.0;
    bool active = false;
    while (j < n && sp.mu(j) == sp.mu(i)) {
      total += m[static_cast<std::size_t>(j)];
      active = active || rep.params().a[static_cast<std::size_t>(j)] != 0.0;
      ++j;
    }
    std::string label = "mass_group_mu=" + fmt17(sp.mu(i));
    out.push_back(make_check(label, total, active ? 2.0 * sp.eta(i) : 0.0, tol));
    i = j;
  }

  // the operator -d^2/dx^2 - V has one simple eigenvalue per distinct active
  // mu value, so the saturation gap equals the sum of the eta's the config
  // lists beyond those
  double expected_gap = 0.0;
  for (double eta : sp.etas()) expected_gap += eta;
  for (int i = 0; i < n;) {
    int j = i;
    bool active = false;
    while (j < n && sp.mu(j) == sp.mu(i)) {
      active = active || rep.params().a[static_cast<std::size_t>(j)] != 0.0;
      ++j;
    }
    if (active) expected_gap -= sp.eta(i);
    i = j;
  }
  out.push_back(make_check("lieb_thirring_gap", lieb_thirring_gap(rep), expected_gap, 1e-6));

  Energy e = energy(rep);
  double weighted = 0.0;
  for (int i = 0; i < n; ++i) weighted += sp.mu(i) * m[static_cast<std::size_t>(i)];
  const double etol = 1e-6 * (1.0 + std::abs(weighted));
  out.push_back(make_check("energy_kinetic", e.kinetic, -weighted / 3.0, etol));
  out.push_back(make_check("energy_quartic", e.quartic, -2.0 * weighted / 3.0, etol));
  out.push_back(make_check("energy_total", e.value(), weighted / 3.0, etol));

  // translation covariance spot check
  {
    const double c = 0.37;
    SolutionRep shifted = build_solution(sp, translate_params(sp, rep.params(), c));
    double sup = 0.0, scale = 1.0;
    for (int g = 0; g < 201; ++g) {
      const double x = -10.0 / sp.eta_min() + 20.0 / sp.eta_min() * g / 200.0;
      for (int i = 0; i < n; ++i) {
        sup = std::max(sup, std::abs(shifted.eval_component(i, x) -
                                     rep.eval_component(i, x + c)));
        scale = std::max(scale, std::abs(rep.eval_component(i, x + c)));
      }
    }
    out.push_back(make_check("translation_covariance", sup / scale, 0.0, 1e-10));
  }
  return out;
}

void print_check_table(const std::vector<CheckRecord>& checks) {
  std::printf("%-36s %23s %23s %12s %s\n", "check", "value", "expected", "tolerance", "status");
  for (const CheckRecord& c : checks)
    std::printf("%-36s %23.15e %23.15e %12.3e %s\n", c.name.c_str(), c.value, c.expected,
                c.tolerance, c.pass ? "pass" : "FAIL");
}

// ---------------------------------------------------------------- commands

int cmd_build(const CommonFlags& fl) {
  RunConfig cfg = merged_config(fl);
  SolutionRep rep = make_solution(cfg);
  const Spectrum& sp = rep.spectrum();
  GridSpec grid = make_grid(cfg, sp);
  const int n = rep.size();

  std::string csv = "x";
  for (int i = 1; i <= n; ++i) csv += ",u" + std::to_string(i);
  for (int i = 1; i <= n; ++i) csv += ",du" + std::to_string(i);
  csv += ",V\n";
  for (int g = 0; g < grid.n_points; ++g) {
    const double x = grid.point(g);
    csv += fmt17(x);
    double v = 0.0;
    std::vector<double> us, dus;
    for (int i = 0; i < n; ++i) {
      const ExpRatio::Jet j = rep.component_jet(i, x);
      us.push_back(j.v);
      dus.push_back(j.d1);
      v += j.v * j.v;
    }
    for (double u : us) csv += "," + fmt17(u);
    for (double du : dus) csv += "," + fmt17(du);
    csv += "," + fmt17(2.0 * v) + "\n";
  }

  json header;
  header["mu"] = cfg.mu;
  header["a"] = cfg.a;
  header["grid"] = {{"half_width", grid.half_width}, {"points", grid.n_points}};
  json masses = json::array();
  for (int i = 0; i < n; ++i) masses.push_back(mass(rep, i, MassMethod::analytic));
  header["masses"] = masses;
  Energy e = energy(rep);
  header["energy"] = {{"kinetic", e.kinetic}, {"quartic", e.quartic}, {"value", e.value()}};
  header["residual_sup"] = residual_sup(rep, grid);

  std::filesystem::create_directories(fl.out_dir);
  write_file(std::filesystem::path(fl.out_dir) / "profile.csv", csv);
  write_file(std::filesystem::path(fl.out_dir) / "profile.json", header.dump(2) + "\n");
  if (fl.json_only)
    std::printf("%s\n", header.dump().c_str());
  else
    std::printf("profile written: %d points, residual sup %.3e\n", grid.n_points,
                header["residual_sup"].get<double>());
  return 0;
}

int cmd_verify(const CommonFlags& fl) {
  RunConfig cfg = merged_config(fl);
  SolutionRep rep = make_solution(cfg);
  GridSpec grid = make_grid(cfg, rep.spectrum());
  std::vector<CheckRecord> checks = verify_solution(rep, grid, cfg.tol);

  json doc;
  doc["mu"] = cfg.mu;
  doc["a"] = cfg.a;
  json arr = json::array();
  bool all_pass = true;
  for (const CheckRecord& c : checks) {
    arr.push_back(to_json(c));
    all_pass = all_pass && c.pass;
  }
  doc["checks"] = arr;
  doc["pass"] = all_pass;

  std::filesystem::create_directories(fl.out_dir);
  write_file(std::filesystem::path(fl.out_dir) / "verify.json", doc.dump(2) + "\n");
  if (fl.json_only)
    std::printf("%s\n", doc.dump().c_str());
  else
    print_check_table(checks);
  return all_pass ? 0 : kExitCheckFailed;
}

int cmd_kernel(const CommonFlags& fl) {
  RunConfig cfg = merged_config(fl);
  SolutionRep rep = make_solution(cfg);
  GridSpec grid = make_grid(cfg, rep.spectrum());
  KernelReport kr = kernel_dimension(rep, grid);

  json doc;
  doc["mu"] = cfg.mu;
  doc["a"] = cfg.a;
  doc["grid"] = {{"half_width", grid.half_width}, {"points", grid.n_points}};
  doc["discrete_kernel_dim"] = kr.discrete_kernel_dim;
  doc["threshold"] = kr.threshold;
  doc["eigenvalues_near_zero"] = kr.eigenvalues_near_zero;
  doc["subspace_angle"] = kr.subspace_angle;
  doc["rayleigh_bound"] = kr.rayleigh_bound;
  doc["analytic_residual_sup"] = kr.analytic_residual_sup;

  std::string csv = "index,eigenvalue\n";
  for (std::size_t i = 0; i < kr.eigenvalues_near_zero.size(); ++i)
    csv += std::to_string(i) + "," + fmt17(kr.eigenvalues_near_zero[i]) + "\n";

  std::filesystem::create_directories(fl.out_dir);
  write_file(std::filesystem::path(fl.out_dir) / "kernel.json", doc.dump(2) + "\n");
  write_file(std::filesystem::path(fl.out_dir) / "kernel_eigs.csv", csv);
  if (fl.json_only)
    std::printf("%s\n", doc.dump().c_str());
  else
    std::printf("kernel dimension %d (threshold %.3e, subspace angle %.3e)\n",
                kr.discrete_kernel_dim, kr.threshold, kr.subspace_angle);
  return 0;
}

int cmd_branches(const CommonFlags& fl, std::optional<double> q_flag,
                 std::optional<double> p_flag) {
  RunConfig cfg = merged_config(fl);
  if (q_flag) cfg.q = *q_flag;
  if (p_flag) cfg.p = *p_flag;
  Spectrum sp = make_spectrum(cfg);
  if (sp.size() != 3 || !(sp.mu(0) < sp.mu(1) && sp.mu(1) < sp.mu(2)))
    throw ConfigError("branches needs N = 3 with strictly ordered mu");
  if (!cfg.q) throw ConfigError("branches needs 'q' (initial ratio u2(0)/u1(0))");
  if (*cfg.q == 0.0) throw ConfigError("branches needs q != 0");

  PBounds pb = p_bounds(sp, *cfg.q);
  BranchSet bs = trace_branch(sp, *cfg.q, cfg.n_points);

  std::filesystem::create_directories(fl.out_dir);
  for (int b = 0; b < 4; ++b) {
    std::string csv = "X,Y,Z,p\n";
    for (const BranchPoint& pt : bs.branch[static_cast<std::size_t>(b)])
      csv += fmt17(pt.X) + "," + fmt17(pt.Y) + "," + fmt17(pt.Z) + "," + fmt17(pt.p) + "\n";
    write_file(std::filesystem::path(fl.out_dir) / ("branch_" + std::to_string(b + 1) + ".csv"),
               csv);
  }

  json doc;
  doc["mu"] = cfg.mu;
  doc["q"] = *cfg.q;
  doc["p_low"] = pb.p_low;
  doc["p_high"] = pb.p_high;
  doc["p_max_arg"] = pb.p_max_arg;
  doc["f_max"] = pb.f_max;
  doc["positive_inside"] = pb.positive_inside;
  doc["base_points_found"] = bs.base_points_found;

  if (cfg.p) {
    auto pre = count_preimages(sp, *cfg.q, *cfg.p, cfg.tol);
    json arr = json::array();
    for (const auto& a : pre) arr.push_back({a[0], a[1], a[2]});
    doc["p"] = *cfg.p;
    doc["preimages"] = arr;
    doc["preimage_count"] = pre.size();
  }
  write_file(std::filesystem::path(fl.out_dir) / "pbounds.json", doc.dump(2) + "\n");
  if (fl.json_only)
    std::printf("%s\n", doc.dump().c_str());
  else {
    std::printf("p bounds (%.12g, %.12g), f max %.12g at %.12g; four branches traced\n",
                pb.p_low, pb.p_high, pb.f_max, pb.p_max_arg);
    if (cfg.p)
      std::printf("preimages of p = %.12g: %d\n", *cfg.p,
                  doc["preimage_count"].get<int>());
  }
  return 0;
}

int cmd_normalized(const CommonFlags& fl) {
  RunConfig cfg = merged_config(fl);
  Spectrum sp = make_spectrum(cfg);
  if (sp.size() != 3) throw ConfigError("normalized classification needs N = 3");
  NormalizedOutcome out = normalized_solutions(sp);

  json doc;
  doc["mu"] = cfg.mu;
  if (auto* uq = std::get_if<NormalizedUnique>(&out)) {
    doc["outcome"] = "unique";
    doc["a"] = uq->params.a;
    SolutionRep rep = build_solution(sp, uq->params);
    doc["u_at_0"] = rep.eval_component(0, 0.0);
    json masses = json::array();
    for (int i = 0; i < 3; ++i) masses.push_back(mass(rep, i));
    doc["masses"] = masses;
  } else if (auto* fam = std::get_if<NormalizedFamily>(&out)) {
    doc["outcome"] = "family";
    std::mt19937_64 rng(cfg.seed);
    json spots = json::array();
    for (int t = 0; t < 3; ++t) {
      const double A = 0.3 + 2.4 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
      const double B = 0.3 + 2.4 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
      SolutionRep rep = build_solution(sp, fam->generate(A, B));
      json masses = json::array();
      for (int i = 0; i < 3; ++i) masses.push_back(mass(rep, i));
      spots.push_back({{"A", A}, {"B", B}, {"masses", masses}});
    }
    doc["spots"] = spots;
  } else {
    doc["outcome"] = "none";
  }

  std::filesystem::create_directories(fl.out_dir);
  write_file(std::filesystem::path(fl.out_dir) / "normalized.json", doc.dump(2) + "\n");
  if (fl.json_only)
    std::printf("%s\n", doc.dump().c_str());
  else
    std::printf("normalized solutions: %s\n", doc["outcome"].get<std::string>().c_str());
  return 0;
}

struct SweepOptions {
  std::vector<int> n_values{3, 4, 5};
  int instances = 5;
  bool with_kernel = false;
};

int cmd_sweep(const CommonFlags& fl, const SweepOptions& opts) {
  RunConfig cfg;
  cfg.seed = 0x5011704f04c3dULL;
  if (!fl.config_path.empty()) cfg = merged_config(fl);
  if (fl.seed) cfg.seed = *fl.seed;
  if (fl.tol) cfg.tol = *fl.tol;

  struct Item {
    int n;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  {
    std::mt19937_64 rng(cfg.seed);
    for (int n : opts.n_values)
      for (int t = 0; t < opts.instances; ++t) items.push_back({n, rng()});
  }

  std::vector<json> results(items.size());
  std::atomic<bool> all_pass{true};
  parallel_for(static_cast<int>(items.size()), [&](int idx) {
    const Item& it = items[static_cast<std::size_t>(idx)];
    std::mt19937_64 rng(it.seed);
    auto uni = [&rng](double lo, double hi) {
      return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    // strictly separated decay rates keep the tau coefficients conditioned
    std::vector<double> eta;
    bool ok = false;
    while (!ok) {
      eta.clear();
      for (int i = 0; i < it.n; ++i) eta.push_back(uni(0.5, 2.2));
      std::sort(eta.begin(), eta.end(), std::greater<>());
      ok = true;
      for (int i = 0; i + 1 < it.n; ++i)
        ok = ok && eta[static_cast<std::size_t>(i)] - eta[static_cast<std::size_t>(i + 1)] > 0.08;
    }
    std::vector<double> mu;
    for (double e : eta) mu.push_back(-e * e);
    std::vector<double> a;
    for (int i = 0; i < it.n; ++i) {
      double v = 0.0;
      while (std::abs(v) < 0.05) v = uni(-5.0, 5.0);
      a.push_back(v);
    }
    Spectrum sp(mu);
    SolutionRep rep = build_solution(sp, SolitonParams{a});
    GridSpec grid = GridSpec::for_spectrum(sp, 801);

    json rec;
    rec["n"] = it.n;
    rec["mu"] = mu;
    rec["a"] = a;
    bool pass = true;
    const double rsup = residual_sup(rep, grid);
    pass = pass && rsup < cfg.tol * (1.0 - sp.mu(0));
    rec["residual_sup"] = rsup;
    double motion_rel = 0.0;
    for (int k = 1; k <= it.n; ++k) {
      MotionReport mr = motion_report(rep, k, grid);
      motion_rel = std::max(motion_rel, mr.sup_abs / std::max(mr.sup_scale, 1e-30));
    }
    rec["motion_rel_sup"] = motion_rel;
    pass = pass && motion_rel < cfg.tol;
    double mass_err = 0.0;
    for (int i = 0; i < it.n; ++i)
      mass_err = std::max(mass_err, std::abs(mass(rep, i) - 2.0 * sp.eta(i)));
    rec["mass_err"] = mass_err;
    pass = pass && mass_err < cfg.tol;
    const double lt = lieb_thirring_gap(rep);
    rec["lieb_thirring_gap"] = lt;
    pass = pass && std::abs(lt) < 1e-6;
    if (opts.with_kernel) {
      KernelReport kr = kernel_dimension(rep, GridSpec::for_spectrum(sp, 1201));
      rec["kernel_dim"] = kr.discrete_kernel_dim;
      pass = pass && kr.discrete_kernel_dim == it.n;
    }
    rec["pass"] = pass;
    if (!pass) all_pass = false;
    results[static_cast<std::size_t>(idx)] = std::move(rec);
  });

  json doc;
  doc["seed"] = cfg.seed;
  doc["instances"] = results;
  doc["pass"] = all_pass.load();

  std::filesystem::create_directories(fl.out_dir);
  write_file(std::filesystem::path(fl.out_dir) / "sweep.json", doc.dump(2) + "\n");
  if (fl.json_only)
    std::printf("%s\n", doc.dump().c_str());
  else
    std::printf("sweep: %zu instances, %s (seed %llu)\n", results.size(),
                all_pass ? "all pass" : "FAILURES", static_cast<unsigned long long>(cfg.seed));
  return all_pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact multi-soliton bound states of the coupled cubic Schrodinger system"};
  app.require_subcommand(1);

  CommonFlags fl_build, fl_verify, fl_kernel, fl_branches, fl_normalized, fl_sweep;
  SweepOptions sweep_opts;

  CLI::App* build = app.add_subcommand("build", "write a solution profile (CSV + JSON header)");
  add_common(build, fl_build);
  CLI::App* verify = app.add_subcommand("verify", "run every invariant check on a solution");
  add_common(verify, fl_verify);
  CLI::App* kernel = app.add_subcommand("kernel", "discrete kernel dimension of the linearization");
  add_common(kernel, fl_kernel);
  CLI::App* branches =
      app.add_subcommand("branches", "trace the four solution branches for prescribed q");
  add_common(branches, fl_branches);
  std::optional<double> qflag, pflag;
  branches->add_option("--q", qflag, "initial ratio u2(0)/u1(0)");
  branches->add_option("--p", pflag, "derivative ratio to invert");
  CLI::App* normalized =
      app.add_subcommand("normalized", "classify normalized solutions for the spectrum");
  add_common(normalized, fl_normalized);
  CLI::App* sweep = app.add_subcommand("sweep", "seeded randomized verification suite");
  add_common(sweep, fl_sweep, false);
  sweep->add_option("--n", sweep_opts.n_values, "component counts to draw");
  sweep->add_option("--instances", sweep_opts.instances, "instances per component count");
  sweep->add_flag("--with-kernel", sweep_opts.with_kernel, "also check kernel dimensions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(fl_build);
    if (verify->parsed()) return cmd_verify(fl_verify);
    if (kernel->parsed()) return cmd_kernel(fl_kernel);
    if (branches->parsed()) return cmd_branches(fl_branches, qflag, pflag);
    if (normalized->parsed()) return cmd_normalized(fl_normalized);
    if (sweep->parsed()) return cmd_sweep(fl_sweep, sweep_opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const soliton::Error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
