// Command-line front end: every experiment exposed with reproducible seeds,
// JSON config files, and CSV/JSON outputs written atomically.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chainmix/bernoulli_laplace.hpp"
#include "chainmix/concentration.hpp"
#include "chainmix/cutoff.hpp"
#include "chainmix/io.hpp"
#include "chainmix/prob.hpp"
#include "chainmix/rng.hpp"
#include "chainmix/traject.hpp"
#include "chainmix/two_host.hpp"

namespace {

using nlohmann::json;
using namespace chainmix;

// Values from --config file.json become extra command-line arguments for
// the chosen subcommand, appended only for flags not already given, so
// explicit flags always win.
std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + config_path + ": " + e.what());
  }
  if (!cfg.is_object())
    throw std::runtime_error("config " + config_path +
                             ": top level must be an object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args)
      if (a == flag) present = true;
    if (present) continue;
    auto append_scalar = [&args, &flag](const json& v) {
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back(flag);
      } else if (v.is_string()) {
        args.push_back(flag);
        args.push_back(v.get<std::string>());
      } else {
        args.push_back(flag);
        args.push_back(v.dump());
      }
    };
    if (value.is_array())
      for (const auto& v : value) append_scalar(v);
    else
      append_scalar(value);
  }
  return args;
}

std::string resolve_out(const std::string& out) {
  const char* dir = std::getenv("CHAINMIX_OUT_DIR");
  if (dir != nullptr && *dir != '\0' && !out.empty() && out.front() != '/')
    return std::string(dir) + "/" + out;
  return out;
}

bool handle_dry_run(bool dry_run, const json& resolved) {
  if (dry_run) std::cout << resolved.dump(2) << "\n";
  return dry_run;
}

struct EpiFlags {
  EpiParams p;
  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", p.alpha, "cross-infection rate 1 <- 2");
    cmd->add_option("--beta", p.beta, "cross-infection rate 2 <- 1");
    cmd->add_option("--gamma", p.gamma, "recovery rate of type 1");
    cmd->add_option("--delta", p.delta, "recovery rate of type 2");
    cmd->add_option("--mu", p.mu, "type-1 immigration coefficient");
    cmd->add_option("--nu", p.nu, "type-2 immigration coefficient");
    cmd->add_option("--n", p.n, "scale parameter");
  }
  json resolved() const {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma},
            {"delta", p.delta}, {"mu", p.mu},     {"nu", p.nu},
            {"n", p.n}};
  }
};

void add_common(CLI::App* cmd, std::string& config, bool& dry_run) {
  cmd->add_option("--config", config,
                  "JSON file of flag values (explicit flags override)");
  cmd->add_flag("--dry-run", dry_run,
                "validate and print the resolved parameters, compute nothing");
}

int run(int argc, char** argv) {
  CLI::App app{"Markov chain mixing, coupling, and concentration experiments"};
  app.require_subcommand(1);

  // bl-tv -------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();  // out
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto n = std::make_shared<int>(64);
    auto start = std::make_shared<int>(64);
    auto rmax = std::make_shared<long>(400);
    CLI::App* cmd = app.add_subcommand(
        "bl-tv", "exact urn-chain TV profile to equilibrium (CSV time,value)");
    cmd->add_option("--n", *n, "balls of each colour");
    cmd->add_option("--start", *start, "initial red count in the left urn");
    cmd->add_option("--rmax", *rmax, "profile computed for r = 0..rmax");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      const json resolved{{"subcommand", "bl-tv"}, {"n", *n},
                          {"start", *start},       {"rmax", *rmax},
                          {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      const TVProfile prof = bl_tv_profile(BLParams{*n}, *start, *rmax);
      atomic_write_text(resolve_out(*st), tv_profile_csv(prof));
    });
  }

  // bl-coupling ---------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto n = std::make_shared<int>(50);
    auto start = std::make_shared<int>(-1);
    auto trials = std::make_shared<std::size_t>(10000);
    auto seed = std::make_shared<std::uint64_t>();
    CLI::App* cmd = app.add_subcommand(
        "bl-coupling",
        "coalescence times of the monotone pair coupling (CSV trial,steps)");
    cmd->add_option("--n", *n, "balls of each colour");
    cmd->add_option("--start", *start,
                    "lower state of the split pair (default n/2)");
    cmd->add_option("--trials", *trials, "coupled pairs to run");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      const BLParams p{*n};
      const int j0 = *start >= 0 ? *start : *n / 2;
      const json resolved{{"subcommand", "bl-coupling"}, {"n", *n},
                          {"start", j0},                 {"trials", *trials},
                          {"seed", *seed},               {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      std::string out = "trial,steps\n";
      const SeedSpec root{*seed, 0};
      for (std::size_t i = 0; i < *trials; ++i) {
        Rng rng(root.stream(i));
        const long steps = bl_coalescence_time({j0, j0 + 1}, p, rng);
        out += std::to_string(i) + "," + std::to_string(steps) + "\n";
      }
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // bl-surrogate --------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto k = std::make_shared<int>(16);
    auto y0 = std::make_shared<int>(16);
    auto rgrid = std::make_shared<std::vector<long>>(
        std::vector<long>{0, 32, 64, 128, 256});
    CLI::App* cmd = app.add_subcommand(
        "bl-surrogate",
        "exact surrogate-chain TV against its closed-form bound "
        "(CSV r,tv,bound,pass)");
    cmd->add_option("--k", *k, "half the ball count");
    cmd->add_option("--y0", *y0, "initial centered state");
    cmd->add_option("--r", *rgrid, "step counts to check")->delimiter(',');
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      const json resolved{{"subcommand", "bl-surrogate"},
                          {"k", *k},
                          {"y0", *y0},
                          {"r", *rgrid},
                          {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      const auto rows = ehrenfest_tv_bound_check(EhrenfestParams{*k}, *y0,
                                                 *rgrid);
      std::string out = "r,tv,bound,pass\n";
      for (const auto& row : rows)
        out += std::to_string(row.r) + "," + format_double(row.tv) + "," +
               format_double(row.bound) + "," + (row.pass ? "1" : "0") + "\n";
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // bl-window -----------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto ns = std::make_shared<std::vector<int>>(std::vector<int>{64, 128});
    CLI::App* cmd = app.add_subcommand(
        "bl-window",
        "window constants fitted from exact profiles (CSV n,c1,c2)");
    cmd->add_option("--n", *ns, "chain sizes")->delimiter(',');
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      const json resolved{{"subcommand", "bl-window"},
                          {"n", *ns},
                          {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      if (ns->empty())
        throw CLI::ValidationError("--n", "at least one chain size required");
      const std::vector<double> deltas = bl_default_delta_grid();
      std::vector<TVProfile> profiles;
      for (int n : *ns) {
        const BLParams p{n};
        profiles.push_back(bl_tv_profile(p, n, bl_r_n(deltas.back(), p) + 1));
      }
      const WindowFitReport rep = bl_window_fit(*ns, profiles, deltas);
      std::string out = "n,c1,c2\n";
      for (const auto& e : rep.per_n)
        out += std::to_string(e.n) + "," + format_double(e.c1) + "," +
               format_double(e.c2) + "\n";
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // conc-bounds -----------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto which = std::make_shared<std::string>();
    auto m = std::make_shared<double>(0.0);
    auto delta = std::make_shared<double>(0.0);
    auto gamma = std::make_shared<double>(0.0);
    auto a_k = std::make_shared<double>(0.0);
    auto beta = std::make_shared<double>(0.0);
    auto a_hat = std::make_shared<double>(0.0);
    auto beta_hat = std::make_shared<double>(0.0);
    auto L = std::make_shared<double>(1.0);
    auto D = std::make_shared<double>(1.0);
    auto rho = std::make_shared<double>(1.0);
    auto q = std::make_shared<std::optional<double>>();
    auto b = std::make_shared<std::optional<double>>();
    auto horizon = std::make_shared<std::optional<double>>();
    auto phi = std::make_shared<double>(1.0);
    auto t0 = std::make_shared<double>(1.0);
    auto B = std::make_shared<double>(1.0);
    auto eta = std::make_shared<double>(1.0);
    auto r = std::make_shared<double>(1.0);
    auto K_H = std::make_shared<double>(1.0);
    CLI::App* cmd = app.add_subcommand(
        "conc-bounds", "evaluate one tail bound from named parameters (JSON)");
    cmd->add_option("--bound", *which,
                    "one of: mg, discrete, continuous, contractive-discrete-a, "
                    "contractive-discrete-b, contractive-continuous-a, "
                    "contractive-continuous-b, hitting")
        ->required();
    cmd->add_option("--m", *m, "deviation size");
    cmd->add_option("--delta", *delta, "summed conditional variance bound");
    cmd->add_option("--gamma", *gamma, "increment bound");
    cmd->add_option("--a-k", *a_k, "discrete-chain variance sum");
    cmd->add_option("--beta", *beta, "discrete-chain shift bound");
    cmd->add_option("--a-hat", *a_hat, "continuous-chain variance integral");
    cmd->add_option("--beta-hat", *beta_hat, "continuous-chain shift bound");
    cmd->add_option("--L", *L, "Lipschitz constant");
    cmd->add_option("--D", *D, "max jump distance");
    cmd->add_option("--rho", *rho, "contraction constant");
    cmd->add_option("--q", *q, "max total exit rate (continuous modes)");
    cmd->add_option("--b", *b, "excursion constant (b modes)");
    cmd->add_option("--horizon", *horizon, "k steps or t time (b modes)");
    cmd->add_option("--phi", *phi, "scaled start height (hitting)");
    cmd->add_option("--t0", *t0, "time horizon (hitting)");
    cmd->add_option("--B", *B, "max jump magnitude (hitting)");
    cmd->add_option("--eta", *eta, "min jump magnitude (hitting)");
    cmd->add_option("--r", *r, "half the jump rate (hitting)");
    cmd->add_option("--k-h", *K_H, "universal constant (hitting)");
    cmd->add_option("--out", *st, "output JSON path (default stdout)");
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved{{"subcommand", "conc-bounds"}, {"bound", *which},
                    {"m", *m}};
      double value;
      if (*which == "mg") {
        resolved["delta"] = *delta;
        resolved["gamma"] = *gamma;
        if (handle_dry_run(*dry, resolved)) return;
        value = mg_tail_bound(*m, {*delta, *gamma});
      } else if (*which == "discrete") {
        resolved["a-k"] = *a_k;
        resolved["beta"] = *beta;
        if (handle_dry_run(*dry, resolved)) return;
        value = discrete_chain_tail_bound(*m, {*a_k, *beta, 0});
      } else if (*which == "continuous") {
        resolved["a-hat"] = *a_hat;
        resolved["beta-hat"] = *beta_hat;
        if (handle_dry_run(*dry, resolved)) return;
        value = continuous_chain_tail_bound(*m, {*a_hat, *beta_hat, 0.0});
      } else if (*which == "hitting") {
        resolved.update(json{{"phi", *phi},
                             {"t0", *t0},
                             {"B", *B},
                             {"eta", *eta},
                             {"r", *r},
                             {"k-h", *K_H}});
        if (handle_dry_run(*dry, resolved)) return;
        value = hitting_time_bound({*phi, *t0, *B, *eta, *r, *K_H});
      } else if (which->rfind("contractive-", 0) == 0) {
        ContractiveMode mode;
        const std::string tail = which->substr(12);
        if (tail == "discrete-a")
          mode = ContractiveMode::discrete_a;
        else if (tail == "discrete-b")
          mode = ContractiveMode::discrete_b;
        else if (tail == "continuous-a")
          mode = ContractiveMode::continuous_a;
        else if (tail == "continuous-b")
          mode = ContractiveMode::continuous_b;
        else
          throw CLI::ValidationError("--bound", "unknown bound " + *which);
        resolved.update(json{{"L", *L}, {"D", *D}, {"rho", *rho}});
        if (*q) resolved["q"] = **q;
        if (*b) resolved["b"] = **b;
        if (*horizon) resolved["horizon"] = **horizon;
        if (handle_dry_run(*dry, resolved)) return;
        value = contractive_bound(*m, {*L, *D, *rho, *q, *b, *horizon}, mode);
      } else {
        throw CLI::ValidationError("--bound", "unknown bound " + *which);
      }
      const json out{{"bound", value}};
      if (st->empty())
        std::cout << out.dump() << "\n";
      else
        atomic_write_text(resolve_out(*st), out.dump() + "\n");
    });
  }

  // conc-verify -----------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto preset = std::make_shared<std::string>("bl-tail");
    auto n = std::make_shared<int>(100);
    auto start = std::make_shared<int>(100);
    auto r = std::make_shared<long>(575);
    auto trials = std::make_shared<std::size_t>(100000);
    auto seed = std::make_shared<std::uint64_t>();
    auto threads = std::make_shared<std::size_t>(1);
    CLI::App* cmd = app.add_subcommand(
        "conc-verify",
        "empirical tail of a simulated chain against its bound "
        "(CSV m,empirical,bound,se,pass)");
    cmd->add_option("--preset", *preset,
                    "verification preset: bl-tail (urn chain, Gaussian-form "
                    "bound at m = c sqrt(n), c in {1, 1.5, 2})");
    cmd->add_option("--n", *n, "urn-chain size");
    cmd->add_option("--start", *start, "initial state");
    cmd->add_option("--r", *r, "step count");
    cmd->add_option("--trials", *trials, "sample trajectories");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--threads", *threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      if (*preset != "bl-tail")
        throw CLI::ValidationError("--preset", "unknown preset " + *preset);
      const BLParams p{*n};
      const json resolved{{"subcommand", "conc-verify"}, {"preset", *preset},
                          {"n", *n},                     {"start", *start},
                          {"r", *r},                     {"trials", *trials},
                          {"seed", *seed},               {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      const DenseKernel kernel = bl_kernel(p);
      const double center = bl_mean(*start, p, *r);
      const double sqrt_n = std::sqrt(static_cast<double>(*n));
      const std::vector<double> m_grid{sqrt_n, 1.5 * sqrt_n, 2.0 * sqrt_n};
      const int j0 = *start;
      const long steps = *r;
      const TailVerifyReport rep = empirical_tail_verify(
          [&kernel, j0, steps](SeedSpec s) {
            return static_cast<double>(
                simulate_dtmc(kernel, static_cast<std::size_t>(j0), steps, s)
                    .back());
          },
          center, m_grid,
          [sqrt_n](double m) {
            const double c = m / sqrt_n;
            return 2.0 * std::exp(-c * c / 2.0);
          },
          *trials, SeedSpec{*seed, 0}, *threads);
      std::string out = "m,empirical,bound,se,pass\n";
      for (const auto& row : rep.rows)
        out += format_double(row.m) + "," + format_double(row.empirical) +
               "," + format_double(row.bound) + "," + format_double(row.se) +
               "," + (row.pass ? "1" : "0") + "\n";
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // walk-hitting ------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto phi = std::make_shared<double>(1.0);
    auto rate = std::make_shared<double>(2500.0);
    auto t0s = std::make_shared<std::vector<double>>(
        std::vector<double>{9.0, 16.0, 25.0});
    auto trials = std::make_shared<std::size_t>(5000);
    auto seed = std::make_shared<std::uint64_t>();
    auto K_H = std::make_shared<double>(1.0);
    auto threads = std::make_shared<std::size_t>(1);
    CLI::App* cmd = app.add_subcommand(
        "walk-hitting",
        "zero-hitting miss probability of a fast +-1 walk vs its bound "
        "(CSV t0,empirical,se,bound)");
    cmd->add_option("--phi", *phi, "scaled start height");
    cmd->add_option("--rate", *rate, "jump rate per direction");
    cmd->add_option("--t0", *t0s, "time horizons")->delimiter(',');
    cmd->add_option("--trials", *trials, "walks to run");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--k-h", *K_H, "universal constant in the bound");
    cmd->add_option("--threads", *threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      const json resolved{{"subcommand", "walk-hitting"}, {"phi", *phi},
                          {"rate", *rate},                {"t0", *t0s},
                          {"trials", *trials},            {"seed", *seed},
                          {"k-h", *K_H},                  {"out", resolve_out(*st)}};
      if (handle_dry_run(*dry, resolved)) return;
      const auto rows = walk_hitting_experiment(*phi, *rate, *t0s, *trials,
                                                SeedSpec{*seed, 0}, *K_H,
                                                *threads);
      std::string out = "t0,empirical,se,bound\n";
      for (const auto& row : rows)
        out += format_double(row.t0) + "," + format_double(row.empirical) +
               "," + format_double(row.se) + "," + format_double(row.bound) +
               "\n";
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // epi-mean ----------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto flags = std::make_shared<EpiFlags>();
    auto x1 = std::make_shared<long>(150);
    auto x2 = std::make_shared<long>(150);
    auto tmax = std::make_shared<double>(2.0);
    auto step = std::make_shared<double>(0.1);
    CLI::App* cmd = app.add_subcommand(
        "epi-mean",
        "exact mean trajectory of the two-host chain (CSV t,m1,m2)");
    flags->attach(cmd);
    cmd->add_option("--x1", *x1, "initial type-1 count");
    cmd->add_option("--x2", *x2, "initial type-2 count");
    cmd->add_option("--tmax", *tmax, "end time");
    cmd->add_option("--step", *step, "grid spacing");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved = flags->resolved();
      resolved.update(json{{"subcommand", "epi-mean"},
                           {"x1", *x1},
                           {"x2", *x2},
                           {"tmax", *tmax},
                           {"step", *step},
                           {"out", resolve_out(*st)}});
      flags->p.validate();
      if (!(*step > 0.0) || !(*tmax >= 0.0))
        throw CLI::ValidationError("--step/--tmax", "need step > 0, tmax >= 0");
      if (handle_dry_run(*dry, resolved)) return;
      std::string out = "t,m1,m2\n";
      for (double t = 0.0; t <= *tmax + 1e-12; t += *step) {
        const Vec2 m = mean_trajectory(flags->p, {*x1, *x2}, t);
        out += format_double(t) + "," + format_double(m[0]) + "," +
               format_double(m[1]) + "\n";
      }
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // epi-simulate --------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto flags = std::make_shared<EpiFlags>();
    auto x1 = std::make_shared<long>(150);
    auto x2 = std::make_shared<long>(150);
    auto tmax = std::make_shared<double>(2.0);
    auto seed = std::make_shared<std::uint64_t>();
    CLI::App* cmd = app.add_subcommand(
        "epi-simulate",
        "one exact jump path of the two-host chain (CSV time,x1,x2)");
    flags->attach(cmd);
    cmd->add_option("--x1", *x1, "initial type-1 count");
    cmd->add_option("--x2", *x2, "initial type-2 count");
    cmd->add_option("--tmax", *tmax, "end time");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved = flags->resolved();
      resolved.update(json{{"subcommand", "epi-simulate"},
                           {"x1", *x1},
                           {"x2", *x2},
                           {"tmax", *tmax},
                           {"seed", *seed},
                           {"out", resolve_out(*st)}});
      flags->p.validate();
      if (handle_dry_run(*dry, resolved)) return;
      const auto path = simulate_ctmc<EpiState>(
          epi_rates(flags->p), {*x1, *x2}, *tmax, SeedSpec{*seed, 0});
      atomic_write_text(resolve_out(*st), jump_path_csv(path));
    });
  }

  // epi-coalesce ---------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto flags = std::make_shared<EpiFlags>();
    auto x1 = std::make_shared<long>(150);
    auto x2 = std::make_shared<long>(150);
    auto sgrid = std::make_shared<std::vector<double>>(
        std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    auto trials = std::make_shared<std::size_t>(2000);
    auto seed = std::make_shared<std::uint64_t>();
    auto threads = std::make_shared<std::size_t>(1);
    CLI::App* cmd = app.add_subcommand(
        "epi-coalesce",
        "coupled-pair TV upper bound around the travel time "
        "(CSV time,value,se)");
    flags->attach(cmd);
    cmd->add_option("--x1", *x1, "initial type-1 count");
    cmd->add_option("--x2", *x2, "initial type-2 count");
    cmd->add_option("--s", *sgrid, "offsets past the travel time")
        ->delimiter(',');
    cmd->add_option("--trials", *trials, "coupled pairs (>= 1000)");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--threads", *threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved = flags->resolved();
      resolved.update(json{{"subcommand", "epi-coalesce"},
                           {"x1", *x1},
                           {"x2", *x2},
                           {"s", *sgrid},
                           {"trials", *trials},
                           {"seed", *seed},
                           {"out", resolve_out(*st)}});
      flags->p.validate();
      if (handle_dry_run(*dry, resolved)) return;
      const SeedSpec root{*seed, 0};
      const auto pool =
          equilibrium_sample(flags->p, *trials, root, *threads);
      const TVProfile prof = coalescence_tv_upper(
          flags->p, {*x1, *x2}, *sgrid, pool,
          root.stream(static_cast<std::uint64_t>(*trials)), *threads);
      atomic_write_text(resolve_out(*st), tv_profile_csv(prof));
    });
  }

  // epi-cutoff ------------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto flags = std::make_shared<EpiFlags>();
    auto zeta = std::make_shared<double>(0.5);
    auto sgrid = std::make_shared<std::vector<double>>(
        std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    auto trials = std::make_shared<std::size_t>(2000);
    auto seed = std::make_shared<std::uint64_t>();
    auto threads = std::make_shared<std::size_t>(1);
    CLI::App* cmd = app.add_subcommand(
        "epi-cutoff",
        "TV envelope around the travel time for a grid of starts (CSV "
        "x1,x2,t_center,s,lower,lower_se,lower_skipped,upper,upper_se)");
    flags->attach(cmd);
    cmd->add_option("--zeta", *zeta, "annulus parameter in (0,1)");
    cmd->add_option("--s", *sgrid, "offsets from the travel time")
        ->delimiter(',');
    cmd->add_option("--trials", *trials, "pairs / trajectories per start");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--threads", *threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved = flags->resolved();
      resolved.update(json{{"subcommand", "epi-cutoff"},
                           {"zeta", *zeta},
                           {"s", *sgrid},
                           {"trials", *trials},
                           {"seed", *seed},
                           {"out", resolve_out(*st)}});
      flags->p.validate();
      if (handle_dry_run(*dry, resolved)) return;
      const SeedSpec root{*seed, 0};
      const auto pool = equilibrium_sample(flags->p, *trials, root, *threads);
      const auto starts = cutoff_start_grid(flags->p, *zeta);
      std::string out =
          "x1,x2,t_center,s,lower,lower_se,lower_skipped,upper,upper_se\n";
      std::uint64_t block = 1;
      for (const EpiState& x : starts) {
        const double t_c = travel_time(flags->p, x);
        const auto lower = tv_lower_profile(
            flags->p, x, *sgrid, *trials, pool,
            root.stream(block << 32), *threads);
        const TVProfile upper = coalescence_tv_upper(
            flags->p, x, *sgrid, pool, root.stream((block + 1) << 32),
            *threads);
        for (std::size_t i = 0; i < sgrid->size(); ++i) {
          out += std::to_string(x.x1) + "," + std::to_string(x.x2) + "," +
                 format_double(t_c) + "," + format_double((*sgrid)[i]) + "," +
                 format_double(lower[i].lower_bound) + "," +
                 format_double(lower[i].se) + "," +
                 (lower[i].skipped ? "1" : "0") + "," +
                 format_double(upper.values[i]) + "," +
                 format_double(upper.se[i]) + "\n";
        }
        block += 2;
      }
      atomic_write_text(resolve_out(*st), out);
    });
  }

  // epi-equilibrium ---------------------------------------------------------------
  {
    auto st = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto dry = std::make_shared<bool>(false);
    auto flags = std::make_shared<EpiFlags>();
    auto trials = std::make_shared<std::size_t>(2000);
    auto seed = std::make_shared<std::uint64_t>();
    auto threads = std::make_shared<std::size_t>(1);
    CLI::App* cmd = app.add_subcommand(
        "epi-equilibrium",
        "near-equilibrium samples of the two-host chain (CSV trial,x1,x2)");
    flags->attach(cmd);
    cmd->add_option("--trials", *trials, "samples to draw");
    cmd->add_option("--seed", *seed, "root seed")->required();
    cmd->add_option("--threads", *threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", *st, "output CSV path")->required();
    add_common(cmd, *cfg, *dry);
    cmd->callback([=] {
      json resolved = flags->resolved();
      resolved.update(json{{"subcommand", "epi-equilibrium"},
                           {"trials", *trials},
                           {"seed", *seed},
                           {"out", resolve_out(*st)}});
      flags->p.validate();
      if (handle_dry_run(*dry, resolved)) return;
      const auto samples =
          equilibrium_sample(flags->p, *trials, SeedSpec{*seed, 0}, *threads);
      std::string out = "trial,x1,x2\n";
      for (std::size_t i = 0; i < samples.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(samples[i].x1) + "," +
               std::to_string(samples[i].x2) + "\n";
      atomic_write_text(resolve_out(*st), out);
    });
  }

  try {
    std::vector<std::string> args = merge_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes reversed args
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    // Help requests and flag errors both land here; CLI11 picks the code.
    return app.exit(e);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
