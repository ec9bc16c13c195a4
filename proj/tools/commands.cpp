#include "commands.hpp"

#include "klab/suites.hpp"

#include <chrono>
#include <filesystem>
#include <random>

namespace klab::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string path_in(const ExperimentConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.out) / file).string();
}

BergmanProblem problem(const ExperimentConfig& cfg) {
  BergmanProblem bp = standard_problem(cfg.model(cfg.k_min));
  bp.base_degree = cfg.base_degree;
  bp.fiber_degree = cfg.fiber_degree;
  return bp;
}

BalancingSetup balancing_setup(const ExperimentConfig& cfg, int k) {
  BalancingSetup s;
  s.model = cfg.model(k);
  s.base_degree = cfg.base_degree;
  s.fiber_degree = cfg.fiber_degree;
  return s;
}

void add(RunReport& rep, const Invocation& inv, CheckResult c) {
  if (!c.passed) c.repro = repro(inv);
  rep.add_check(std::move(c));
}

void matrix_rows(std::vector<std::vector<std::string>>& rows, std::vector<std::string> prefix, const CMat& m) {
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      auto row = prefix;
      row.insert(row.end(), {std::to_string(i), std::to_string(j), fmt(m(i, j).real()), fmt(m(i, j).imag())});
      rows.push_back(std::move(row));
    }
}

}  // namespace

std::string repro(const Invocation& inv) {
  std::string s = "klab " + inv.command;
  if (!inv.config_path.empty()) s += " --config " + inv.config_path;
  s += " --seed " + std::to_string(inv.cfg.seed);
  return s;
}

RunReport run_verify(const Invocation& inv) {
  const ExperimentConfig& cfg = inv.cfg;
  RunReport rep(inv.command, cfg);
  auto t0 = Clock::now();
  add(rep, inv, check_c_r(std::max(5, cfg.rank)));
  rep.add_timing("c_r", since(t0));

  t0 = Clock::now();
  for (int r : {2, 3}) add(rep, inv, check_prop52(r, 10, cfg.seed + r));
  rep.add_timing("prop52", since(t0));

  const BergmanProblem bp = problem(cfg);
  t0 = Clock::now();
  add(rep, inv, check_psi_identities(bp, cfg.expansion_points, cfg.seed));
  rep.add_timing("psi_identities", since(t0));

  for (int k : cfg.k_range()) {
    t0 = Clock::now();
    add(rep, inv, check_route(bp, k, 50, cfg.seed + 100 + k, cfg.route_tol));
    add(rep, inv, check_rho_integral(bp, k));
    rep.add_timing("route_k" + std::to_string(k), since(t0));
  }

  if (cfg.m >= 1) {
    t0 = Clock::now();
    add(rep, inv, check_a11(cfg.m, std::max(cfg.rank, 2), 5, cfg.seed + 7));
    rep.add_timing("a11", since(t0));
  }
  return rep;
}

RunReport run_balance(const Invocation& inv) {
  const ExperimentConfig& cfg = inv.cfg;
  RunReport rep(inv.command, cfg);
  std::vector<AlmostBalancedSample> seq;
  std::mt19937_64 rng(cfg.seed);
  for (int k : cfg.k_range()) {
    const auto t0 = Clock::now();
    const BalancingSetup setup = balancing_setup(cfg, k);
    const EmbeddingState start = initial_state(setup);
    CMat gram;
    std::vector<double> op, fro;
    if (cfg.solver == Solver::t_iteration) {
      const BalanceReport br = balance_iterate(start, cfg.balance_tol, cfg.max_iter);
      rep.add_result(k, "balance", to_json(br));
      gram = br.final_gram;
      op = br.op_norm;
      fro = br.frobenius;
    } else {
      const FlowReport fr = gradient_flow(start, cfg.flow_step, cfg.balance_tol, cfg.max_iter);
      rep.add_result(k, "flow", to_json(fr));
      gram = fr.final_gram;
      op = fr.op_norm;
      fro = fr.frobenius;
    }
    const std::string ks = std::to_string(k);
    write_trajectory_csv(path_in(cfg, "trajectory_k" + ks + ".csv"), op, fro);
    write_matrix_csv(path_in(cfg, "gram_k" + ks + ".csv"), gram);

    const EmbeddingState fin(start.geometry_ptr(), gram);
    const MomentValue mv = moment_map(fin);
    rep.add_result(k, "moment", to_json(mv));
    rep.add_result(k, "rho_relative_variance", number(relative_variance(fs_bergman_density(fin))));
    add(rep, inv, {"trace_moment_k" + ks, std::abs(mv.m.trace()) < 1e-10, std::abs(mv.m.trace()), 1e-10,
                   "|tr M|", ""});

    if (setup.model.total_dim() > 0) {
      const int chart = setup.model.rank() - 1;
      std::vector<CVec> pts;
      for (int p = 0; p < cfg.expansion_points; ++p) pts.push_back(0.5 * random_point(setup.model.total_dim(), rng));
      const BergmanProblem bp = standard_problem(setup.model);
      const RBoundedResult rb = r_bounded_check(gram_form(fin, chart), reference_form(bp.h, bp.omega, k, chart),
                                                pts, cfg.r_bound, cfg.ca_order);
      rep.add_result(k, "r_bounded", to_json(rb));
    }
    AlmostBalancedSample s = almost_balanced_sample(fin);
    s.expected_d = topological_volume(setup.model) / static_cast<double>(fin.geometry().dimension());
    seq.push_back(std::move(s));
    rep.add_timing("balance_k" + ks, since(t0));
  }
  if (seq.size() >= 3) rep.set("almost_balanced", to_json(almost_balanced_check(seq, cfg.q)));
  return rep;
}

RunReport run_expansion(const Invocation& inv) {
  const ExperimentConfig& cfg = inv.cfg;
  RunReport rep(inv.command, cfg);
  const BergmanProblem bp = problem(cfg);
  if (cfg.m == 0) {
    // a point base has B~ = I for every k and no expansion to fit
    for (int k : cfg.k_range()) {
      const BergmanEndomorphism b(bp, k);
      rep.add_result(k, "b_tilde", to_json(b.at(CVec(0))));
    }
    rep.set("degenerate", "point base: B~_k is the identity");
    return rep;
  }
  std::mt19937_64 rng(cfg.seed);
  std::vector<CVec> pts;
  for (int p = 0; p < cfg.expansion_points; ++p) pts.push_back(random_point(cfg.m, rng));

  auto t0 = Clock::now();
  const ExpansionFit fit = expansion_fit(bp, cfg.k_range(), pts);
  rep.add_timing("expansion_fit", since(t0));
  rep.set("expansion", to_json(fit));

  std::vector<std::vector<std::string>> endo, cmp, rho_rows;
  for (std::size_t i = 0; i < fit.ks.size(); ++i)
    for (std::size_t p = 0; p < pts.size(); ++p)
      matrix_rows(endo, {std::to_string(fit.ks[i]), std::to_string(p)}, fit.b[i][p]);
  write_csv(path_in(cfg, "endomorphism_b.csv"), {"k", "point", "row", "col", "re", "im"}, endo);

  Json table = Json::array();
  const ProjectiveRule fiber = bp.fiber_rule();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const CMat formula = a1_formula(bp.h, bp.omega, pts[p]);
    const CMat alt = a1_alternative(bp.h, bp.omega, pts[p], fiber);
    const std::string ps = std::to_string(p);
    matrix_rows(cmp, {ps, "fit"}, fit.a[p]);
    matrix_rows(cmp, {ps, "formula"}, formula);
    matrix_rows(cmp, {ps, "alternative"}, alt);
    table.push_back({{"point", p},
                     {"fit_vs_formula", number((fit.a[p] - formula).norm() / formula.norm())},
                     {"fit_vs_alternative", number((fit.a[p] - alt).norm() / alt.norm())},
                     {"formula_vs_alternative", number((formula - alt).norm() / alt.norm())}});
  }
  write_csv(path_in(cfg, "a1_compare.csv"), {"point", "source", "row", "col", "re", "im"}, cmp);
  rep.set("a1_comparison", table);

  for (int k : cfg.k_range()) {
    t0 = Clock::now();
    const RhoDirect rho(bp, k);
    double lo = INFINITY, hi = 0;
    for (int p = 0; p < 20; ++p) {
      const double v = rho(random_point(cfg.m, rng), random_point(cfg.rank, rng));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    rho_rows.push_back({std::to_string(k), fmt(lo), fmt(hi), fmt((hi - lo) / hi)});
    add(rep, inv, check_rho_integral(bp, k));
    rep.add_timing("rho_k" + std::to_string(k), since(t0));
  }
  write_csv(path_in(cfg, "rho_constancy.csv"), {"k", "rho_min", "rho_max", "rel_spread"}, rho_rows);
  return rep;
}

RunReport run_moment_spectrum(const Invocation& inv) {
  const ExperimentConfig& cfg = inv.cfg;
  RunReport rep(inv.command, cfg);
  const auto t0 = Clock::now();
  const LambdaScaling ls = lambda_z_scaling(balancing_setup(cfg, cfg.k_min), cfg.k_range(), cfg.balance_tol,
                                            cfg.max_iter);
  rep.add_timing("lambda_z_scaling", since(t0));
  rep.set("lambda_z", to_json(ls));
  std::vector<std::vector<std::string>> rows;
  for (const EigEstimate& e : ls.table) {
    rows.push_back({std::to_string(e.k), fmt(e.lambda), fmt(e.lambda_inv), std::to_string(e.kernel_dim),
                    fmt(e.moment_norm)});
    rep.add_result(e.k, "eig_estimate", to_json(e));
  }
  write_csv(path_in(cfg, "lambda_z.csv"), {"k", "lambda", "lambda_inv", "kernel_dim", "moment_norm"}, rows);
  return rep;
}

}  // namespace klab::cli
