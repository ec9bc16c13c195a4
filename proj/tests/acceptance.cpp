// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "klab/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

using namespace klab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < budget_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %2d %-28s %8.2fs (budget %gs%s)  %s\n", ok ? "PASS" : "FAIL", id, name, s, budget_s,
              in_time ? "" : ", exceeded", o.detail.c_str());
  std::fflush(stdout);
}

Outcome from(const std::vector<CheckResult>& checks) {
  Outcome o{true, ""};
  for (const auto& c : checks) {
    o.passed = o.passed && c.passed;
    o.detail += (o.detail.empty() ? "" : "; ") + c.name + ": " + c.detail;
  }
  return o;
}

BalanceReport balance(const ModelSpace& ms, double tol) {
  BalancingSetup s;
  s.model = ms;
  return balance_iterate(initial_state(s), tol, 1000);
}

}  // namespace

int main() {
  criterion(1, "C_r closed form", 1, [] { return from({check_c_r(5)}); });

  criterion(2, "Prop 5.2 round trip", 5, [] { return from({check_prop52(2, 10, 21), check_prop52(3, 10, 31)}); });

  criterion(3, "Lemma 5.8 Psi identities", 30, [] {
    std::vector<CheckResult> cs;
    for (auto a : std::vector<std::vector<int>>{{0, 1}, {1, 3}, {0, 1, 2}, {2, 0, 0, 5}}) {
      CheckResult c = check_psi_identities(standard_problem(ModelSpace::line_bundle_sum_over_p1(a, 0)), 10, 3);
      c.name = "O(" + std::to_string(a.front()) + ")+..., r=" + std::to_string(a.size());
      cs.push_back(c);
    }
    return from(cs);
  });

  criterion(4, "route equality (Hirzebruch)", 300, [] {
    const BergmanProblem bp = standard_problem(ModelSpace::line_bundle_sum_over_p1({0, 1}, 0));
    std::vector<CheckResult> cs;
    for (int k = 3; k <= 6; ++k) cs.push_back(check_route(bp, k, 200, 40 + k, 1e-5));
    return from(cs);
  });

  criterion(5, "expansion (trivial bundle)", 600, [] {
    const BergmanProblem bp = standard_problem(ModelSpace::trivial_bundle_over_pm(1, 2, 0));
    std::mt19937_64 rng(5);
    std::vector<CVec> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(random_point(1, rng));
    const ExpansionFit fit = expansion_fit(bp, {4, 5, 6, 7, 8, 9, 10}, pts);
    // residual of k^{-m} B~ - I - A/k is the stored residual over k^m
    const double slope = fit.residual_slope - 1.0;
    const bool slope_ok = fit.exact || std::abs(slope + 2.0) <= 0.3;
    double a_err = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const CMat f = a1_formula(bp.h, bp.omega, pts[p]);
      a_err = std::max(a_err, (fit.a[p] - f).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff());
    }
    Outcome o;
    o.passed = slope_ok && a_err < 0.02;
    o.detail = (fit.exact ? std::string("residual at round-off (expansion terminates)")
                          : "slope " + sci(slope)) +
               "; fitted A_1(0,0) = " + sci(fit.a[0](0, 0).real()) + " vs a1_formula " +
               sci(a1_formula(bp.h, bp.omega, pts[0])(0, 0).real()) + ", rel error " + sci(a_err) + " (tol 2e-2)";
    return o;
  });

  criterion(6, "Prop 5.10 A_{1,1} vs FD", 300, [] { return from({check_a11(1, 2, 5, 61), check_a11(2, 2, 2, 62)}); });

  criterion(7, "balanced fixed point", 120, [] {
    Outcome o{true, ""};
    for (const ModelSpace& ms : {ModelSpace::projective_point(3), ModelSpace::trivial_bundle_over_pm(1, 2, 2)}) {
      const BalanceReport br = balance(ms, 1e-9);
      BalancingSetup s;
      s.model = ms;
      const EmbeddingState fin(std::make_shared<const EmbeddingGeometry>(s), br.final_gram);
      const double op = moment_map(fin).op_norm, var = relative_variance(fs_bergman_density(fin));
      o.passed = o.passed && op < 1e-8 && var < 1e-7;
      o.detail += ms.describe() + ": " + std::to_string(br.iterations) + " it, |M|_op " + sci(op) +
                  ", rho var " + sci(var) + "; ";
    }
    return o;
  });

  criterion(8, "almost-balanced order", 10, [] {
    Outcome o{true, ""};
    for (int q = 1; q <= 3; ++q) {
      std::vector<AlmostBalancedSample> seq;
      for (int k = 2; k <= 8; ++k) {
        AlmostBalancedSample s;
        s.k = k;
        s.m = CMat::Zero(3, 3);
        const double n = std::pow(static_cast<double>(k), -q - 1.0);
        s.m(0, 0) = n;
        s.m(1, 1) = -0.5 * n;
        s.m(2, 2) = -0.5 * n;
        s.d = 1.0;
        seq.push_back(s);
      }
      const auto at_q = almost_balanced_check(seq, q), above = almost_balanced_check(seq, q + 1);
      o.passed = o.passed && at_q.verdict && !above.verdict;
      o.detail += "q=" + std::to_string(q) + " order " + sci(at_q.fitted_order) + "; ";
    }
    return o;
  });

  criterion(9, "Lambda_z scaling on CP^1", 600, [] {
    BalancingSetup s;
    s.model = ModelSpace::line_bundle_sum_over_p1({0}, 1);
    const LambdaScaling ls = lambda_z_scaling(s, {1, 2, 3, 4, 5});
    Outcome o;
    o.passed = ls.exponent <= 4.5 && ls.monotone;
    o.detail = "exponent " + sci(ls.exponent) + " over " + std::to_string(ls.fitted_points) + " k, monotone " +
               (ls.monotone ? "yes" : "no") + "; lambda:";
    for (const auto& e : ls.table) o.detail += " " + sci(e.lambda) + "(ker " + std::to_string(e.kernel_dim) + ")";
    return o;
  });

  criterion(10, "bookkeeping", 300, [] {
    double rho_err = 0, tr_err = 0;
    auto rho = [&](const BergmanProblem& bp, int k) {
      rho_err = std::max(rho_err, check_rho_integral(bp, k).value);
    };
    const BergmanProblem hirz = standard_problem(ModelSpace::line_bundle_sum_over_p1({0, 1}, 0));
    for (int k = 3; k <= 6; ++k) rho(hirz, k);
    const BergmanProblem triv = standard_problem(ModelSpace::trivial_bundle_over_pm(1, 2, 0));
    for (int k = 4; k <= 10; ++k) rho(triv, k);
    rho(standard_problem(ModelSpace::projective_space_base(2, {0, 1}, 0)), 2);
    for (const ModelSpace& ms : {ModelSpace::projective_point(3), ModelSpace::trivial_bundle_over_pm(1, 2, 2),
                                 ModelSpace::line_bundle_sum_over_p1({0}, 3),
                                 ModelSpace::line_bundle_sum_over_p1({0, 1}, 2)}) {
      BalancingSetup s;
      s.model = ms;
      const EmbeddingState start = initial_state(s);
      tr_err = std::max(tr_err, std::abs(moment_map(start).m.trace()));
      const BalanceReport br = balance_iterate(start, 1e-9, 1000);
      tr_err = std::max(tr_err, std::abs(moment_map(EmbeddingState(start.geometry_ptr(), br.final_gram)).m.trace()));
    }
    return Outcome{rho_err < 1e-8 && tr_err < 1e-10,
                   "max rel |int rho - N| " + sci(rho_err) + ", max |tr M| " + sci(tr_err)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
