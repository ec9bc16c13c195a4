#include "klab/report.hpp"

#include <Eigen/Core>

#include <charconv>
#include <chrono>
#include <ctime>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace klab {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

Json to_json(const CMat& m) {
  Json rows = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back({number(m(i, j).real()), number(m(i, j).imag())});
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const MomentValue& mv) {
  return {{"op_norm", number(mv.op_norm)},
          {"frobenius", number(mv.frobenius)},
          {"trace", number(std::abs(mv.m.trace()))},
          {"D", number(mv.d)},
          {"volume", number(mv.volume)}};
}

namespace {

Json series(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

Json to_json(const BalanceReport& rep) {
  return {{"iterations", rep.iterations},
          {"converged", rep.converged},
          {"diverged", rep.diverged},
          {"final_op_norm", number(rep.op_norm.empty() ? NAN : rep.op_norm.back())},
          {"op_norm", series(rep.op_norm)},
          {"final_gram", to_json(rep.final_gram)}};
}

Json to_json(const FlowReport& rep) {
  return {{"iterations", rep.iterations},
          {"converged", rep.converged},
          {"final_op_norm", number(rep.op_norm.empty() ? NAN : rep.op_norm.back())},
          {"op_norm", series(rep.op_norm)},
          {"final_gram", to_json(rep.final_gram)}};
}

Json to_json(const EigEstimate& e) {
  return {{"k", e.k},
          {"su_dim", e.su_dim},
          {"sample_size", e.sample_size},
          {"lambda", number(e.lambda)},
          {"lambda_inv", number(e.lambda_inv)},
          {"kernel_dim", e.kernel_dim},
          {"moment_norm", number(e.moment_norm)},
          {"balanced", e.balanced}};
}

Json to_json(const LambdaScaling& s) {
  Json table = Json::array();
  for (const auto& e : s.table) table.push_back(to_json(e));
  return {{"table", table},
          {"exponent", number(s.exponent)},
          {"fitted_points", s.fitted_points},
          {"monotone", s.monotone}};
}

Json to_json(const ExpansionFit& fit) {
  Json pts = Json::array();
  for (std::size_t p = 0; p < fit.points.size(); ++p) {
    Json z = Json::array();
    for (long j = 0; j < fit.points[p].size(); ++j)
      z.push_back({number(fit.points[p](j).real()), number(fit.points[p](j).imag())});
    pts.push_back({{"z", z}, {"a1_fit", to_json(fit.a[p])}});
  }
  return {{"k", fit.ks},
          {"residual", series(fit.residual)},
          {"residual_slope", number(fit.residual_slope)},
          {"exact", fit.exact},
          {"points", pts}};
}

Json to_json(const RBoundedResult& r) {
  return {{"passed", r.passed},
          {"ca_norm", number(r.ca_norm)},
          {"min_ratio", number(r.min_ratio)},
          {"norm_margin", number(r.norm_margin)},
          {"positivity_margin", number(r.positivity_margin)}};
}

Json to_json(const AlmostBalancedVerdict& v) {
  return {{"verdict", v.verdict},
          {"fitted_order", number(v.fitted_order)},
          {"all_zero", v.all_zero},
          {"d_max_rel_error", number(v.d_max_error)}};
}

RunReport::RunReport(std::string command, const ExperimentConfig& cfg)
    : command_(std::move(command)), cfg_(cfg) {}

void RunReport::add_check(CheckResult c) { checks_.push_back(std::move(c)); }

void RunReport::add_result(int k, const std::string& key, Json value) {
  per_k_[std::to_string(k)][key] = std::move(value);
}

void RunReport::set(const std::string& key, Json value) { extra_[key] = std::move(value); }

void RunReport::add_timing(const std::string& task, double seconds) { timings_.emplace_back(task, seconds); }

bool RunReport::all_passed() const {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

Json RunReport::to_json(const std::string& timestamp) const {
  Json checks = Json::array();
  for (const auto& c : checks_) {
    Json j = {{"name", c.name},
              {"passed", c.passed},
              {"value", number(c.value)},
              {"tolerance", number(c.tolerance)},
              {"detail", c.detail}};
    if (!c.passed) j["repro"] = c.repro;
    checks.push_back(j);
  }
  return {{"schema", 1},
          {"command", command_},
          {"versions",
           {{"klab", "1.0.0"},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}}},
          {"timestamp", timestamp},
          {"config", serialize_config(cfg_)},
          {"checks", checks},
          {"all_passed", all_passed()},
          {"per_k", per_k_},
          {"results", extra_}};
}

void RunReport::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  std::ofstream f(std::filesystem::path(dir) / "report.json");
  if (!f) throw std::runtime_error("cannot write report.json in " + dir);
  f << to_json(buf).dump(2) << "\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& [task, s] : timings_) rows.push_back({task, fmt(s)});
  write_csv((std::filesystem::path(dir) / "timing.csv").string(), {"task", "seconds"}, rows);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << "\n";
  }
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& op_norm,
                          const std::vector<double>& frobenius) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < op_norm.size(); ++i)
    rows.push_back({std::to_string(i), fmt(op_norm[i]), fmt(frobenius[i])});
  write_csv(path, {"iteration", "op_norm", "frobenius"}, rows);
}

void write_matrix_csv(const std::string& path, const CMat& m) {
  std::vector<std::vector<std::string>> rows;
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j)
      rows.push_back({std::to_string(i), std::to_string(j), fmt(m(i, j).real()), fmt(m(i, j).imag())});
  write_csv(path, {"row", "col", "re", "im"}, rows);
}

}  // namespace klab
