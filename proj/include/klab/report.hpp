#pragma once

// Machine-readable outputs: report.json (schema 1) and plot-ready CSVs.
//
// report.json is byte-identical across runs of the same config and seed
// except for the "timestamp" field; wall times go to timing.csv.
//
// CSV columns:
//   trajectory_k<K>.csv   iteration, op_norm, frobenius
//   gram_k<K>.csv         row, col, re, im
//   endomorphism_*.csv    k, point, row, col, re, im
//   lambda_z.csv          k, lambda, lambda_inv, kernel_dim, moment_norm
//   a1_compare.csv        point, source, row, col, re, im
//   rho_constancy.csv     k, rho_min, rho_max, rel_spread
//   timing.csv            task, seconds

#include "klab/balancing.hpp"
#include "klab/bergman.hpp"
#include "klab/config.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace klab {

using Json = nlohmann::json;

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
  std::string repro;  // command that reproduces the check
};

class RunReport {
public:
  RunReport(std::string command, const ExperimentConfig& cfg);

  void add_check(CheckResult c);
  void add_result(int k, const std::string& key, Json value);
  void set(const std::string& key, Json value);
  void add_timing(const std::string& task, double seconds);

  bool all_passed() const;
  const std::vector<CheckResult>& checks() const { return checks_; }
  Json to_json(const std::string& timestamp) const;
  /// report.json and timing.csv under dir (created if missing).
  void write(const std::string& dir) const;

private:
  std::string command_;
  ExperimentConfig cfg_;
  std::vector<CheckResult> checks_;
  Json per_k_ = Json::object();
  Json extra_ = Json::object();
  std::vector<std::pair<std::string, double>> timings_;
};

/// Finite numbers as numbers, others as "inf", "-inf", "nan".
Json number(double x);
Json to_json(const CMat& m);
Json to_json(const MomentValue& mv);
Json to_json(const BalanceReport& rep);
Json to_json(const FlowReport& rep);
Json to_json(const EigEstimate& e);
Json to_json(const LambdaScaling& s);
Json to_json(const ExpansionFit& fit);
Json to_json(const RBoundedResult& r);
Json to_json(const AlmostBalancedVerdict& v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_trajectory_csv(const std::string& path, const std::vector<double>& op_norm,
                          const std::vector<double>& frobenius);
void write_matrix_csv(const std::string& path, const CMat& m);
std::string fmt(double x);

}  // namespace klab
