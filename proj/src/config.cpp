#include "klab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace klab {

namespace pt = boost::property_tree;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::projective_point: return "projective_point";
    case ModelKind::line_bundle_sum_over_p1: return "line_bundle_sum_over_p1";
    case ModelKind::projective_space_base: return "projective_space_base";
    case ModelKind::trivial_bundle_over_pm: return "trivial_bundle_over_pm";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  for (auto k : {ModelKind::projective_point, ModelKind::line_bundle_sum_over_p1,
                 ModelKind::projective_space_base, ModelKind::trivial_bundle_over_pm})
    if (to_string(k) == s) return k;
  throw ConfigError("model.kind: unknown model kind '" + s + "'");
}

ModelSpace ExperimentConfig::model(int k) const {
  switch (kind) {
    case ModelKind::projective_point: return ModelSpace::projective_point(rank);
    case ModelKind::line_bundle_sum_over_p1: return ModelSpace::line_bundle_sum_over_p1(degrees, k);
    case ModelKind::projective_space_base: return ModelSpace::projective_space_base(m, degrees, k);
    case ModelKind::trivial_bundle_over_pm: return ModelSpace::trivial_bundle_over_pm(m, rank, k);
  }
  throw ConfigError("model.kind: unset");
}

std::vector<int> ExperimentConfig::k_range() const {
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
  return ks;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"kind", "m", "rank", "degrees"}},
      {"k", {"min", "max"}},
      {"quadrature", {"base_degree", "fiber_degree"}},
      {"tolerance", {"balance", "max_iter", "route", "expansion_points"}},
      {"solver", {"method", "step"}},
      {"diagnostics", {"q", "r_bound", "ca_order"}},
      {"run", {"out", "seed", "workers"}},
  };
  return keys;
}

template <class T>
T parse_number(const std::string& field, const std::string& raw) {
  T v{};
  const char* b = raw.data();
  const char* e = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ConfigError(field + ": cannot parse '" + raw + "'");
  return v;
}

template <class T>
void read(const pt::ptree& tree, const std::string& field, T& out) {
  const auto v = tree.get_optional<std::string>(pt::ptree::path_type(field, '.'));
  if (v) out = parse_number<T>(field, *v);
}

std::vector<int> parse_int_list(const std::string& field, const std::string& raw) {
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(field + ": empty list entry");
    out.push_back(parse_number<int>(field, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

void validate(const ExperimentConfig& c) {
  if (c.k_min > c.k_max) throw ConfigError("k: empty k-range (min > max)");
  if (c.k_min < 0) throw ConfigError("k.min: must be non-negative");
  if (!(c.balance_tol > 0.0)) throw ConfigError("tolerance.balance: must be positive");
  if (!(c.route_tol > 0.0)) throw ConfigError("tolerance.route: must be positive");
  if (c.max_iter < 1) throw ConfigError("tolerance.max_iter: must be at least 1");
  if (c.expansion_points < 1) throw ConfigError("tolerance.expansion_points: must be at least 1");
  if (!(c.flow_step > 0.0)) throw ConfigError("solver.step: must be positive");
  if (c.q < 0) throw ConfigError("diagnostics.q: must be non-negative");
  if (!(c.r_bound > 1.0)) throw ConfigError("diagnostics.r_bound: must exceed 1");
  if (c.ca_order < 0) throw ConfigError("diagnostics.ca_order: must be non-negative");
  if (c.workers < 0) throw ConfigError("run.workers: must be non-negative");
  try {
    for (int k : c.k_range()) c.model(k).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << "config line " << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty() && body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  }

  ExperimentConfig c;
  if (auto kind = tree.get_optional<std::string>("model.kind")) c.kind = model_kind_from_string(*kind);
  read(tree, "model.m", c.m);
  if (c.kind == ModelKind::projective_point) c.m = 0;
  if (c.kind == ModelKind::line_bundle_sum_over_p1) c.m = 1;
  const auto deg = tree.get_optional<std::string>("model.degrees");
  const auto rank = tree.get_optional<std::string>("model.rank");
  if (deg) c.degrees = parse_int_list("model.degrees", *deg);
  if (rank) {
    c.rank = parse_number<int>("model.rank", *rank);
    if (c.rank < 1) throw ConfigError("model.rank: must be positive");
    if (!deg) c.degrees.assign(c.rank, 0);
  }
  if (deg && rank && static_cast<int>(c.degrees.size()) != c.rank)
    throw ConfigError("model.rank: does not match the length of model.degrees");
  c.rank = static_cast<int>(c.degrees.size());

  read(tree, "k.min", c.k_min);
  read(tree, "k.max", c.k_max);
  read(tree, "quadrature.base_degree", c.base_degree);
  read(tree, "quadrature.fiber_degree", c.fiber_degree);
  read(tree, "tolerance.balance", c.balance_tol);
  read(tree, "tolerance.max_iter", c.max_iter);
  read(tree, "tolerance.route", c.route_tol);
  read(tree, "tolerance.expansion_points", c.expansion_points);
  if (auto method = tree.get_optional<std::string>("solver.method")) {
    if (*method == "t_iteration") c.solver = Solver::t_iteration;
    else if (*method == "gradient_flow") c.solver = Solver::gradient_flow;
    else throw ConfigError("solver.method: expected t_iteration or gradient_flow, got '" + *method + "'");
  }
  read(tree, "solver.step", c.flow_step);
  read(tree, "diagnostics.q", c.q);
  read(tree, "diagnostics.r_bound", c.r_bound);
  read(tree, "diagnostics.ca_order", c.ca_order);
  if (auto out = tree.get_optional<std::string>("run.out")) c.out = *out;
  read(tree, "run.seed", c.seed);
  read(tree, "run.workers", c.workers);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[model]\nkind = " << to_string(c.kind) << "\nm = " << c.m << "\nrank = " << c.rank << "\ndegrees = ";
  for (std::size_t i = 0; i < c.degrees.size(); ++i) os << (i ? "," : "") << c.degrees[i];
  os << "\n\n[k]\nmin = " << c.k_min << "\nmax = " << c.k_max << "\n\n";
  os << "[quadrature]\nbase_degree = " << c.base_degree << "\nfiber_degree = " << c.fiber_degree << "\n\n";
  os << "[tolerance]\nbalance = " << format_double(c.balance_tol) << "\nmax_iter = " << c.max_iter
     << "\nroute = " << format_double(c.route_tol) << "\nexpansion_points = " << c.expansion_points << "\n\n";
  os << "[solver]\nmethod = " << (c.solver == Solver::t_iteration ? "t_iteration" : "gradient_flow")
     << "\nstep = " << format_double(c.flow_step) << "\n\n";
  os << "[diagnostics]\nq = " << c.q << "\nr_bound = " << format_double(c.r_bound)
     << "\nca_order = " << c.ca_order << "\n\n";
  os << "[run]\nout = " << c.out << "\nseed = " << c.seed << "\nworkers = " << c.workers << "\n";
  return os.str();
}

}  // namespace klab
