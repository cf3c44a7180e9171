#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace urysohn::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(field + ": expected a number, got '" + raw + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw ConfigError(field + ": expected a nonnegative integer, got '" + raw + "'");
  return v;
}

bool to_bool(const std::string& field, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "yes" || s == "1" || s == "on")
    return true;
  if (s == "false" || s == "no" || s == "0" || s == "off")
    return false;
  throw ConfigError(field + ": expected true or false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& field, const std::string& raw) {
  std::string s = raw;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  for (std::string tok; in >> tok;)
    out.push_back(to_double(field, tok));
  if (out.empty())
    throw ConfigError(field + ": expected at least one number");
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"system", {"name", "a", "b", "kernel", "lambda", "rho", "lower", "upper"}},
      {"grid", {"resolution"}},
      {"experiment", {"epsilon", "samples", "cap", "random_members", "seed", "tol", "max_iter", "workers"}},
      {"schedule", {"R_star", "tau_cap"}},
      {"output", {"dir", "csv", "json", "svg"}},
  };
  return keys;
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& section, const std::string& key) {
  const auto sec = tree.get_child_optional(section);
  if (!sec)
    return std::nullopt;
  const auto v = sec->get_optional<std::string>(key);
  if (!v)
    return std::nullopt;
  return trim(*v);
}

LinearSystemConfig parse_linear(const pt::ptree& tree) {
  LinearSystemConfig lin;
  auto require = [&](const std::string& key) {
    const auto v = get(tree, "system", key);
    if (!v || v->empty())
      throw ConfigError("[system] " + key + ": required for the linear system");
    return *v;
  };
  lin.a = to_double("[system] a", require("a"));
  if (const auto b = get(tree, "system", "b"))
    lin.b = to_double("[system] b", *b);
  lin.lambda = to_double("[system] lambda", require("lambda"));
  lin.rho = to_double("[system] rho", require("rho"));
  if (const auto k = get(tree, "system", "kernel")) {
    std::istringstream in(*k);
    std::string head;
    in >> head;
    if (head == "gauss") {
      std::string scale, length, extra;
      if (!(in >> scale >> length) || (in >> extra))
        throw ConfigError("[system] kernel: expected 'gauss <scale> <length>'");
      lin.kernel_scale = to_double("[system] kernel", scale);
      lin.kernel_length = to_double("[system] kernel", length);
      if (!(*lin.kernel_length > 0.0))
        throw ConfigError("[system] kernel: length must be positive");
    } else {
      lin.kernel_scale = to_double("[system] kernel", *k);
    }
  }
  lin.lower = get(tree, "system", "lower") ? to_list("[system] lower", *get(tree, "system", "lower")) : std::vector{0.0};
  lin.upper = get(tree, "system", "upper") ? to_list("[system] upper", *get(tree, "system", "upper")) : std::vector{1.0};
  if (lin.lower.size() != lin.upper.size())
    throw ConfigError("[system] lower/upper: dimensions differ");
  for (std::size_t i = 0; i < lin.lower.size(); ++i)
    if (!(lin.upper[i] > lin.lower[i]))
      throw ConfigError("[system] upper: must exceed lower on every axis");
  if (!(lin.lambda > 0.0))
    throw ConfigError("[system] lambda: must be positive");
  if (!(lin.rho > 0.0))
    throw ConfigError("[system] rho: must be positive");
  return lin;
}

} // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end())
      throw ConfigError("[" + section + "]: unknown section");
    if (!body.data().empty())
      throw ConfigError(section + ": keys must live inside a section");
    for (const auto& [key, _] : body)
      if (!it->second.count(key))
        throw ConfigError("[" + section + "] " + key + ": unknown key");
  }

  RunConfig cfg;
  cfg.source = text;
  const auto name = get(tree, "system", "name");
  if (!name || name->empty())
    throw ConfigError("[system] name: missing (a built-in system name or 'linear')");
  cfg.system_name = *name;
  if (cfg.system_name == "linear") {
    cfg.linear = parse_linear(tree);
  } else {
    for (const char* key : {"a", "b", "kernel", "lambda", "rho", "lower", "upper"})
      if (get(tree, "system", key))
        throw ConfigError(std::string("[system] ") + key + ": only valid with name = linear");
    const auto names = builtin_system_names();
    if (std::find(names.begin(), names.end(), cfg.system_name) == names.end())
      throw ConfigError("[system] name: unknown system '" + cfg.system_name + "'");
  }

  if (const auto v = get(tree, "grid", "resolution")) {
    cfg.resolution = static_cast<Index>(to_unsigned("[grid] resolution", *v));
    if (cfg.resolution < 1)
      throw ConfigError("[grid] resolution: must be >= 1");
  }

  const auto eps = get(tree, "experiment", "epsilon");
  if (!eps)
    throw ConfigError("[experiment] epsilon: missing");
  cfg.epsilons = to_list("[experiment] epsilon", *eps);
  for (double e : cfg.epsilons)
    if (!(e > 0.0))
      throw ConfigError("[experiment] epsilon: values must be positive");
  if (const auto v = get(tree, "experiment", "samples")) {
    cfg.sample_count = to_unsigned("[experiment] samples", *v);
    if (cfg.sample_count < 1)
      throw ConfigError("[experiment] samples: must be >= 1");
  }
  if (const auto v = get(tree, "experiment", "cap"))
    cfg.cap = to_unsigned("[experiment] cap", *v);
  if (const auto v = get(tree, "experiment", "random_members"))
    cfg.random_members = to_unsigned("[experiment] random_members", *v);
  if (const auto v = get(tree, "experiment", "seed"))
    cfg.seed = to_unsigned("[experiment] seed", *v);
  if (const auto v = get(tree, "experiment", "tol")) {
    cfg.tol = to_double("[experiment] tol", *v);
    if (!(cfg.tol > 0.0))
      throw ConfigError("[experiment] tol: must be positive");
  }
  if (const auto v = get(tree, "experiment", "max_iter")) {
    cfg.max_iter = static_cast<Index>(to_unsigned("[experiment] max_iter", *v));
    if (cfg.max_iter < 1)
      throw ConfigError("[experiment] max_iter: must be >= 1");
  }
  if (const auto v = get(tree, "experiment", "workers"))
    cfg.workers = static_cast<unsigned>(to_unsigned("[experiment] workers", *v));

  if (const auto v = get(tree, "schedule", "R_star")) {
    cfg.R_star = to_double("[schedule] R_star", *v);
    if (!(*cfg.R_star > 0.0))
      throw ConfigError("[schedule] R_star: must be positive");
  }
  if (const auto v = get(tree, "schedule", "tau_cap")) {
    cfg.tau_cap = to_double("[schedule] tau_cap", *v);
    if (!(*cfg.tau_cap > 0.0))
      throw ConfigError("[schedule] tau_cap: must be positive");
  }

  if (const auto v = get(tree, "output", "dir")) {
    if (v->empty())
      throw ConfigError("[output] dir: must not be empty");
    cfg.out_dir = *v;
  }
  if (const auto v = get(tree, "output", "csv"))
    cfg.emit_csv = to_bool("[output] csv", *v);
  if (const auto v = get(tree, "output", "json"))
    cfg.emit_json = to_bool("[output] json", *v);
  if (const auto v = get(tree, "output", "svg"))
    cfg.emit_svg = to_bool("[output] svg", *v);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SystemSpec<double> make_system(const RunConfig& cfg) {
  if (!cfg.linear)
    return builtin_system(cfg.system_name);
  const auto& lin = *cfg.linear;
  LinearSpec<double> spec;
  spec.a = lin.a;
  spec.b = lin.b;
  spec.lambda = lin.lambda;
  VectorXd lo = Eigen::Map<const VectorXd>(lin.lower.data(), static_cast<Index>(lin.lower.size()));
  VectorXd hi = Eigen::Map<const VectorXd>(lin.upper.data(), static_cast<Index>(lin.upper.size()));
  spec.domain = Box<double>(lo, hi);
  const double scale = lin.kernel_scale;
  if (lin.kernel_length) {
    const double l2 = *lin.kernel_length * *lin.kernel_length;
    spec.kernel = [scale, l2](const VectorXd& xi, const VectorXd& s) {
      return MatrixXd::Constant(1, 1, scale * std::exp(-(xi - s).squaredNorm() / l2));
    };
  } else {
    spec.kernel = [scale](const VectorXd&, const VectorXd&) { return MatrixXd::Constant(1, 1, scale); };
  }
  try {
    return to_system(spec, lin.rho, "linear");
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("[system]: ") + e.what());
  }
}

} // namespace urysohn::cli
