#include "onebit/config.hpp"

#include "onebit/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace onebit {

namespace {

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  if (d != std::floor(d)) throw std::invalid_argument("config: " + key + " must be an integer");
  return static_cast<long>(d);
}

InnerMethod parse_method(const std::string& v) {
  if (v == "adam") return InnerMethod::Adam;
  if (v == "gd" || v == "gradient_descent") return InnerMethod::GradientDescent;
  throw std::invalid_argument("config: unknown inner method '" + v + "'");
}

WarmStart parse_warm_start(const std::string& v) {
  if (v == "from_z") return WarmStart::FromZ;
  if (v == "from_previous") return WarmStart::FromPrevious;
  throw std::invalid_argument("config: unknown warm start '" + v + "'");
}

void set_field(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string full = section + "." + key;
  if (full == "task.kind") cfg.task = parse_task(value);
  else if (full == "task.n") cfg.n = static_cast<int>(to_long(value, full));
  else if (full == "task.m") cfg.m = static_cast<int>(to_long(value, full));
  else if (full == "task.mask_ratio") cfg.mask_ratio = to_double(value, full);
  else if (full == "task.sigma") cfg.sigma = to_double(value, full);
  else if (full == "task.prior") cfg.prior_path = value;
  else if (full == "task.height") cfg.height = static_cast<int>(to_long(value, full));
  else if (full == "task.width") cfg.width = static_cast<int>(to_long(value, full));
  else if (full == "schedule.t") cfg.schedule_t = static_cast<int>(to_long(value, full));
  else if (full == "schedule.beta_min") cfg.beta_min = to_double(value, full);
  else if (full == "schedule.beta_max") cfg.beta_max = to_double(value, full);
  else if (full == "recovery.lambda") cfg.lambda = to_double(value, full);
  else if (full == "recovery.zeta") cfg.zeta = to_double(value, full);
  else if (full == "recovery.nfe") cfg.nfe = static_cast<int>(to_long(value, full));
  else if (full == "recovery.inner_steps") cfg.inner_steps = static_cast<int>(to_long(value, full));
  else if (full == "recovery.inner_lr") cfg.inner_lr = to_double(value, full);
  else if (full == "recovery.inner_method") cfg.inner_method = parse_method(value);
  else if (full == "recovery.warm_start") cfg.warm_start = parse_warm_start(value);
  else if (full == "recovery.sigma") cfg.recovery_sigma = to_double(value, full);
  else if (full == "run.trials") cfg.trials = static_cast<int>(to_long(value, full));
  else if (full == "run.seed") cfg.seed = static_cast<std::uint64_t>(to_long(value, full));
  else if (full == "run.output") cfg.output_dir = value;
  else if (full == "run.threads") cfg.threads = static_cast<int>(to_long(value, full));
  else if (full == "run.data_range") cfg.data_range = to_double(value, full);
  else throw std::invalid_argument("config: unknown key '" + full + "'");
}

}  // namespace

std::string task_name(TaskKind t) {
  switch (t) {
    case TaskKind::OneBitCS: return "onebit_cs";
    case TaskKind::Logistic: return "logistic";
    case TaskKind::OneBitInpainting: return "onebit_inpainting";
  }
  return "?";
}

TaskKind parse_task(const std::string& name) {
  if (name == "onebit_cs") return TaskKind::OneBitCS;
  if (name == "logistic") return TaskKind::Logistic;
  if (name == "onebit_inpainting") return TaskKind::OneBitInpainting;
  throw std::invalid_argument("config: unknown task '" + name + "'");
}

double ExperimentConfig::resolved_lambda() const {
  if (lambda > 0.0) return lambda;
  return task == TaskKind::OneBitInpainting ? 1.0 : 0.02;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: task.n must be positive");
  if (task == TaskKind::OneBitInpainting) {
    if (!(mask_ratio > 0.0 && mask_ratio <= 1.0))
      throw std::invalid_argument("config: task.mask_ratio must be in (0,1]");
  } else if (m < 1) {
    throw std::invalid_argument("config: task.m must be positive");
  }
  if (sigma < 0.0) throw std::invalid_argument("config: task.sigma must be nonnegative");
  if (task == TaskKind::Logistic && sigma != 0.0)
    throw std::invalid_argument("config: logistic task has no sigma (set task.sigma = 0)");
  if ((height > 0) != (width > 0))
    throw std::invalid_argument("config: set both task.height and task.width or neither");
  if (height > 0 && static_cast<long>(height) * width != n)
    throw std::invalid_argument("config: task.height * task.width must equal task.n");
  if (schedule_t < 2) throw std::invalid_argument("config: schedule.t must be >= 2");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw std::invalid_argument("config: need 0 < beta_min <= beta_max < 1");
  if (lambda == 0.0 || (lambda < 0.0 && lambda != -1.0))
    throw std::invalid_argument("config: recovery.lambda must be positive");
  if (!(zeta >= 0.0 && zeta <= 1.0))
    throw std::invalid_argument("config: recovery.zeta must be in [0,1]");
  if (nfe < 1 || nfe > schedule_t)
    throw std::invalid_argument("config: need 1 <= recovery.nfe <= schedule.t");
  if (inner_steps < 1) throw std::invalid_argument("config: recovery.inner_steps must be >= 1");
  if (!(inner_lr > 0.0)) throw std::invalid_argument("config: recovery.inner_lr must be positive");
  if (recovery_sigma == 0.0 || (recovery_sigma < 0.0 && recovery_sigma != -1.0))
    throw std::invalid_argument("config: recovery.sigma must be positive");
  if (trials < 1) throw std::invalid_argument("config: run.trials must be >= 1");
  if (threads < 0) throw std::invalid_argument("config: run.threads must be >= 0");
  if (!(data_range > 0.0)) throw std::invalid_argument("config: run.data_range must be positive");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: bad section header on line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value on line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config: key outside any [section] on line " +
                                  std::to_string(line_no));
    set_field(cfg, section, key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like section.key=value: " + key_eq_value);
  const std::string full = trim(key_eq_value.substr(0, eq));
  const std::string value = trim(key_eq_value.substr(eq + 1));
  const auto dot = full.find('.');
  if (dot == std::string::npos)
    throw std::invalid_argument("override must look like section.key=value: " + key_eq_value);
  set_field(cfg, full.substr(0, dot), full.substr(dot + 1), value);
}

std::string canonical_config_string(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "recovery.inner_lr=" << cfg.inner_lr << '\n';
  os << "recovery.inner_method=" << (cfg.inner_method == InnerMethod::Adam ? "adam" : "gd") << '\n';
  os << "recovery.inner_steps=" << cfg.inner_steps << '\n';
  os << "recovery.lambda=" << cfg.resolved_lambda() << '\n';
  os << "recovery.nfe=" << cfg.nfe << '\n';
  os << "recovery.sigma=" << cfg.recovery_sigma << '\n';
  os << "recovery.warm_start="
     << (cfg.warm_start == WarmStart::FromZ ? "from_z" : "from_previous") << '\n';
  os << "recovery.zeta=" << cfg.zeta << '\n';
  os << "run.data_range=" << cfg.data_range << '\n';
  os << "run.seed=" << cfg.seed << '\n';
  os << "run.trials=" << cfg.trials << '\n';
  os << "schedule.beta_max=" << cfg.beta_max << '\n';
  os << "schedule.beta_min=" << cfg.beta_min << '\n';
  os << "schedule.t=" << cfg.schedule_t << '\n';
  os << "task.height=" << cfg.height << '\n';
  os << "task.kind=" << task_name(cfg.task) << '\n';
  os << "task.m=" << cfg.m << '\n';
  os << "task.mask_ratio=" << cfg.mask_ratio << '\n';
  os << "task.n=" << cfg.n << '\n';
  os << "task.prior=" << cfg.prior_path << '\n';
  os << "task.sigma=" << cfg.sigma << '\n';
  os << "task.width=" << cfg.width << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << std::hex << fnv1a64(canonical_config_string(cfg));
  return os.str();
}

}  // namespace onebit
