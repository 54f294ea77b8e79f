#include "oldroyd/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "oldroyd/errors.hpp"
#include "oldroyd/text.hpp"

namespace oldroyd {

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::energy_audit: return "energy-audit";
    case ExperimentKind::nu_sweep: return "nu-sweep";
    case ExperimentKind::besov_norm: return "besov-norm";
    case ExperimentKind::commutator_test: return "commutator-test";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::energy_audit, ExperimentKind::nu_sweep,
                 ExperimentKind::besov_norm, ExperimentKind::commutator_test}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'", "experiment");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

class Entries {
 public:
  explicit Entries(std::string_view text) {
    int line_no = 0;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (values_.count(key)) throw ConfigError("repeated key", key);
      values_[key] = std::string(trim(line.substr(eq + 1)));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  void reject_leftovers() const {
    if (!values_.empty()) throw ConfigError("unknown key", values_.begin()->first);
  }

 private:
  std::map<std::string, std::string> values_;
};

double to_double(std::string_view text, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("expected a number, got '" + std::string(text) + "'", key);
  }
  return v;
}

template <class Int>
Int to_integer(std::string_view text, const std::string& key) {
  Int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("expected an integer, got '" + std::string(text) + "'", key);
  }
  return v;
}

bool to_bool(std::string_view text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(text) + "'", key);
}

std::vector<double> to_double_list(std::string_view text, const std::string& key) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(to_double(item, key));
  return out;
}

lp::NormKind to_norm(std::string_view text, const std::string& key) {
  if (text == "besov") return lp::NormKind::homogeneous_besov;
  if (text == "sobolev") return lp::NormKind::sobolev;
  throw ConfigError("expected besov or sobolev, got '" + std::string(text) + "'", key);
}

template <class T, class Convert>
void read(Entries& e, const std::string& key, T& target, Convert&& convert) {
  if (auto v = e.take(key)) target = convert(*v, key);
}

template <class T, class Convert>
void require(Entries& e, const std::string& key, T& target, Convert&& convert) {
  auto v = e.take(key);
  if (!v) throw ConfigError("required key is missing", key);
  target = convert(*v, key);
}

const auto as_double = [](std::string_view t, const std::string& k) { return to_double(t, k); };
const auto as_int = [](std::string_view t, const std::string& k) { return to_integer<int>(t, k); };
const auto as_u64 = [](std::string_view t, const std::string& k) { return to_integer<std::uint64_t>(t, k); };
const auto as_bool = [](std::string_view t, const std::string& k) { return to_bool(t, k); };
const auto as_list = [](std::string_view t, const std::string& k) { return to_double_list(t, k); };
const auto as_string = [](std::string_view t, const std::string&) { return std::string(t); };

bool needs_model(ExperimentKind k) {
  return k == ExperimentKind::simulate || k == ExperimentKind::energy_audit || k == ExperimentKind::nu_sweep;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (needs_model(experiment)) {
    model.validate();
    stepper.validate();
  }
  if (!(init.amplitude > 0.0) || !std::isfinite(init.amplitude)) throw ConfigError("must be positive", "init.amplitude");
  if (!(init.k_min >= 1.0 && init.k_min <= init.k_max)) throw ConfigError("need 1 <= k_min <= k_max", "init.k_min");
  if (!(init.k_max < grid.dealias_cutoff())) throw ConfigError("band exceeds the dealiasing cutoff", "init.k_max");
  if (!(init.sigma > 0.0)) throw ConfigError("must be positive", "init.sigma");

  const auto& nus = sweep.nu_list;
  if (nus.size() < 3) throw ConfigError("at least three viscosities are needed for a rate fit", "sweep.nu_list");
  for (std::size_t i = 0; i < nus.size(); ++i) {
    if (!(nus[i] > 0.0)) throw ConfigError("viscosities must be positive", "sweep.nu_list");
    if (i > 0 && !(nus[i] < nus[i - 1])) throw ConfigError("must be strictly decreasing", "sweep.nu_list");
  }
  if (!(sweep.s_diff >= 0.0 && sweep.s_diff <= init.sigma - 2.0)) {
    throw ConfigError("must satisfy 0 <= s_diff <= sigma - 2", "sweep.s_diff");
  }
  if (!(sweep.control_tolerance > 0.0)) throw ConfigError("must be positive", "sweep.control_tolerance");
  if (workers < 1) throw ConfigError("must be at least 1", "run.workers");

  if (experiment == ExperimentKind::energy_audit && model.variant != Variant::generalized_no_damping) {
    throw ConfigError("energy-audit runs the generalized_no_damping system", "model.variant");
  }
  if (experiment == ExperimentKind::nu_sweep && model.variant != Variant::viscous_diffusive) {
    throw ConfigError("nu-sweep members are viscous_diffusive runs", "model.variant");
  }
  if (experiment == ExperimentKind::commutator_test) {
    if (ensemble.samples < 1) throw ConfigError("must be at least 1", "ensemble.samples");
    ensemble_spec(grid).validate();
  }
  if (experiment == ExperimentKind::besov_norm && field.path.empty()) {
    throw ConfigError("required key is missing", "field.path");
  }
}

lab::EnsembleSpec ExperimentConfig::ensemble_spec(const Grid& g) const {
  lab::EnsembleSpec spec;
  spec.grid = g;
  spec.field_band = {ensemble.k_min, ensemble.k_max};
  spec.spectrum_slope = ensemble.slope;
  spec.s_values = ensemble.s_values;
  spec.inequality = ensemble.inequality;
  for (int i = 0; i < ensemble.samples; ++i) spec.seeds.push_back(ensemble.seed_base + static_cast<std::uint64_t>(i));
  return spec;
}

ExperimentConfig parse_config(std::string_view text, ExperimentKind fallback) {
  Entries e(text);
  ExperimentConfig c;
  c.experiment = fallback;
  read(e, "experiment", c.experiment, [](std::string_view t, const std::string&) { return parse_experiment(t); });

  int dim = 2, size = 64;
  double dealias = Grid::kDefaultDealias;
  read(e, "grid.dim", dim, as_int);
  const bool grid_required = c.experiment != ExperimentKind::besov_norm;
  if (grid_required) {
    require(e, "grid.size", size, as_int);
  } else {
    read(e, "grid.size", size, as_int);
  }
  read(e, "grid.dealias_fraction", dealias, as_double);
  c.grid = Grid(dim, size, dealias);

  const auto variant = [](std::string_view t, const std::string&) { return parse_variant(t); };
  if (needs_model(c.experiment)) {
    require(e, "model.variant", c.model.variant, variant);
  } else {
    read(e, "model.variant", c.model.variant, variant);
  }
  // ν defaults to the only admissible value for the inviscid variant.
  c.model.nu = c.model.variant == Variant::inviscid_diffusive ? 0.0 : 1e-2;
  read(e, "model.nu", c.model.nu, as_double);
  read(e, "model.alpha", c.model.alpha, as_double);
  read(e, "model.k1", c.model.k1, as_double);
  read(e, "model.k2", c.model.k2, as_double);
  read(e, "model.b", c.model.b, as_double);

  read(e, "stepper.dt", c.stepper.dt, as_double);
  read(e, "stepper.scheme", c.stepper.scheme, [](std::string_view t, const std::string&) { return parse_scheme(t); });
  read(e, "stepper.t_end", c.stepper.t_end, as_double);
  read(e, "stepper.output_every", c.stepper.output_every, as_int);
  read(e, "stepper.cfl_safety", c.stepper.cfl_safety, as_double);

  read(e, "init.seed", c.init.seed, as_u64);
  read(e, "init.k_min", c.init.k_min, as_double);
  read(e, "init.k_max", c.init.k_max, as_double);
  read(e, "init.slope", c.init.slope, as_double);
  read(e, "init.amplitude", c.init.amplitude, as_double);
  read(e, "init.sigma", c.init.sigma, as_double);

  read(e, "sweep.nu_list", c.sweep.nu_list, as_list);
  read(e, "sweep.s_diff", c.sweep.s_diff, as_double);
  read(e, "sweep.dt_control", c.sweep.dt_control, as_bool);
  read(e, "sweep.control_tolerance", c.sweep.control_tolerance, as_double);

  read(e, "ensemble.inequality", c.ensemble.inequality,
       [](std::string_view t, const std::string&) { return lab::parse_inequality(t); });
  read(e, "ensemble.seed_base", c.ensemble.seed_base, as_u64);
  read(e, "ensemble.samples", c.ensemble.samples, as_int);
  read(e, "ensemble.s_values", c.ensemble.s_values, as_list);
  read(e, "ensemble.k_min", c.ensemble.k_min, as_double);
  read(e, "ensemble.k_max", c.ensemble.k_max, as_double);
  read(e, "ensemble.slope", c.ensemble.slope, as_double);
  read(e, "ensemble.refine", c.ensemble.refine, as_bool);
  read(e, "ensemble.refine_tolerance", c.ensemble.refine_tolerance, as_double);

  if (c.experiment == ExperimentKind::besov_norm) {
    require(e, "field.path", c.field.path, as_string);
  } else {
    read(e, "field.path", c.field.path, as_string);
  }
  read(e, "field.s", c.field.s, as_double);
  read(e, "field.norm", c.field.norm, to_norm);

  read(e, "output.dir", c.output_dir, as_string);
  read(e, "run.workers", c.workers, as_int);
  read(e, "acceptance.enforce", c.enforce_acceptance, as_bool);

  e.reject_leftovers();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind fallback) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), fallback);
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto line = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  const auto num = [](double v) { return format_number(v); };
  const auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
  };
  const auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };

  line("experiment", std::string(to_string(c.experiment)));
  line("grid.dim", std::to_string(c.grid.dim()));
  line("grid.size", std::to_string(c.grid.size()));
  line("grid.dealias_fraction", num(c.grid.dealias_fraction()));
  line("model.variant", std::string(to_string(c.model.variant)));
  line("model.nu", num(c.model.nu));
  line("model.alpha", num(c.model.alpha));
  line("model.k1", num(c.model.k1));
  line("model.k2", num(c.model.k2));
  line("model.b", num(c.model.b));
  line("stepper.dt", num(c.stepper.dt));
  line("stepper.scheme", std::string(to_string(c.stepper.scheme)));
  line("stepper.t_end", num(c.stepper.t_end));
  line("stepper.output_every", std::to_string(c.stepper.output_every));
  line("stepper.cfl_safety", num(c.stepper.cfl_safety));
  line("init.seed", std::to_string(c.init.seed));
  line("init.k_min", num(c.init.k_min));
  line("init.k_max", num(c.init.k_max));
  line("init.slope", num(c.init.slope));
  line("init.amplitude", num(c.init.amplitude));
  line("init.sigma", num(c.init.sigma));
  line("sweep.nu_list", list(c.sweep.nu_list));
  line("sweep.s_diff", num(c.sweep.s_diff));
  line("sweep.dt_control", boolean(c.sweep.dt_control));
  line("sweep.control_tolerance", num(c.sweep.control_tolerance));
  line("ensemble.inequality", std::string(lab::to_string(c.ensemble.inequality)));
  line("ensemble.seed_base", std::to_string(c.ensemble.seed_base));
  line("ensemble.samples", std::to_string(c.ensemble.samples));
  line("ensemble.s_values", list(c.ensemble.s_values));
  line("ensemble.k_min", num(c.ensemble.k_min));
  line("ensemble.k_max", num(c.ensemble.k_max));
  line("ensemble.slope", num(c.ensemble.slope));
  line("ensemble.refine", boolean(c.ensemble.refine));
  line("ensemble.refine_tolerance", num(c.ensemble.refine_tolerance));
  if (!c.field.path.empty()) line("field.path", c.field.path);
  line("field.s", num(c.field.s));
  line("field.norm", c.field.norm == lp::NormKind::sobolev ? "sobolev" : "besov");
  line("output.dir", c.output_dir);
  line("run.workers", std::to_string(c.workers));
  line("acceptance.enforce", boolean(c.enforce_acceptance));
  return out.str();
}

}  // namespace oldroyd
