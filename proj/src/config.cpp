#include "rmirt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rmirt/io.hpp"

namespace rmirt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string> kRequired = {
    "phantom.width",     "phantom.height",     "phantom.static_band_rows",
    "geometry.n_angles", "geometry.n_detectors", "geometry.n_subscans",
    "motion.model",      "motion.start",       "motion.end",
    "noise.sigma_fraction", "solver.n_iter",   "output.directory",
};

const std::set<std::string> kOptional = {
    "phantom.pixel_size",     "phantom.seed",          "phantom.structure",
    "phantom.radius_fraction", "geometry.angle_range", "geometry.detector_spacing",
    "motion.schedule",        "noise.seed",            "solver.init_iters",
    "solver.initial_mask_growth", "solver.alpha_step_scale", "solver.alpha_first_step",
    "solver.bb_max_factor",   "solver.x_step_min",     "solver.x_step_max",
    "solver.p_step_min",      "solver.p_step_max",     "solver.power_iterations",
    "solver.tie_masks",       "solver.threshold",      "solver.update_center",
    "solver.gauss_seidel",    "output.variants",
};

class Reader {
 public:
  explicit Reader(const KeyValueFile& f) : f_(f) {}

  int get_int(const std::string& key, std::optional<int> def = {}) const {
    auto v = f_.find(key);
    if (!v) return require(key, def);
    try {
      std::size_t pos = 0;
      const int out = std::stoi(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return out;
    } catch (const std::exception&) {
      f_.fail(key, "expected an integer, got '" + *v + "'");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const {
    auto v = f_.find(key);
    if (!v) return def;
    try {
      std::size_t pos = 0;
      const auto out = std::stoull(*v, &pos);
      if (pos != v->size() || v->front() == '-') throw std::invalid_argument("bad");
      return out;
    } catch (const std::exception&) {
      f_.fail(key, "expected a non-negative integer, got '" + *v + "'");
    }
  }

  double get_double(const std::string& key, std::optional<double> def = {}) const {
    auto v = f_.find(key);
    if (!v) return require(key, def);
    return parse_double(key, *v);
  }

  /// "auto" maps to 0.
  double get_auto_double(const std::string& key) const {
    auto v = f_.find(key);
    if (!v || *v == "auto") return 0.0;
    const double d = parse_double(key, *v);
    if (!(d > 0.0)) f_.fail(key, "expected a positive number or 'auto'");
    return d;
  }

  bool get_bool(const std::string& key, bool def) const {
    auto v = f_.find(key);
    if (!v) return def;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    f_.fail(key, "expected true or false, got '" + *v + "'");
  }

  Vec get_vec(const std::string& key) const {
    const std::string v = f_.get_string(key);
    Vec out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) f_.fail(key, "expected a comma-separated list of numbers");
    return out;
  }

  std::vector<std::string> get_list(const std::string& key,
                                    std::vector<std::string> def) const {
    auto v = f_.find(key);
    if (!v) return def;
    std::vector<std::string> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto v = f_.find(key);
    return v ? *v : def;
  }

  const KeyValueFile& file() const { return f_; }

 private:
  template <class T>
  T require(const std::string& key, std::optional<T> def) const {
    if (def) return *def;
    f_.get_string(key);  // throws the missing-key error
    return T{};
  }

  double parse_double(const std::string& key, const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double d = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(d)) throw std::invalid_argument("bad");
      return d;
    } catch (const std::exception&) {
      f_.fail(key, "expected a number, got '" + s + "'");
    }
  }

  const KeyValueFile& f_;
};

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& source) {
  KeyValueFile out;
  out.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  auto err = [&](const std::string& what) {
    return ConfigError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw err("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw err("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw err("expected 'key = value'");
    if (section.empty()) throw err("key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw err("empty key");
    const std::string full = section + "." + key;
    if (out.entries_.count(full))
      throw err("duplicate key '" + full + "' (first set on line " +
                std::to_string(out.entries_[full].line) + ")");
    out.entries_[full] = {value, line_no};
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string KeyValueFile::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second.value;
}

void KeyValueFile::fail(const std::string& key, const std::string& what) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": " + key + ": " + what);
  throw ConfigError(source_ + ":" + std::to_string(it->second.line) + ": " + key + ": " +
                    what);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::none: return "none";
    case Variant::global: return "global";
    default: return "rmirt";
  }
}

Variant variant_from_string(const std::string& s) {
  if (s == "none") return Variant::none;
  if (s == "global") return Variant::global;
  if (s == "rmirt") return Variant::rmirt;
  throw DomainError("unknown variant '" + s + "'");
}

ProjGeom ExperimentConfig::proj_geom() const {
  constexpr double kPi = 3.14159265358979323846;
  return ProjGeom::uniform(n_angles, angle_range_deg * kPi / 180.0, n_detectors,
                           detector_spacing, n_subscans);
}

MotionTimeline ExperimentConfig::timeline() const {
  MotionTimeline t;
  t.kind = motion_kind;
  t.start = motion_start;
  t.end = motion_end;
  t.schedule = schedule;
  t.center = {static_cast<double>(static_boundary_row(phantom) - 1),
              phantom.geom.center_col()};
  return t;
}

ExperimentConfig parse_experiment_config(const KeyValueFile& f) {
  for (const auto& [key, entry] : f.entries())
    if (!kRequired.count(key) && !kOptional.count(key))
      throw ConfigError(f.source() + ":" + std::to_string(entry.line) + ": unknown key '" +
                        key + "'");
  for (const auto& key : kRequired) f.get_string(key);

  Reader rd(f);
  ExperimentConfig c;

  const int w = rd.get_int("phantom.width");
  const int h = rd.get_int("phantom.height");
  const double ps = rd.get_double("phantom.pixel_size", 1.0);
  try {
    c.phantom.geom = GridGeom(w, h, ps);
  } catch (const DomainError& e) {
    f.fail("phantom.width", e.what());
  }
  c.phantom.static_band_rows = rd.get_int("phantom.static_band_rows");
  c.phantom.texture_seed = rd.get_u64("phantom.seed", 0);
  c.phantom.radius_fraction = rd.get_double("phantom.radius_fraction", 0.34);
  try {
    c.phantom.structure =
        phantom_structure_from_string(rd.get_string("phantom.structure", "textured_disk"));
  } catch (const DomainError& e) {
    f.fail("phantom.structure", e.what());
  }
  try {
    c.phantom.validate();
  } catch (const DomainError& e) {
    f.fail("phantom.static_band_rows", e.what());
  }
  if (static_boundary_row(c.phantom) < 1)
    f.fail("phantom.static_band_rows", "leaves no deformable rows");

  c.n_angles = rd.get_int("geometry.n_angles");
  c.angle_range_deg = rd.get_double("geometry.angle_range", 180.0);
  c.n_detectors = rd.get_int("geometry.n_detectors");
  c.detector_spacing = rd.get_double("geometry.detector_spacing", 1.0);
  c.n_subscans = rd.get_int("geometry.n_subscans");
  if (c.n_angles < 1) f.fail("geometry.n_angles", "must be positive");
  if (c.n_subscans < 1 || c.n_subscans > c.n_angles)
    f.fail("geometry.n_subscans", "must lie in [1, n_angles]");
  if (!(c.angle_range_deg > 0.0)) f.fail("geometry.angle_range", "must be positive");
  if (c.n_detectors * c.detector_spacing < std::hypot(w, h) * ps)
    f.fail("geometry.n_detectors", "detector does not cover the grid diagonal");

  try {
    c.motion_kind = motion_model_from_string(f.get_string("motion.model"));
  } catch (const DomainError& e) {
    f.fail("motion.model", e.what());
  }
  c.motion_start = rd.get_vec("motion.start");
  c.motion_end = rd.get_vec("motion.end");
  const auto m = static_cast<std::size_t>(param_count(c.motion_kind));
  if (c.motion_start.size() != m)
    f.fail("motion.start", "expected " + std::to_string(m) + " values for this model");
  if (c.motion_end.size() != m)
    f.fail("motion.end", "expected " + std::to_string(m) + " values for this model");
  if (!(c.motion_start[0] > 0 && c.motion_start[1] > 0))
    f.fail("motion.start", "scales must be positive");
  if (!(c.motion_end[0] > 0 && c.motion_end[1] > 0))
    f.fail("motion.end", "scales must be positive");
  const std::string sched = rd.get_string("motion.schedule", "linear");
  if (sched == "linear") c.schedule = Schedule::linear;
  else if (sched == "piecewise_constant") c.schedule = Schedule::piecewise_constant;
  else f.fail("motion.schedule", "expected linear or piecewise_constant");

  c.noise_fraction = rd.get_double("noise.sigma_fraction");
  if (c.noise_fraction < 0.0) f.fail("noise.sigma_fraction", "must be >= 0");
  c.noise_seed = rd.get_u64("noise.seed", 1);

  auto& s = c.solver;
  s.n_iter = rd.get_int("solver.n_iter");
  if (s.n_iter < 1) f.fail("solver.n_iter", "must be >= 1");
  c.init_iters = rd.get_int("solver.init_iters", 0);
  if (c.init_iters < 0) f.fail("solver.init_iters", "must be >= 0");
  c.initial_mask_growth = rd.get_int("solver.initial_mask_growth", 5);
  if (c.initial_mask_growth < 0) f.fail("solver.initial_mask_growth", "must be >= 0");
  s.alpha_step_scale = rd.get_auto_double("solver.alpha_step_scale");
  s.alpha_first_step = rd.get_double("solver.alpha_first_step", 0.25);
  if (!(s.alpha_first_step > 0.0)) f.fail("solver.alpha_first_step", "must be positive");
  s.bb_max_factor = rd.get_double("solver.bb_max_factor", s.bb_max_factor);
  if (!(s.bb_max_factor >= 1.0)) f.fail("solver.bb_max_factor", "must be >= 1");
  s.x_steps = {rd.get_auto_double("solver.x_step_min"), rd.get_auto_double("solver.x_step_max")};
  s.p_steps = {rd.get_auto_double("solver.p_step_min"), rd.get_auto_double("solver.p_step_max")};
  if (s.x_steps.min > 0 && s.x_steps.max > 0 && s.x_steps.min > s.x_steps.max)
    f.fail("solver.x_step_max", "must be >= x_step_min");
  if (s.p_steps.min > 0 && s.p_steps.max > 0 && s.p_steps.min > s.p_steps.max)
    f.fail("solver.p_step_max", "must be >= p_step_min");
  s.power_iterations = rd.get_int("solver.power_iterations", 20);
  if (s.power_iterations < 1) f.fail("solver.power_iterations", "must be >= 1");
  s.tie_masks = rd.get_bool("solver.tie_masks", false);
  s.threshold = rd.get_double("solver.threshold", 0.5);
  if (!(s.threshold > 0.0 && s.threshold < 1.0)) f.fail("solver.threshold", "must lie in (0,1)");
  s.update_center = rd.get_bool("solver.update_center", true);
  s.gauss_seidel = rd.get_bool("solver.gauss_seidel", false);

  c.variants.clear();
  for (const auto& v : rd.get_list("output.variants", {"none", "global", "rmirt"})) {
    try {
      const Variant var = variant_from_string(v);
      if (std::find(c.variants.begin(), c.variants.end(), var) != c.variants.end())
        f.fail("output.variants", "variant '" + v + "' listed twice");
      c.variants.push_back(var);
    } catch (const DomainError& e) {
      f.fail("output.variants", e.what());
    }
  }
  if (c.variants.empty()) f.fail("output.variants", "no variants selected");
  c.output_dir = f.get_string("output.directory");
  if (c.output_dir.empty()) f.fail("output.directory", "must not be empty");
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(KeyValueFile::load(path));
}

}  // namespace rmirt
