#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmirt/core.hpp"
#include "rmirt/optimizer.hpp"
#include "rmirt/sim.hpp"

namespace rmirt {

/// Malformed or inconsistent experiment configuration. The message carries
/// "<source>:<line>: " when the problem is tied to a line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sectioned key-value text:
///
///   # comment
///   [section]
///   key = value
///
/// Keys are addressed as "section.key".
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(const std::string& text, const std::string& source);
  static KeyValueFile load(const std::string& path);

  const std::string& source() const noexcept { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  std::string get_string(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

enum class Variant { none, global, rmirt };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ExperimentConfig {
  PhantomSpec phantom;

  int n_angles = 180;
  double angle_range_deg = 180.0;
  int n_detectors = 192;
  double detector_spacing = 1.0;
  int n_subscans = 5;

  MotionModel motion_kind = MotionModel::scale2;
  Vec motion_start;
  Vec motion_end;
  Schedule schedule = Schedule::linear;

  double noise_fraction = 0.01;
  std::uint64_t noise_seed = 1;

  SolverOptions solver;
  int init_iters = 0;  // 0: start every variant from x = 0
  int initial_mask_growth = 5;

  std::vector<Variant> variants{Variant::none, Variant::global, Variant::rmirt};
  std::string output_dir;

  ProjGeom proj_geom() const;
  /// Center of motion at the boundary row of the true deformable region.
  MotionTimeline timeline() const;
};

/// Parses and cross-checks a configuration. Throws ConfigError.
ExperimentConfig parse_experiment_config(const KeyValueFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace rmirt
