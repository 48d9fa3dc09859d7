#pragma once

#include <optional>
#include <string>
#include <vector>

#include "haarpush/verify.hpp"

namespace haarpush {

// ---------------------------------------------------------------------------
// Run configuration: a single sectioned key-value file describing which
// chains to verify, with which integrator, tolerances and output format.
// The exact grammar is documented in the README; `dump_config` emits a file
// that re-parses to an identical RunConfig.
// ---------------------------------------------------------------------------

/// A user-defined group chart: a direct product of catalog chart names.
struct GroupDef {
  std::string name;
  std::vector<std::string> product;  // >= 1 catalog or earlier custom names

  bool operator==(const GroupDef&) const = default;
};

/// A density declared in the config. `bump` is a compact bump; `constant` is
/// the constant function; `product` is constant along the chain's base
/// coordinates times a bump along its H coordinates.
struct DensityDef {
  std::string name;
  std::string kind;  // "bump" | "constant" | "product"
  std::vector<double> center, radius;         // bump / the product's fiber bump
  double amp_re = 1.0, amp_im = 0.0;

  bool operator==(const DensityDef&) const = default;
};

/// A chain declared in the config. Chart chains give a group name plus the
/// coordinate split; exact chains give a finite group and two named
/// subgroups of it.
struct ChainDef {
  std::string name;
  std::string group;
  std::vector<int> h_coords, n_coords;        // chart backend
  std::string h_named, n_named;               // exact backend
  std::vector<std::pair<double, double>> window;  // optional, per coordinate
  std::vector<std::string> densities;         // names of DensityDefs

  bool is_finite() const { return !h_named.empty() || !n_named.empty(); }
  bool operator==(const ChainDef&) const = default;
};

struct RunConfig {
  std::vector<std::string> chains;   // names to run (catalog and/or declared)
  std::vector<std::string> checks;   // empty = every check
  Integrator integ;
  Integrator fiber_integ;
  Tolerances tol;
  uint64_t seed = 11;
  int n_random_fns = 5;
  std::string format = "json";       // json | md | csv
  std::string out;                   // empty = stdout
  bool seed_from_file = false;       // whether the file set `seed` (not compared)

  std::vector<GroupDef> groups;
  std::vector<DensityDef> densities;
  std::vector<ChainDef> chain_defs;

  bool operator==(const RunConfig& o) const;
};

/// Parse a configuration file's text. Throws Error with the line number and
/// section.key path of the offending entry.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical emission; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& c);

/// Materialize one chain named in the config: a catalog chain, or a declared
/// [chain.*] entry resolved against the declared groups and densities.
Chain chain_from_config(const RunConfig& c, const std::string& name);

/// ChainConfig view of the run-wide settings.
ChainConfig chain_config_of(const RunConfig& c, const std::string& chain_name);

}  // namespace haarpush
