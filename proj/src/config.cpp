#include "haarpush/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "haarpush/catalog.hpp"

namespace haarpush {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error("config line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, int line, const std::string& path) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(line, path + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line, const std::string& path) {
  try {
    size_t used = 0;
    long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(line, path + ": expected an integer, got '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& v, int line, const std::string& path) {
  try {
    size_t used = 0;
    uint64_t d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(line, path + ": expected a non-negative integer, got '" + v + "'");
  }
}

std::vector<double> parse_doubles(const std::string& v, int line, const std::string& path) {
  std::vector<double> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_double(item, line, path));
  return out;
}

std::vector<int> parse_ints(const std::string& v, int line, const std::string& path) {
  std::vector<int> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<int>(parse_int(item, line, path)));
  return out;
}

std::vector<std::pair<double, double>> parse_window(const std::string& v, int line,
                                                    const std::string& path) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : split_list(v)) {
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      fail(line, path + ": expected lo:hi intervals, got '" + item + "'");
    const double lo = parse_double(trim(item.substr(0, colon)), line, path);
    const double hi = parse_double(trim(item.substr(colon + 1)), line, path);
    if (!(lo < hi)) fail(line, path + ": interval '" + item + "' is empty");
    out.emplace_back(lo, hi);
  }
  return out;
}

void parse_integrator_key(Integrator& integ, const std::string& key, const std::string& value,
                          int line, const std::string& section) {
  const std::string path = section + "." + key;
  if (key == "kind") {
    if (value == "gauss")
      integ.kind = IntegratorKind::GaussTensor;
    else if (value == "mc")
      integ.kind = IntegratorKind::MonteCarlo;
    else
      fail(line, path + ": expected gauss or mc, got '" + value + "'");
  } else if (key == "order") {
    integ.order = static_cast<int>(parse_int(value, line, path));
    if (integ.order < 2) fail(line, path + ": order must be >= 2");
  } else if (key == "panels") {
    integ.panels = static_cast<int>(parse_int(value, line, path));
    if (integ.panels < 1) fail(line, path + ": panels must be >= 1");
  } else if (key == "mc-samples") {
    integ.mc_samples = parse_int(value, line, path);
    if (integ.mc_samples < 2) fail(line, path + ": mc-samples must be >= 2");
  } else if (key == "mc-seed") {
    integ.seed = parse_u64(value, line, path);
  } else {
    fail(line, "unknown key '" + key + "' in [" + section + "]");
  }
}

std::string fmt(double d) {
  std::ostringstream os;
  os << std::setprecision(17) << d;
  return os.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

template <typename T, typename F>
std::string join_map(const std::vector<T>& v, F f) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}

bool integ_eq(const Integrator& a, const Integrator& b) {
  return a.kind == b.kind && a.order == b.order && a.panels == b.panels &&
         a.mc_samples == b.mc_samples && a.seed == b.seed;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return chains == o.chains && checks == o.checks && integ_eq(integ, o.integ) &&
         integ_eq(fiber_integ, o.fiber_integ) && tol.rel_tol == o.tol.rel_tol &&
         tol.abs_floor == o.tol.abs_floor && seed == o.seed &&
         n_random_fns == o.n_random_fns && format == o.format && out == o.out &&
         groups == o.groups && densities == o.densities && chain_defs == o.chain_defs;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  bool saw_fiber = false;

  std::string section;      // current section name ("run", "chain.foo", ...)
  GroupDef* group = nullptr;
  DensityDef* density = nullptr;
  ChainDef* chain = nullptr;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::set<std::string> seen_sections;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      group = nullptr;
      density = nullptr;
      chain = nullptr;
      if (section.empty()) fail(line, "empty section name");
      if (!seen_sections.insert(section).second)
        fail(line, "duplicate section [" + section + "]");
      if (section == "run" || section == "integrator" || section == "tolerance") {
        // scalar sections
      } else if (section == "fiber-integrator") {
        saw_fiber = true;
      } else if (section.rfind("group.", 0) == 0) {
        c.groups.push_back({section.substr(6), {}});
        group = &c.groups.back();
        if (group->name.empty()) fail(line, "empty group name");
      } else if (section.rfind("density.", 0) == 0) {
        c.densities.push_back({});
        density = &c.densities.back();
        density->name = section.substr(8);
        if (density->name.empty()) fail(line, "empty density name");
      } else if (section.rfind("chain.", 0) == 0) {
        c.chain_defs.push_back({});
        chain = &c.chain_defs.back();
        chain->name = section.substr(6);
        if (chain->name.empty()) fail(line, "empty chain name");
      } else {
        fail(line, "unknown section [" + section + "]");
      }
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) fail(line, "key '" + key + "' outside any section");
    const std::string path = section + "." + key;

    if (section == "run") {
      if (key == "chains")
        c.chains = split_list(value);
      else if (key == "checks")
        c.checks = split_list(value);
      else if (key == "seed") {
        c.seed = parse_u64(value, line, path);
        c.seed_from_file = true;
      }
      else if (key == "random-functions") {
        c.n_random_fns = static_cast<int>(parse_int(value, line, path));
        if (c.n_random_fns < 0) fail(line, path + ": must be >= 0");
      } else if (key == "format") {
        if (value != "json" && value != "md" && value != "csv")
          fail(line, path + ": expected json, md or csv, got '" + value + "'");
        c.format = value;
      } else if (key == "out")
        c.out = value;
      else
        fail(line, "unknown key '" + key + "' in [run]");
    } else if (section == "integrator") {
      parse_integrator_key(c.integ, key, value, line, section);
    } else if (section == "fiber-integrator") {
      parse_integrator_key(c.fiber_integ, key, value, line, section);
    } else if (section == "tolerance") {
      if (key == "rel") {
        c.tol.rel_tol = parse_double(value, line, path);
        if (c.tol.rel_tol < 0) fail(line, path + ": must be >= 0");
      } else if (key == "floor") {
        c.tol.abs_floor = parse_double(value, line, path);
        if (c.tol.abs_floor < 0) fail(line, path + ": must be >= 0");
      } else
        fail(line, "unknown key '" + key + "' in [tolerance]");
    } else if (group) {
      if (key == "product") {
        group->product = split_list(value);
        if (group->product.empty()) fail(line, path + ": needs at least one group name");
      } else
        fail(line, "unknown key '" + key + "' in [" + section + "]");
    } else if (density) {
      if (key == "kind") {
        if (value != "bump" && value != "constant" && value != "product")
          fail(line, path + ": expected bump, constant or product, got '" + value + "'");
        density->kind = value;
      } else if (key == "center")
        density->center = parse_doubles(value, line, path);
      else if (key == "radius") {
        density->radius = parse_doubles(value, line, path);
        for (double r : density->radius)
          if (!(r > 0)) fail(line, path + ": radii must be positive");
      } else if (key == "amplitude") {
        const auto parts = parse_doubles(value, line, path);
        if (parts.empty() || parts.size() > 2)
          fail(line, path + ": expected 're' or 're, im'");
        density->amp_re = parts[0];
        density->amp_im = parts.size() > 1 ? parts[1] : 0.0;
      } else
        fail(line, "unknown key '" + key + "' in [" + section + "]");
    } else if (chain) {
      if (key == "group")
        chain->group = value;
      else if (key == "h-coords")
        chain->h_coords = parse_ints(value, line, path);
      else if (key == "n-coords")
        chain->n_coords = parse_ints(value, line, path);
      else if (key == "h")
        chain->h_named = value;
      else if (key == "n")
        chain->n_named = value;
      else if (key == "window")
        chain->window = parse_window(value, line, path);
      else if (key == "densities")
        chain->densities = split_list(value);
      else
        fail(line, "unknown key '" + key + "' in [" + section + "]");
    } else {
      fail(line, "key '" + key + "' outside any section");
    }
  }

  if (!saw_fiber) c.fiber_integ = c.integ;

  // Cross-references must resolve.
  std::set<std::string> density_names;
  for (const auto& d : c.densities) {
    if (d.kind.empty())
      throw Error("config: [density." + d.name + "] is missing its kind");
    if (d.kind != "constant" && (d.center.empty() || d.radius.empty()))
      throw Error("config: [density." + d.name + "] needs center and radius");
    if (d.center.size() != d.radius.size())
      throw Error("config: [density." + d.name + "] center and radius lengths differ");
    if (!density_names.insert(d.name).second)
      throw Error("config: duplicate density name '" + d.name + "'");
  }
  std::set<std::string> group_names;
  for (const auto& g : c.groups)
    if (!group_names.insert(g.name).second)
      throw Error("config: duplicate group name '" + g.name + "'");
  std::set<std::string> chain_names;
  for (const auto& ch : c.chain_defs) {
    if (ch.group.empty())
      throw Error("config: [chain." + ch.name + "] is missing its group");
    if (ch.is_finite() && (ch.h_named.empty() || ch.n_named.empty()))
      throw Error("config: [chain." + ch.name + "] needs both h and n subgroup names");
    if (!ch.is_finite() && !ch.n_coords.empty() && ch.h_coords.empty())
      throw Error("config: [chain." + ch.name + "] has n-coords but no h-coords");
    for (const std::string& d : ch.densities)
      if (!density_names.count(d))
        throw Error("config: [chain." + ch.name + "] references unknown density '" + d + "'");
    if (!chain_names.insert(ch.name).second)
      throw Error("config: duplicate chain name '" + ch.name + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n";
  if (!c.chains.empty()) os << "chains = " << join(c.chains) << "\n";
  if (!c.checks.empty()) os << "checks = " << join(c.checks) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "random-functions = " << c.n_random_fns << "\n";
  os << "format = " << c.format << "\n";
  if (!c.out.empty()) os << "out = " << c.out << "\n";

  auto emit_integrator = [&os](const char* name, const Integrator& I) {
    os << "\n[" << name << "]\n";
    os << "kind = " << (I.kind == IntegratorKind::GaussTensor ? "gauss" : "mc") << "\n";
    os << "order = " << I.order << "\n";
    os << "panels = " << I.panels << "\n";
    os << "mc-samples = " << I.mc_samples << "\n";
    os << "mc-seed = " << I.seed << "\n";
  };
  emit_integrator("integrator", c.integ);
  emit_integrator("fiber-integrator", c.fiber_integ);

  os << "\n[tolerance]\n";
  os << "rel = " << fmt(c.tol.rel_tol) << "\n";
  os << "floor = " << fmt(c.tol.abs_floor) << "\n";

  for (const auto& g : c.groups) {
    os << "\n[group." << g.name << "]\n";
    os << "product = " << join(g.product) << "\n";
  }
  for (const auto& d : c.densities) {
    os << "\n[density." << d.name << "]\n";
    os << "kind = " << d.kind << "\n";
    if (!d.center.empty())
      os << "center = " << join_map(d.center, [](double x) { return fmt(x); }) << "\n";
    if (!d.radius.empty())
      os << "radius = " << join_map(d.radius, [](double x) { return fmt(x); }) << "\n";
    os << "amplitude = " << fmt(d.amp_re) << ", " << fmt(d.amp_im) << "\n";
  }
  for (const auto& ch : c.chain_defs) {
    os << "\n[chain." << ch.name << "]\n";
    os << "group = " << ch.group << "\n";
    if (ch.is_finite()) {
      os << "h = " << ch.h_named << "\n";
      os << "n = " << ch.n_named << "\n";
    } else {
      if (!ch.h_coords.empty())
        os << "h-coords = "
           << join_map(ch.h_coords, [](int x) { return std::to_string(x); }) << "\n";
      if (!ch.n_coords.empty())
        os << "n-coords = "
           << join_map(ch.n_coords, [](int x) { return std::to_string(x); }) << "\n";
    }
    if (!ch.window.empty())
      os << "window = " << join_map(ch.window, [](const std::pair<double, double>& w) {
        return fmt(w.first) + ":" + fmt(w.second);
      }) << "\n";
    if (!ch.densities.empty()) os << "densities = " << join(ch.densities) << "\n";
  }
  return os.str();
}

namespace {

ChartPtr resolve_chart(const RunConfig& c, const std::string& name, int depth = 0) {
  if (depth > 8) throw Error("group '" + name + "' is defined circularly");
  for (const auto& g : c.groups) {
    if (g.name != name) continue;
    ChartPtr chart;
    for (const std::string& part : g.product) {
      ChartPtr p = resolve_chart(c, part, depth + 1);
      chart = chart ? make_product(chart, p) : p;
    }
    return chart;
  }
  return find_group(name);
}

Density density_from_def(const DensityDef& d, const ChartPtr& chart,
                         const std::vector<int>& h_coords) {
  const int dim = chart->dim;
  const Cmplx amp(d.amp_re, d.amp_im);
  if (d.kind == "bump") {
    if (static_cast<int>(d.center.size()) != dim)
      throw Error("density '" + d.name + "': center has " +
                  std::to_string(d.center.size()) + " entries but " + chart->name +
                  " has dimension " + std::to_string(dim));
    return bump_density(chart, d.center, d.radius, amp);
  }
  std::vector<int> rest;
  for (int i = 0; i < dim; ++i)
    if (!std::count(h_coords.begin(), h_coords.end(), i)) rest.push_back(i);
  if (d.kind == "constant") {
    std::vector<int> all(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) all[static_cast<size_t>(i)] = i;
    return product_density(chart, {constant_factor(all, amp)});
  }
  if (d.kind == "product") {
    if (h_coords.empty())
      throw Error("density '" + d.name + "': product form needs a chain with h-coords");
    if (d.center.size() != h_coords.size())
      throw Error("density '" + d.name + "': center must match the chain's h-coords (" +
                  std::to_string(h_coords.size()) + " entries)");
    std::vector<DensityFactor> factors;
    if (!rest.empty()) factors.push_back(constant_factor(rest));
    factors.push_back(bump_factor(h_coords, d.center, d.radius, amp));
    return product_density(chart, std::move(factors));
  }
  throw Error("density '" + d.name + "': unknown kind '" + d.kind + "'");
}

}  // namespace

ChainConfig chain_config_of(const RunConfig& c, const std::string& chain_name) {
  ChainConfig cfg;
  cfg.chain = chain_name;
  cfg.tol = c.tol;
  cfg.integ = c.integ;
  cfg.fiber_integ = c.fiber_integ;
  cfg.seed = c.seed;
  cfg.n_random_fns = c.n_random_fns;
  return cfg;
}

Chain chain_from_config(const RunConfig& c, const std::string& name) {
  const ChainConfig cfg = chain_config_of(c, name);
  for (const auto& ch : c.chain_defs) {
    if (ch.name != name) continue;
    ChainSpec spec;
    spec.name = ch.name;
    if (ch.is_finite()) {
      spec.finite = true;
      spec.group = ch.group;
      spec.h_named = ch.h_named;
      spec.n_named = ch.n_named;
      return build_chain(spec, cfg);
    }
    spec.chart = resolve_chart(c, ch.group);
    spec.h_coords = ch.h_coords;
    spec.n_coords = ch.n_coords;
    if (!ch.window.empty()) {
      Box w;
      for (const auto& [lo, hi] : ch.window) w.iv.push_back({lo, hi});
      spec.window = w;
    }
    for (const std::string& dname : ch.densities)
      for (const auto& d : c.densities)
        if (d.name == dname)
          spec.densities.push_back(density_from_def(d, spec.chart, spec.h_coords));
    return build_chain(spec, cfg);
  }
  return build_chain(name, cfg);  // catalog name (throws a listing otherwise)
}

}  // namespace haarpush
