#include "haarpush/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "haarpush/catalog.hpp"
#include "haarpush/config.hpp"
#include "haarpush/report.hpp"

namespace haarpush {

namespace {

std::vector<std::string> split_csv_args(const std::vector<std::string>& occurrences) {
  std::vector<std::string> out;
  for (const std::string& occ : occurrences) {
    std::stringstream ss(occ);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const size_t a = item.find_first_not_of(" \t");
      const size_t b = item.find_last_not_of(" \t");
      if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
  }
  return out;
}

struct GroupBlurb {
  const char* name;
  const char* blurb;
};

constexpr GroupBlurb kChartBlurbs[] = {
    {"R^n", "flat space under translation (r1, r2, r3, ...; also R^n:k)"},
    {"aff1", "affine line x -> a x + b with a > 0; the standard non-unimodular example"},
    {"heis3", "Heisenberg group of unipotent upper-triangular 3x3 matrices; nilpotent"},
    {"borel3", "upper-triangular 3x3 with positive diagonal; solvable, non-unimodular"},
};

constexpr GroupBlurb kFinBlurbs[] = {
    {"z2", "cyclic group of order 2"},   {"z4", "cyclic group of order 4"},
    {"z8", "cyclic group of order 8"},   {"s4", "permutations of 4 letters"},
    {"d4", "symmetries of the square"},  {"q8", "quaternion group"},
};

bool matches(const std::string& filter, const std::string& name) {
  return filter.empty() || name.find(filter) != std::string::npos;
}

int cmd_catalog(const std::string& filter, bool as_json, std::ostream& out) {
  if (as_json) {
    nlohmann::json j{{"groups", nlohmann::json::array()},
                     {"finite_groups", nlohmann::json::array()},
                     {"chains", nlohmann::json::array()}};
    for (const auto& g : kChartBlurbs)
      if (matches(filter, g.name)) j["groups"].push_back({{"name", g.name}, {"blurb", g.blurb}});
    for (const auto& g : kFinBlurbs)
      if (matches(filter, g.name))
        j["finite_groups"].push_back({{"name", g.name}, {"blurb", g.blurb}});
    for (const std::string& name : chain_catalog_names())
      if (matches(filter, name))
        j["chains"].push_back({{"name", name},
                               {"blurb", chain_catalog_blurb(name)},
                               {"checks", all_check_names()}});
    out << j.dump(2) << "\n";
    return 0;
  }

  std::vector<const GroupBlurb*> charted, finite;
  for (const auto& g : kChartBlurbs)
    if (matches(filter, g.name)) charted.push_back(&g);
  for (const auto& g : kFinBlurbs)
    if (matches(filter, g.name)) finite.push_back(&g);
  std::vector<std::string> chains;
  for (const std::string& name : chain_catalog_names())
    if (matches(filter, name)) chains.push_back(name);

  if (!charted.empty()) {
    out << "group charts:\n";
    for (const auto* g : charted)
      out << "  " << std::left << std::setw(10) << g->name << " " << g->blurb << "\n";
    out << "  (direct products are available through [group.*] config tables)\n";
  }
  if (!finite.empty()) {
    out << "finite groups (exact rational backend):\n";
    for (const auto* g : finite)
      out << "  " << std::left << std::setw(10) << g->name << " " << g->blurb << "\n";
  }
  if (!chains.empty()) {
    out << "chains (every chain exercises every check):\n";
    for (const std::string& name : chains)
      out << "  " << std::left << std::setw(20) << name << " " << chain_catalog_blurb(name)
          << "\n";
  }
  return 0;
}

struct VerifyFlags {
  std::string config_path;
  std::vector<std::string> chains, checks;
  int quad_order = 0, panels = 0;
  long long mc_samples = 0;
  uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  bool tol_set = false;
  std::string format, out_path;
  bool out_set = false;
  bool dump = false;
};

RunConfig merged_config(const VerifyFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path);
  if (!f.chains.empty()) cfg.chains = split_csv_args(f.chains);
  if (!f.checks.empty()) cfg.checks = split_csv_args(f.checks);
  if (f.quad_order > 0) {
    if (f.quad_order < 2) throw Error("--quad-order must be >= 2");
    cfg.integ.order = f.quad_order;
    cfg.fiber_integ.order = f.quad_order;
  }
  if (f.panels > 0) {
    cfg.integ.panels = f.panels;
    cfg.fiber_integ.panels = f.panels;
  }
  if (f.mc_samples > 0) {
    if (f.mc_samples < 2) throw Error("--mc-samples must be >= 2");
    cfg.integ.mc_samples = f.mc_samples;
    cfg.fiber_integ.mc_samples = f.mc_samples;
  }
  if (f.seed_set) {
    cfg.seed = f.seed;
  } else if (!cfg.seed_from_file) {
    if (const char* env = std::getenv("HAARPUSH_SEED")) {
      try {
        size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw Error(std::string("HAARPUSH_SEED is not a non-negative integer: '") + env +
                    "'");
      }
    }
  }
  if (f.tol_set) {
    if (f.tol < 0) throw Error("--tol must be >= 0");
    cfg.tol.rel_tol = f.tol;
  }
  if (!f.format.empty()) cfg.format = f.format;
  if (f.out_set) cfg.out = f.out_path;
  return cfg;
}

int cmd_verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig cfg = merged_config(f);
  if (f.dump) {
    out << dump_config(cfg);
    return 0;
  }
  if (cfg.chains.empty())
    throw Error("no chains selected; pass --chain NAME or set `chains` in [run]");

  RunReport run;
  run.run_id = fresh_run_id();
  run.seed = cfg.seed;
  for (const std::string& name : cfg.chains) {
    Chain chain = chain_from_config(cfg, name);
    auto reports = run_checks(chain, cfg.checks);
    run.reports.insert(run.reports.end(), std::make_move_iterator(reports.begin()),
                       std::make_move_iterator(reports.end()));
  }

  const std::string rendered = render_report(run, cfg.format);
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out);
    if (!file) throw Error("cannot write report to '" + cfg.out + "'");
    file << rendered;
    out << "wrote " << run.reports.size() << " report(s) to " << cfg.out << "\n";
  } else {
    out << rendered;
  }
  int failed = 0;
  for (const auto& r : run.reports) failed += r.pass ? 0 : 1;
  if (failed > 0) {
    err << failed << " of " << run.reports.size() << " check report(s) FAILED\n";
    return 2;
  }
  return 0;
}

int cmd_modular(const std::string& group, const std::string& element, std::ostream& out) {
  ChartPtr G = find_group(group);
  std::vector<std::string> parts = split_csv_args({element});
  if (static_cast<int>(parts.size()) != G->dim)
    throw Error("--element needs " + std::to_string(G->dim) + " coordinates for " + G->name +
                ", got " + std::to_string(parts.size()));
  Coords h(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    try {
      size_t used = 0;
      h[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw Error("--element coordinate '" + parts[i] + "' is not a number");
    }
  }
  if (!G->domain.contains(h.data()))
    throw Error("element is outside the domain of " + G->name +
                " (positivity constraints or chart bounds violated)");

  const Mat dR = translation_jacobian(*G, h, Side::Right, G->identity);
  const Mat dL = translation_jacobian(*G, h, Side::Left, G->identity);
  const double detR = std::abs(det(dR));
  const double detL = std::abs(det(dL));
  out << std::setprecision(15);
  out << "group " << G->name << ", element (" << element << ")\n";
  out << "|det d(R_h)|_e| = " << detR << "\n";
  out << "|det d(L_h)|_e| = " << detL << "\n";
  out << "Delta(h)        = " << modular(*G, h) << "\n";
  return 0;
}

int cmd_weil(const VerifyFlags& f, const std::string& chain_name, std::ostream& out,
             std::ostream& err) {
  RunConfig cfg = merged_config(f);
  Chain chain = chain_from_config(cfg, chain_name);
  out << std::setprecision(15);
  if (!chain.finite && chain.lie) {
    out << "chain " << chain_name << ": Weil normalization scale = "
        << chain.lie->Q.weil_scale << " (probe spread " << chain.lie->Q.weil_scale_spread
        << ")\n";
  } else {
    out << "chain " << chain_name << ": exact backend, iterated coset sums\n";
  }
  const auto reports = run_checks(chain, {"weil"});
  const VerificationReport& r = reports.at(0);
  for (const auto& c : r.cases) {
    out << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.label << ": lhs = " << c.lhs.real()
        << (c.lhs.imag() < 0 ? " - " : " + ") << std::abs(c.lhs.imag())
        << "i, rhs = " << c.rhs.real() << (c.rhs.imag() < 0 ? " - " : " + ")
        << std::abs(c.rhs.imag()) << "i, rel err = " << c.rel_err << "\n";
  }
  out << (r.pass ? "weil check passed" : "weil check FAILED") << " (max rel err " << r.max_rel
      << ", tolerance " << r.rel_tol << ")\n";
  if (!r.pass) {
    err << "weil check failed on " << chain_name << "\n";
    return 2;
  }
  return 0;
}

int cmd_report_convert(const std::string& input, const std::string& format,
                       const std::string& out_path, std::ostream& out) {
  std::ifstream in(input);
  if (!in) throw Error("cannot open report '" + input + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const RunReport run = parse_report_json(ss.str());
  const std::string rendered = render_report(run, format);
  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) throw Error("cannot write to '" + out_path + "'");
    file << rendered;
    out << "wrote " << run.reports.size() << " report(s) to " << out_path << "\n";
  } else {
    out << rendered;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Haar measures, modular functions and pushforwards along quotient maps",
               "haarpush"};
  app.require_subcommand(1);

  auto* cat = app.add_subcommand("catalog", "list built-in groups and chains");
  std::string filter;
  bool cat_json = false;
  cat->add_option("filter", filter, "substring filter on names");
  cat->add_flag("--json", cat_json, "machine-readable listing");

  VerifyFlags vf;
  auto add_shared_flags = [&vf](CLI::App* sub) {
    sub->add_option("--config", vf.config_path, "configuration file");
    sub->add_option("--quad-order", vf.quad_order, "Gauss points per axis (outer and fiber)");
    sub->add_option("--panels", vf.panels, "uniform panels per axis");
    sub->add_option("--mc-samples", vf.mc_samples, "Monte Carlo sample count");
    auto* seed_opt = sub->add_option("--seed", vf.seed, "random seed (env HAARPUSH_SEED)");
    seed_opt->each([&vf](const std::string&) { vf.seed_set = true; });
    auto* tol_opt = sub->add_option("--tol", vf.tol, "relative tolerance override");
    tol_opt->each([&vf](const std::string&) { vf.tol_set = true; });
  };

  auto* ver = app.add_subcommand("verify", "run verification checks on chains");
  add_shared_flags(ver);
  ver->add_option("--chain", vf.chains, "chain to verify (repeatable, or comma-separated)")
      ->type_size(1);
  ver->add_option("--checks", vf.checks, "checks to run (comma-separated)")->type_size(1);
  ver->add_option("--format", vf.format, "report format")
      ->check(CLI::IsMember({"json", "md", "csv"}));
  auto* out_opt = ver->add_option("--out", vf.out_path, "write the report to this file");
  out_opt->each([&vf](const std::string&) { vf.out_set = true; });
  ver->add_flag("--dump-config", vf.dump, "print the merged configuration and exit");

  auto* mod = app.add_subcommand("modular", "evaluate the modular function at an element");
  std::string mod_group, mod_element;
  mod->add_option("--group", mod_group, "group chart name")->required();
  mod->add_option("--element", mod_element, "comma-separated chart coordinates")->required();

  auto* weil = app.add_subcommand("weil", "show and verify Weil quotient normalization");
  add_shared_flags(weil);
  std::string weil_chain;
  weil->add_option("--chain", weil_chain, "chain name")->required();

  auto* conv = app.add_subcommand("report-convert", "re-render a JSON report");
  std::string conv_in, conv_format = "md", conv_out;
  conv->add_option("input", conv_in, "report JSON file")->required();
  conv->add_option("--format", conv_format, "target format")
      ->check(CLI::IsMember({"json", "md", "csv"}));
  conv->add_option("--out", conv_out, "write to this file instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("haarpush");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cat->parsed()) return cmd_catalog(filter, cat_json, out);
    if (ver->parsed()) return cmd_verify(vf, out, err);
    if (mod->parsed()) return cmd_modular(mod_group, mod_element, out);
    if (weil->parsed()) return cmd_weil(vf, weil_chain, out, err);
    if (conv->parsed()) return cmd_report_convert(conv_in, conv_format, conv_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand given\n";
  return 1;
}

}  // namespace haarpush
