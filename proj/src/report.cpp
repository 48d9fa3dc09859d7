#include "haarpush/report.hpp"

#include <json.hpp>

#include <chrono>
#include <random>
#include <sstream>

namespace haarpush {

using nlohmann::json;

bool RunReport::all_pass() const {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return !reports.empty();
}

std::string fresh_run_id() {
  std::random_device rd;
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  uint64_t bits = (static_cast<uint64_t>(rd()) << 32) ^ static_cast<uint64_t>(rd());
  bits ^= static_cast<uint64_t>(now) * 0x9e3779b97f4a7c15ULL;
  std::ostringstream os;
  os << std::hex << bits;
  return os.str();
}

namespace {

json case_to_json(const CheckCase& c) {
  return json{{"label", c.label},
              {"lhs", {c.lhs.real(), c.lhs.imag()}},
              {"rhs", {c.rhs.real(), c.rhs.imag()}},
              {"abs_err", c.abs_err},
              {"rel_err", c.rel_err},
              {"informative", c.informative},
              {"pass", c.pass}};
}

json report_to_json(const VerificationReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) cases.push_back(case_to_json(c));
  return json{{"check", r.check},
              {"chain", r.chain},
              {"digest", r.digest},
              {"pass", r.pass},
              {"rel_tol", r.rel_tol},
              {"abs_floor", r.abs_floor},
              {"max_abs", r.max_abs},
              {"max_rel", r.max_rel},
              {"integrator", r.integrator},
              {"evaluations", r.evaluations},
              {"wall_ms", r.wall_ms},
              {"detail", r.detail},
              {"cases", std::move(cases)}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string report_json(const RunReport& run) {
  json j{{"schema_version", run.schema_version},
         {"run_id", run.run_id},
         {"seed", run.seed},
         {"reports", json::array()}};
  for (const auto& r : run.reports) j["reports"].push_back(report_to_json(r));
  return j.dump(2) + "\n";
}

std::string report_markdown(const RunReport& run) {
  std::ostringstream os;
  os << "# Verification run " << run.run_id << "\n\n";
  os << "seed " << run.seed << ", schema v" << run.schema_version << ", "
     << run.reports.size() << " report(s), "
     << (run.all_pass() ? "all checks passed" : "FAILURES PRESENT") << "\n\n";
  os << "| chain | check | cases | max rel err | rel tol | max abs err | result |\n";
  os << "|---|---|---:|---:|---:|---:|---|\n";
  for (const auto& r : run.reports) {
    os << "| " << r.chain << " | " << r.check << " | " << r.cases.size() << " | "
       << r.max_rel << " | " << r.rel_tol << " | " << r.max_abs << " | "
       << (r.pass ? "pass" : "**FAIL**") << " |\n";
  }
  os << "\n";
  for (const auto& r : run.reports) {
    if (r.pass) continue;
    os << "## FAIL: " << r.chain << " / " << r.check << "\n\n" << r.detail << "\n\n";
    for (const auto& c : r.cases)
      if (!c.pass)
        os << "- " << c.label << ": lhs = " << c.lhs.real() << "+" << c.lhs.imag()
           << "i, rhs = " << c.rhs.real() << "+" << c.rhs.imag()
           << "i, rel err = " << c.rel_err << "\n";
    os << "\n";
  }
  return os.str();
}

std::string report_csv(const RunReport& run) {
  std::ostringstream os;
  os << "chain,check,cases,max_abs,max_rel,rel_tol,abs_floor,evaluations,wall_ms,pass\n";
  for (const auto& r : run.reports) {
    os << csv_escape(r.chain) << "," << csv_escape(r.check) << "," << r.cases.size() << ","
       << r.max_abs << "," << r.max_rel << "," << r.rel_tol << "," << r.abs_floor << ","
       << r.evaluations << "," << r.wall_ms << "," << (r.pass ? "pass" : "fail") << "\n";
  }
  return os.str();
}

std::string render_report(const RunReport& run, const std::string& format) {
  if (format == "json") return report_json(run);
  if (format == "md") return report_markdown(run);
  if (format == "csv") return report_csv(run);
  throw Error("unknown report format '" + format + "'; known: json, md, csv");
}

RunReport parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report JSON: ") + e.what());
  }
  RunReport run;
  try {
    run.schema_version = j.at("schema_version").get<int>();
    if (run.schema_version != 1)
      throw Error("unsupported report schema_version " +
                  std::to_string(run.schema_version));
    run.run_id = j.at("run_id").get<std::string>();
    run.seed = j.at("seed").get<uint64_t>();
    for (const auto& jr : j.at("reports")) {
      VerificationReport r;
      r.check = jr.at("check").get<std::string>();
      r.chain = jr.at("chain").get<std::string>();
      r.digest = jr.at("digest").get<std::string>();
      r.pass = jr.at("pass").get<bool>();
      r.rel_tol = jr.at("rel_tol").get<double>();
      r.abs_floor = jr.at("abs_floor").get<double>();
      r.max_abs = jr.at("max_abs").get<double>();
      r.max_rel = jr.at("max_rel").get<double>();
      r.integrator = jr.at("integrator").get<std::string>();
      r.evaluations = jr.at("evaluations").get<uint64_t>();
      r.wall_ms = jr.at("wall_ms").get<double>();
      r.detail = jr.at("detail").get<std::string>();
      for (const auto& jc : jr.at("cases")) {
        CheckCase c;
        c.label = jc.at("label").get<std::string>();
        c.lhs = Cmplx(jc.at("lhs").at(0).get<double>(), jc.at("lhs").at(1).get<double>());
        c.rhs = Cmplx(jc.at("rhs").at(0).get<double>(), jc.at("rhs").at(1).get<double>());
        c.abs_err = jc.at("abs_err").get<double>();
        c.rel_err = jc.at("rel_err").get<double>();
        c.informative = jc.at("informative").get<bool>();
        c.pass = jc.at("pass").get<bool>();
        r.cases.push_back(std::move(c));
      }
      run.reports.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("report JSON missing a field: ") + e.what());
  }
  return run;
}

}  // namespace haarpush
