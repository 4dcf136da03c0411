// mhfie: node dumps, quadrature tests, solves, convergence sweeps and method
// comparisons for the MHF collocation solver.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mhfie/mhfie.hpp"

#ifndef MHFIE_BUILD_ID
#define MHFIE_BUILD_ID "unknown"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string config;
  std::string problem;
  std::string method = "mhf";
  double alpha = 1.0;
  std::optional<double> alpha2;
  std::vector<int> n_list;
  int N = 16;
  int NI = -1;
  int ni_offset = 1;
  double newton_tol = 1e-12;
  std::string out;
  std::string integrand;
  int moment = 2;
};

std::vector<int> parse_n_list(const nlohmann::json& v) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<int>());
  } else if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t next = s.find(',', pos);
      const std::string item = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (!item.empty()) out.push_back(std::stoi(item));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  } else if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else {
    throw UsageError("config: n_list must be an array, a comma-separated string or an integer");
  }
  return out;
}

// Fills settings from the JSON config file for every key whose flag was not given.
void apply_config(CLI::App& cmd, Settings& s) {
  if (s.config.empty()) return;
  std::ifstream in(s.config);
  if (!in) throw UsageError("cannot read config file '" + s.config + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + s.config + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");

  auto unset = [&](const char* flag) {
    try {
      return cmd.get_option(flag)->count() == 0;
    } catch (const CLI::OptionNotFound&) {
      return false;  // not an option of this subcommand
    }
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "problem") {
        if (unset("--problem")) s.problem = v.get<std::string>();
      } else if (key == "method") {
        if (unset("--method")) s.method = v.get<std::string>();
      } else if (key == "alpha") {
        if (unset("--alpha")) s.alpha = v.get<double>();
      } else if (key == "alpha2") {
        if (unset("--alpha2")) s.alpha2 = v.get<double>();
      } else if (key == "n_list") {
        if (unset("--n-list")) s.n_list = parse_n_list(v);
      } else if (key == "ni_offset") {
        if (unset("--ni-offset")) s.ni_offset = v.get<int>();
      } else if (key == "newton_tol") {
        if (unset("--newton-tol")) s.newton_tol = v.get<double>();
      } else if (key == "out") {
        if (unset("--out")) s.out = v.get<std::string>();
      } else {
        throw UsageError("config file: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + s.config + "': " + e.what());
  }
}

mhfie::ProblemSpec require_problem(const Settings& s) {
  if (s.problem.empty()) throw UsageError("no problem given");
  auto p = mhfie::make_problem(s.problem);
  if (!p) {
    std::string known;
    for (const auto& n : mhfie::problem_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown problem '" + s.problem + "' (known: " + known + ")");
  }
  return *p;
}

mhfie::SolverConfig solver_config(const Settings& s, const mhfie::ProblemSpec& p) {
  mhfie::SolverConfig c;
  const auto m = mhfie::method_from_string(s.method);
  if (!m) throw UsageError("unknown method '" + s.method + "' (mhf or smoothed)");
  c.method = *m;
  c.alpha = {s.alpha, s.alpha2.value_or(s.alpha)};
  c.newton_tol = s.newton_tol;
  c.N = s.N;
  c.NI = s.NI;
  try {
    c.validate(p.dimension);
  } catch (const mhfie::Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::vector<int> require_n_list(const Settings& s) {
  if (s.n_list.empty()) throw UsageError("empty N list");
  for (int n : s.n_list)
    if (n < 0) throw UsageError("N must be non-negative");
  return s.n_list;
}

void emit(const Settings& s, const std::string& text) {
  if (s.out.empty())
    std::cout << text;
  else
    mhfie::write_file(s.out, text);
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int cmd_nodes(const Settings& s) {
  if (s.N < 0) throw UsageError("N must be non-negative");
  std::string text;
  try {
    text = mhfie::nodes_csv(s.alpha, s.N);
  } catch (const mhfie::DomainError& e) {
    throw UsageError(e.what());
  } catch (const mhfie::ContractError& e) {
    throw UsageError(e.what());
  }
  emit(s, text);
  return kOk;
}

int cmd_quad_test(const Settings& s) {
  const auto& names = mhfie::quad_integrand_names();
  if (std::find(names.begin(), names.end(), s.integrand) == names.end())
    throw UsageError("unknown integrand '" + s.integrand + "'");
  if (!(s.alpha > 0.0)) throw UsageError("alpha must be positive");
  const auto report = mhfie::quad_test(s.integrand, s.alpha, require_n_list(s), s.moment);
  emit(s, mhfie::to_csv(report));
  return kOk;
}

int cmd_solve(const Settings& s, const std::string& dump) {
  const auto problem = require_problem(s);
  const auto config = solver_config(s, problem);
  const auto out = mhfie::run_solve(problem, config);
  std::cout << mhfie::format_summary(out.summary);
  if (!dump.empty()) mhfie::write_file(dump, mhfie::solution_csv(out.solution));
  return kOk;
}

int cmd_converge(const Settings& s) {
  const auto problem = require_problem(s);
  const auto config = solver_config(s, problem);
  std::vector<std::string> failures;
  auto report = mhfie::converge(problem, config, require_n_list(s), s.ni_offset, &failures);
  report.build_id = MHFIE_BUILD_ID;
  report.timestamp = utc_timestamp();
  emit(s, mhfie::to_csv(report));
  if (!s.out.empty()) {
    const nlohmann::json meta{{"problem", report.problem}, {"method", report.method},
                              {"alpha", report.alpha},     {"ni_offset", s.ni_offset},
                              {"newton_tol", s.newton_tol}, {"build_id", report.build_id},
                              {"timestamp", report.timestamp}};
    mhfie::write_file(s.out + ".meta.json", meta.dump(2) + "\n");
  }
  for (const auto& f : failures) std::cerr << "mhfie converge: " << f << '\n';
  return failures.empty() ? kOk : kFailure;
}

int cmd_compare(const Settings& s) {
  const auto problem = require_problem(s);
  const auto config = solver_config(s, problem);
  std::vector<std::string> failures;
  const auto report = mhfie::compare_methods(problem, config, require_n_list(s), s.ni_offset, &failures);
  emit(s, mhfie::to_csv(report));
  for (const auto& f : failures) std::cerr << "mhfie compare: " << f << '\n';
  if (!failures.empty()) return kFailure;
  if (!report.all_pass()) {
    std::cerr << "mhfie compare: discrepancy above " << mhfie::detail::format_g(report.tolerance) << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MHF spectral collocation for weakly singular Fredholm equations"};
  app.require_subcommand(1);
  Settings s;
  std::string dump;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", s.config, "JSON config file; flags override its keys");
    cmd->add_option("--alpha", s.alpha, "scaling parameter (first axis)");
    cmd->add_option("--out", s.out, "output file (default: stdout)");
  };
  auto add_problem = [&](CLI::App* cmd) {
    cmd->add_option("--problem", s.problem, "registry problem name");
    cmd->add_option("--alpha2", s.alpha2, "scaling parameter of the second axis (2D)");
    cmd->add_option("--newton-tol", s.newton_tol, "residual tolerance");
  };

  auto* nodes = app.add_subcommand("nodes", "dump MHF-Gauss nodes and weights as j,z,x,chi");
  add_common(nodes);
  nodes->add_option("-N,--N", s.N, "degree");

  auto* quad = app.add_subcommand("quad-test", "quadrature accuracy against a reference value");
  add_common(quad);
  quad->add_option("--integrand", s.integrand, "sqrt-logweight, log-logweight, moments or zero")->required();
  quad->add_option("--n-list", s.n_list, "degrees")->delimiter(',');
  quad->add_option("--k", s.moment, "moment order");

  auto* solve = app.add_subcommand("solve", "solve one problem and print a summary");
  add_common(solve);
  add_problem(solve);
  solve->add_option("--method", s.method, "mhf or smoothed");
  solve->add_option("-N,--N", s.N, "collocation degree");
  solve->add_option("--NI", s.NI, "quadrature degree (default N+1)");
  solve->add_option("--dump", dump, "write the solution on the evaluation grid as CSV");

  auto* conv = app.add_subcommand("converge", "convergence sweep over N as CSV");
  add_common(conv);
  add_problem(conv);
  conv->add_option("--method", s.method, "mhf or smoothed");
  conv->add_option("--n-list", s.n_list, "degrees")->delimiter(',');
  conv->add_option("--ni-offset", s.ni_offset, "NI - N");

  auto* cmp = app.add_subcommand("compare", "node-value discrepancy between the two methods");
  add_common(cmp);
  add_problem(cmp);
  cmp->add_option("--n-list", s.n_list, "degrees")->delimiter(',');
  cmp->add_option("--ni-offset", s.ni_offset, "NI - N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    apply_config(*cmd, s);
    if (cmd == nodes) return cmd_nodes(s);
    if (cmd == quad) return cmd_quad_test(s);
    if (cmd == solve) return cmd_solve(s, dump);
    if (cmd == conv) return cmd_converge(s);
    return cmd_compare(s);
  } catch (const UsageError& e) {
    std::cerr << "mhfie " << cmd->get_name() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "mhfie " << cmd->get_name() << ": " << e.what() << '\n';
    return kFailure;
  }
}
