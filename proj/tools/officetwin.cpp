#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "officetwin/catalog.hpp"
#include "officetwin/gateway.hpp"
#include "officetwin/metrics.hpp"
#include "officetwin/rule_check.hpp"
#include "officetwin/rule_text.hpp"
#include "officetwin/simulation.hpp"

using namespace officetwin;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

std::shared_ptr<const Catalog> load_catalog(const std::string& flag, const std::string& from_scenario) {
  const std::string& path = !flag.empty() ? flag : from_scenario;
  if (path.empty()) return std::make_shared<const Catalog>(builtin_catalog());
  return std::make_shared<const Catalog>(Catalog::load(path));
}

RuleSet load_rules(const std::string& flag, const std::string& from_scenario) {
  const std::string& path = !flag.empty() ? flag : from_scenario;
  if (path.empty()) throw Error(ErrorCode::bad_request, "no ruleset: pass --rules or set \"rules\" in the scenario");
  return load_ruleset(path);
}

struct RunArgs {
  std::string scenario, rules, catalog, out;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  auto scenario = Scenario::load(a.scenario);
  if (a.seed) scenario.seed = *a.seed;
  auto catalog = load_catalog(a.catalog, scenario.catalog_path);
  auto rules = load_rules(a.rules, scenario.rules_path);

  Simulation sim(scenario, catalog, rules);
  const auto& trace = sim.run();
  if (a.out.empty() || a.out == "-") {
    trace.write_jsonl(std::cout);
  } else {
    trace.save(a.out);
  }
  auto& summary = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
  summary << "scenario " << scenario.name << ": " << sim.ticks() << " ticks, " << sim.firings()
          << " firings, " << trace.changes().size() << " changes, 0 oscillations";
  if (!a.out.empty() && a.out != "-") summary << " -> " << a.out;
  summary << '\n';
  return kOk;
}

int cmd_validate(const std::string& rules_path, const std::string& catalog_path) {
  auto catalog = load_catalog(catalog_path, {});
  auto rules = load_ruleset(rules_path);
  auto diagnostics = validate(rules, *catalog);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& d : diagnostics) {
    ++counts[static_cast<int>(d.severity)];
    std::cout << severity_name(d.severity) << " [" << d.code << "] " << d.message << '\n';
  }
  std::cout << rules.size() << (rules.size() == 1 ? " rule" : " rules") << ", "
            << counts[static_cast<int>(Severity::error)] << " errors, "
            << counts[static_cast<int>(Severity::warning)] << " warnings, "
            << counts[static_cast<int>(Severity::note)] << " notes\n";
  return has_errors(diagnostics) ? kDomainError : kOk;
}

int cmd_report(const std::string& trace_path, const std::string& baseline_path,
               const std::string& profile_path, const std::string& format) {
  auto profile = profile_path.empty() ? default_profile() : PowerProfile::load(profile_path);
  auto automated = accumulate(SimTrace::load(trace_path), profile);
  auto baseline = accumulate(SimTrace::load(baseline_path), profile);
  auto report = sdg_report(automated, baseline);
  if (format == "json") {
    nlohmann::ordered_json j{{"indicators", report.to_json()["indicators"]},
                             {"automated", automated.to_json()},
                             {"baseline", baseline.to_json()}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << report.to_table();
  }
  return kOk;
}

int cmd_baseline(const std::string& scenario_path, const std::string& out) {
  auto transformed = baseline_transform(Scenario::load(scenario_path));
  if (out.empty() || out == "-") {
    std::cout << transformed.to_json().dump(2) << '\n';
  } else {
    transformed.save(out);
  }
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state, scenario, rules, catalog;
  int tick_ms = 1000;
};

int cmd_serve(const ServeArgs& a) {
  if (a.port < 1 || a.port > 65535) throw Error(ErrorCode::io, "invalid port " + std::to_string(a.port));
  if (a.tick_ms < 1) throw Error(ErrorCode::bad_request, "--tick-ms must be positive");

  Scenario scenario;
  if (!a.scenario.empty()) {
    scenario = Scenario::load(a.scenario);
  } else {
    scenario.name = "live";
    scenario.duration = 10.0 * 365 * 86400;
  }
  auto catalog = load_catalog(a.catalog, scenario.catalog_path);
  RuleSet rules;
  if (!a.rules.empty() || !scenario.rules_path.empty()) rules = load_rules(a.rules, scenario.rules_path);

  std::string state = a.state;
  if (state.empty()) {
    const char* env = std::getenv("OFFICETWIN_STATE");
    state = env != nullptr && *env != '\0' ? env : "officetwin-state.json";
  }

  // SIGINT/SIGTERM are handled on a dedicated thread so shutdown is orderly
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  LiveSimulation sim(scenario, catalog, rules, std::chrono::milliseconds(a.tick_ms));
  GatewayOptions options;
  options.state_path = state;
  Gateway gateway(sim, options);
  int port = gateway.bind(a.host, a.port);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    gateway.stop();
  });
  sim.start();
  std::cout << "listening on http://" << a.host << ":" << port << " (state " << state << ")" << std::endl;
  gateway.listen();
  sim.stop();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital twin of an IoT smart office", "officetwin"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its JSONL trace");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file")->required();
  run_cmd->add_option("--rules", run.rules, "Rule file (default: the scenario's)");
  run_cmd->add_option("--catalog", run.catalog, "Device catalog (default: built in)");
  run_cmd->add_option("--out", run.out, "Trace output (default: stdout)");
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");

  std::string validate_rules, validate_catalog;
  auto* validate_cmd = app.add_subcommand("validate", "Check a rule file against the catalog");
  validate_cmd->add_option("--rules", validate_rules, "Rule file")->required();
  validate_cmd->add_option("--catalog", validate_catalog, "Device catalog (default: built in)");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the gateway with a live simulation");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--state", serve.state, "State file (default: $OFFICETWIN_STATE)");
  serve_cmd->add_option("--scenario", serve.scenario, "Scenario to drive live");
  serve_cmd->add_option("--rules", serve.rules, "Rule file");
  serve_cmd->add_option("--catalog", serve.catalog, "Device catalog");
  serve_cmd->add_option("--tick-ms", serve.tick_ms, "Wall-clock milliseconds per tick")->capture_default_str();

  std::string trace_path, baseline_path, profile_path, format = "text";
  auto* report_cmd = app.add_subcommand("report", "SDG indicator report for an automated/baseline trace pair");
  report_cmd->add_option("--trace", trace_path, "Automated run trace")->required();
  report_cmd->add_option("--baseline-trace", baseline_path, "Baseline run trace")->required();
  report_cmd->add_option("--profile", profile_path, "Power profile (default: built in)");
  report_cmd->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::string baseline_scenario, baseline_out;
  auto* baseline_cmd = app.add_subcommand("baseline", "Emit the always-on counterfactual of a scenario");
  baseline_cmd->add_option("--scenario", baseline_scenario, "Scenario file")->required();
  baseline_cmd->add_option("--out", baseline_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*validate_cmd) return cmd_validate(validate_rules, validate_catalog);
    if (*serve_cmd) return cmd_serve(serve);
    if (*report_cmd) return cmd_report(trace_path, baseline_path, profile_path, format);
    if (*baseline_cmd) return cmd_baseline(baseline_scenario, baseline_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}
