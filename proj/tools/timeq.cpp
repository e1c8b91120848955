// timeq: enumerate timed traces and check timed observational equivalence.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "timeq/equivalence.hpp"
#include "timeq/protocol.hpp"
#include "timeq/semantics.hpp"

using namespace timeq;

namespace {

struct Flags {
  std::string solver = "internal";
  unsigned jobs = 1;
  double timeout = 30.0;
  std::string emitTraces;
  bool json = false;
  std::size_t maxSteps = 0;
  bool full = false;
};

std::unique_ptr<TimeSolver> makeSolver(const Flags& f) {
  if (f.solver == "internal") return std::make_unique<InternalSolver>();
  const std::string prefix = "external:";
  if (f.solver.rfind(prefix, 0) == 0 && f.solver.size() > prefix.size())
    return std::make_unique<ExternalSolver>(f.solver.substr(prefix.size()), f.timeout);
  throw CLI::ValidationError("--solver", "expected internal or external:<command>");
}

Configuration load(const std::string& spec) {
  auto [file, scenario] = loadScenario(spec);
  return initialConfiguration(file, scenario);
}

void emit(const std::string& dir, const std::string& tag, const EnumerateResult& r) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < r.leaves.size(); ++i) {
    std::ofstream out(std::filesystem::path(dir) / (tag + "_" + std::to_string(i) + ".json"));
    out << toJson(r.leaves[i]).dump(2) << "\n";
  }
}

EnumerateOptions enumOptions(const Flags& f) {
  EnumerateOptions o;
  if (f.maxSteps) o.maxSteps = f.maxSteps;
  o.reduce = !f.full;
  return o;
}

int runEnumerate(const std::string& spec, const Flags& f) {
  auto solver = makeSolver(f);
  auto t0 = std::chrono::steady_clock::now();
  EnumerateResult r = enumerateTraces(load(spec), *solver, enumOptions(f));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t obs = observablesOf(r).size();
  if (!f.emitTraces.empty()) emit(f.emitTraces, "trace", r);
  if (f.json) {
    nlohmann::json j{{"scenario", spec},     {"observables", obs},      {"traces", r.leaves.size()},
                     {"states", r.states},   {"truncated", r.truncated}, {"seconds", secs}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << spec << ": " << obs << " observables, " << r.states << " states"
              << (r.truncated ? " (truncated)" : "") << "\n";
  }
  return r.truncated ? 2 : 0;
}

int runVerify(const std::string& left, const std::string& right, const Flags& f) {
  auto solver = makeSolver(f);
  Configuration cl = load(left), cr = load(right);
  EquivOptions o;
  o.jobs = f.jobs;
  if (f.maxSteps) o.maxSteps = f.maxSteps;
  o.reduce = !f.full;
  if (!f.emitTraces.empty()) {
    emit(f.emitTraces, "left", enumerateTraces(cl, *solver, enumOptions(f)));
    emit(f.emitTraces, "right", enumerateTraces(cr, *solver, enumOptions(f)));
  }
  Verdict v = configEquiv(cl, cr, *solver, o);
  std::cout << (f.json ? v.toJson().dump() : v.toJson().dump(2)) << "\n";
  return v.equivalent ? 0 : 1;
}

void addFlags(CLI::App* app, Flags& f) {
  app->add_option("--solver", f.solver, "internal or external:<command>, e.g. external:z3 -in");
  app->add_option("--jobs", f.jobs, "worker threads for observable matching")
      ->check(CLI::PositiveNumber);
  app->add_option("--timeout", f.timeout, "seconds per external solver call")
      ->check(CLI::PositiveNumber);
  app->add_option("--emit-traces", f.emitTraces, "directory for one JSON file per maximal trace");
  app->add_flag("--json", f.json, "single-line JSON output");
  app->add_option("--max-steps", f.maxSteps, "bound on expanded configurations");
  app->add_flag("--full-interleaving", f.full, "also interleave independent silent steps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timed observational equivalence of security protocols"};
  app.require_subcommand(1);
  Flags flags;
  std::string left, right, scenario;

  auto* verify = app.add_subcommand("verify", "check two scenarios for timed equivalence");
  verify->add_option("left", left, "file or file:scenario")->required();
  verify->add_option("right", right, "file or file:scenario")->required();
  addFlags(verify, flags);

  auto* enumerate = app.add_subcommand("enumerate", "count observables and states");
  enumerate->add_option("scenario", scenario, "file or file:scenario")->required();
  addFlags(enumerate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (verify->parsed()) return runVerify(left, right, flags);
    return runEnumerate(scenario, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
