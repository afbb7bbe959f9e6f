// mcrank: command-line front end for ranking strategies, synthesis, scale
// inspection and the HTTP session service.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mcrank/io.hpp"
#include "mcrank/service.hpp"

namespace {

using json = nlohmann::json;
using namespace mcrank;

enum Exit { ok = 0, runtime_error = 1, validation_error = 2, suspended = 3 };

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream(out_path) << j.dump(2) << "\n";
  }
}

int validation_failure(const std::string& what, json diagnostics) {
  std::cout << json{{"status", "invalid"}, {"error", what}, {"diagnostics", std::move(diagnostics)}}.dump(2)
            << "\n";
  return validation_error;
}

int run_rank(const std::string& data_path, const std::string& strategy_path, const std::string& out_path) {
  EstimateMatrix data;
  io::StrategyDocument doc;
  try {
    data = io::matrix_from_json(read_json(data_path));
    doc = io::strategy_from_json(read_json(strategy_path));
  } catch (const Error& e) {
    return validation_failure("malformed document", json::array({{{"message", e.what()}}}));
  } catch (const json::exception& e) {
    return validation_failure("malformed document", json::array({{{"message", e.what()}}}));
  }
  if (auto report = validate_matrix(data); !report.empty()) {
    return validation_failure("invalid data", io::report_to_json(report));
  }
  if (auto report = validate_strategy(doc.spec); !report.empty()) {
    return validation_failure("invalid strategy", io::diagnostics_to_json(report));
  }
  auto outcome = execute(doc.spec, data, doc.inputs);
  if (auto* req = std::get_if<ExpertRequest>(&outcome)) {
    emit({{"status", "suspended"}, {"request", io::request_to_json(*req)}}, out_path);
    return suspended;
  }
  const auto& trace = std::get<ExecutionTrace>(outcome);
  emit({{"status", "done"}, {"result", io::result_to_json(trace.result)}, {"trace", io::trace_to_json(trace)}},
       out_path);
  return ok;
}

int run_synthesize(const std::string& path, int variant) {
  json body;
  body = read_json(path);
  try {
    io::morphology_from_json(body);
  } catch (const Error& e) {
    return validation_failure("malformed morphology", json::array({{{"message", e.what()}}}));
  } catch (const json::exception& e) {
    return validation_failure("malformed morphology", json::array({{{"message", e.what()}}}));
  }
  auto r = service::Service::synthesize(body, variant);
  if (r.status != 200) return validation_failure(r.body.value("error", "invalid morphology"), r.body["diagnostics"]);
  std::cout << r.body.dump(2) << "\n";
  return ok;
}

int run_scale(int levels, int eta, const std::string& medians_path) {
  ScaleSpec s{levels, eta};
  json estimates = json::array();
  for (const auto& e : enumerate_scale(s)) estimates.push_back(to_string(e));
  json out{{"scale", to_string(s)},
           {"multiset_number", multiset_number(s)},
           {"interval_estimates", estimates.size()},
           {"estimates", estimates}};
  if (!medians_path.empty()) {
    auto j = read_json(medians_path);
    std::vector<MultisetEstimate> es;
    try {
      for (const auto& x : io::detail::require(j, "estimates")) es.push_back(parse_estimate(x.get<std::string>()));
      if (es.empty()) throw Error("no estimates to aggregate");
      for (const auto& e : es) {
        if (e.scale() != s) throw Error(to_string(e) + " is not on " + to_string(s));
      }
    } catch (const std::exception& e) {
      return validation_failure("malformed estimates", json::array({{{"message", e.what()}}}));
    }
    auto universe = j.value("universe", "interval") == "all" ? MedianUniverse::all_multisets
                                                             : MedianUniverse::interval_only;
    auto gm = generalized_median(es, universe);
    auto sm = set_median(es);
    out["generalized_median"] = {{"estimate", to_string(gm)}, {"cost", total_distance(gm, es)}};
    out["set_median"] = {{"estimate", to_string(sm)}, {"cost", total_distance(sm, es)}};
    out["integrated"] = to_string(integrate(es));
  }
  std::cout << out.dump(2) << "\n";
  return ok;
}

int run_serve(int port, const std::string& snapshots) {
  service::Service svc(snapshots.empty() ? std::nullopt : std::optional<std::filesystem::path>(snapshots));
  httplib::Server server;
  service::mount(server, svc);
  std::cerr << "listening on port " << port << "\n";
  if (!server.listen("0.0.0.0", port)) {
    std::cerr << "cannot listen on port " << port << "\n";
    return runtime_error;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicriteria ranking strategies and morphological synthesis"};
  app.require_subcommand(1);

  std::string data_path, strategy_path, out_path;
  auto* rank = app.add_subcommand("rank", "Execute a ranking strategy over decision data");
  rank->add_option("--data", data_path, "Decision data document")->required();
  rank->add_option("--strategy", strategy_path, "Strategy document")->required();
  rank->add_option("--out", out_path, "Write the result document here instead of stdout");

  std::string morphology_path;
  int variant = 2;
  auto* synth = app.add_subcommand("synthesize", "Pareto-efficient composites of a morphology");
  synth->add_option("--morphology", morphology_path, "Morphology document")->required();
  synth->add_option("--variant", variant, "Problem variant")->check(CLI::Range(1, 3));

  int levels = 3, eta = 4;
  std::string medians_path;
  auto* scale = app.add_subcommand("scale", "Enumerate an interval multiset scale");
  scale->add_option("--l", levels, "Number of ordinal levels")->required()->check(CLI::PositiveNumber);
  scale->add_option("--eta", eta, "Multiset cardinality")->required()->check(CLI::PositiveNumber);
  scale->add_option("--medians", medians_path, "Document {\"estimates\": [...]} to aggregate");

  int port = 8080;
  std::string snapshots;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--snapshots", snapshots, "Directory for per-session snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : validation_error;
  }

  try {
    if (*rank) return run_rank(data_path, strategy_path, out_path);
    if (*synth) return run_synthesize(morphology_path, variant);
    if (*scale) return run_scale(levels, eta, medians_path);
    if (*serve) return run_serve(port, snapshots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime_error;
  }
  return ok;
}
