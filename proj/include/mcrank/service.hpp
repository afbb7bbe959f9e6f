#pragma once

// In-memory session service driving strategy execution and expert
// prompts, plus its HTTP mapping.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mcrank/io.hpp"

namespace mcrank::service {

using json = nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

struct Session {
  std::string id;
  std::uint64_t revision = 0;
  std::optional<EstimateMatrix> data;
  std::optional<io::StrategyDocument> strategy;
  ExpertInputs inputs;
  std::optional<ExpertRequest> pending;
  std::vector<ExecutionTrace> history;
};

/// Session store. Each session serializes its own mutations; distinct
/// sessions proceed concurrently.
class Service {
 public:
  explicit Service(std::optional<std::filesystem::path> snapshot_dir = std::nullopt)
      : snapshot_dir_(std::move(snapshot_dir)) {
    if (snapshot_dir_) {
      std::filesystem::create_directories(*snapshot_dir_);
      load_snapshots();
    }
  }

  Response create() {
    auto entry = std::make_shared<Entry>();
    {
      std::unique_lock lock(map_mutex_);
      do {
        entry->session.id = new_token();
      } while (sessions_.count(entry->session.id));
      sessions_[entry->session.id] = entry;
    }
    std::lock_guard guard(entry->mutex);
    snapshot(entry->session);
    return {201, summary(entry->session)};
  }

  Response get(const std::string& id) {
    return with_session(id, std::nullopt, [&](Session& s) -> Response { return {200, summary(s)}; });
  }

  Response put_data(const std::string& id, const json& body, std::optional<std::uint64_t> expected) {
    return with_session(id, expected, [&](Session& s) -> Response {
      auto m = io::matrix_from_json(body);
      auto report = validate_matrix(m);
      if (!report.empty()) return {400, {{"error", "invalid data"}, {"diagnostics", io::report_to_json(report)}}};
      s.data = std::move(m);
      s.inputs = ExpertInputs{};
      if (s.strategy) merge_inputs(s);
      s.pending.reset();
      bump(s);
      return {200, summary(s)};
    });
  }

  Response put_strategy(const std::string& id, const json& body, std::optional<std::uint64_t> expected) {
    return with_session(id, expected, [&](Session& s) -> Response {
      s.strategy = io::strategy_from_json(body);
      merge_inputs(s);
      s.pending.reset();
      bump(s);
      auto out = summary(s);
      out["diagnostics"] = io::diagnostics_to_json(validate_strategy(s.strategy->spec));
      return {200, out};
    });
  }

  Response next_request(const std::string& id) {
    return with_session(id, std::nullopt, [&](Session& s) -> Response {
      return {200, {{"revision", s.revision},
                    {"request", s.pending ? io::request_to_json(*s.pending) : json(nullptr)}}};
    });
  }

  /// Body {"verdict": "..."} answers a pair prompt, {"layer": k} a layer prompt.
  Response answer(const std::string& id, const json& body, std::optional<std::uint64_t> expected) {
    return with_session(id, expected, [&](Session& s) -> Response {
      if (!s.pending) return {409, {{"error", "no pending request"}}};
      const auto& req = *s.pending;
      if (req.kind == ExpertRequest::Kind::pair) {
        auto verdict = parse_verdict(io::detail::require(body, "verdict").get<std::string>());
        s.inputs.judgments[req.source].set({req.a, req.b, verdict});
      } else {
        int layer = io::detail::require(body, "layer").get<int>();
        if (layer < 1 || layer > req.layers) {
          return {400, {{"error", "layer outside 1.." + std::to_string(req.layers)}}};
        }
        s.inputs.assignments[req.source][req.a] = layer;
      }
      s.pending.reset();
      bump(s);
      return run_locked(s);
    });
  }

  Response run(const std::string& id, std::optional<std::uint64_t> expected) {
    return with_session(id, expected, [&](Session& s) { return run_locked(s); });
  }

  Response artifacts(const std::string& id) {
    return with_session(id, std::nullopt, [&](Session& s) -> Response {
      json history = json::array();
      for (const auto& t : s.history) history.push_back(io::trace_to_json(t));
      json latest = s.history.empty() ? json(nullptr) : io::trace_to_json(s.history.back());
      return {200, {{"revision", s.revision}, {"latest", latest}, {"history", history}}};
    });
  }

  static Response synthesize(const json& body, int variant) {
    auto doc = io::morphology_from_json(body);
    auto issues = validate_morphology(doc.morphology);
    auto more = validate_compatibility(doc.morphology, doc.compatibility);
    issues.insert(issues.end(), more.begin(), more.end());
    if (!issues.empty()) return {400, {{"error", "invalid morphology"}, {"diagnostics", issues}}};
    return {200, io::synthesis_to_json(mcrank::synthesize(doc.morphology, doc.compatibility, variant), doc)};
  }

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
  };

  template <typename F>
  Response with_session(const std::string& id, std::optional<std::uint64_t> expected, F&& f) {
    std::shared_ptr<Entry> entry;
    {
      std::shared_lock lock(map_mutex_);
      auto it = sessions_.find(id);
      if (it == sessions_.end()) return {404, {{"error", "unknown session " + id}}};
      entry = it->second;
    }
    std::lock_guard guard(entry->mutex);
    auto& s = entry->session;
    if (expected && *expected != s.revision) {
      return {409, {{"error", "stale revision"}, {"revision", s.revision}}};
    }
    try {
      auto before = s.revision;
      auto r = f(s);
      if (s.revision != before) snapshot(s);
      return r;
    } catch (const Error& e) {
      return {400, {{"error", e.what()}}};
    } catch (const json::exception& e) {
      return {400, {{"error", e.what()}}};
    }
  }

  Response run_locked(Session& s) {
    if (!s.data) return {409, {{"error", "session has no data"}}};
    if (!s.strategy) return {409, {{"error", "session has no strategy"}}};
    auto report = validate_strategy(s.strategy->spec);
    if (!report.empty()) {
      return {400, {{"error", "invalid strategy"}, {"diagnostics", io::diagnostics_to_json(report)}}};
    }
    auto outcome = execute(s.strategy->spec, *s.data, s.inputs);
    bump(s);
    if (auto* req = std::get_if<ExpertRequest>(&outcome)) {
      s.pending = *req;
      return {200, {{"status", "suspended"}, {"revision", s.revision}, {"request", io::request_to_json(*req)}}};
    }
    s.history.push_back(std::get<ExecutionTrace>(outcome));
    return {200, {{"status", "done"}, {"revision", s.revision}, {"trace", io::trace_to_json(s.history.back())}}};
  }

  // Scripted answers carried by the strategy document seed the session's
  // inputs; the session keeps prompting for anything they leave open.
  static void merge_inputs(Session& s) {
    for (const auto& [src, set] : s.strategy->inputs.judgments) {
      for (const auto& j : set.list()) s.inputs.judgments[src].set(j);
    }
    for (const auto& [src, map] : s.strategy->inputs.assignments) {
      for (const auto& [a, k] : map) s.inputs.assignments[src][a] = k;
    }
    s.inputs.scripted = false;
  }

  static void bump(Session& s) { ++s.revision; }

  static json summary(const Session& s) {
    json j{{"id", s.id},
           {"revision", s.revision},
           {"has_data", s.data.has_value()},
           {"has_strategy", s.strategy.has_value()},
           {"pending", s.pending ? io::request_to_json(*s.pending) : json(nullptr)},
           {"runs", s.history.size()}};
    if (s.data) j["data"] = {{"n", s.data->n()}, {"d", s.data->d()}};
    if (s.strategy) j["strategy"] = io::strategy_to_json(*s.strategy);
    return j;
  }

  std::string new_token() {
    std::lock_guard lock(rng_mutex_);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 16; ++i) out += hex[rng_() % 16];
    return out;
  }

  void snapshot(const Session& s) const {
    if (!snapshot_dir_) return;
    json j{{"id", s.id}, {"revision", s.revision}, {"inputs", io::inputs_to_json(s.inputs)}};
    if (s.data) j["data"] = io::matrix_to_json(*s.data);
    if (s.strategy) j["strategy"] = io::strategy_to_json(*s.strategy);
    std::ofstream(*snapshot_dir_ / (s.id + ".json")) << j.dump(2);
  }

  void load_snapshots() {
    for (const auto& file : std::filesystem::directory_iterator(*snapshot_dir_)) {
      if (file.path().extension() != ".json") continue;
      std::ifstream in(file.path());
      auto j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.contains("id")) continue;
      auto entry = std::make_shared<Entry>();
      auto& s = entry->session;
      s.id = j.at("id").get<std::string>();
      s.revision = j.value("revision", std::uint64_t{0});
      if (j.contains("data")) s.data = io::matrix_from_json(j.at("data"));
      if (j.contains("strategy")) s.strategy = io::strategy_from_json(j.at("strategy"));
      s.inputs = io::inputs_from_json(j.value("inputs", json::object()), false);
      sessions_[s.id] = entry;
    }
  }

  std::optional<std::filesystem::path> snapshot_dir_;
  std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_{std::random_device{}()};
};

namespace detail {

inline std::optional<std::uint64_t> expected_revision(const httplib::Request& req) {
  if (!req.has_header("If-Match")) return std::nullopt;
  auto v = req.get_header_value("If-Match");
  v.erase(std::remove(v.begin(), v.end(), '"'), v.end());
  return std::stoull(v);
}

inline void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(r.body.dump(2), "application/json");
}

template <typename F>
void guarded(const httplib::Request& req, httplib::Response& res, F&& f) {
  try {
    reply(res, f(req));
  } catch (const std::exception& e) {
    reply(res, {400, {{"error", e.what()}}});
  }
}

inline json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

}  // namespace detail

/// Registers the session and synthesis endpoints on `server`.
inline void mount(httplib::Server& server, Service& svc) {
  using detail::guarded;
  using Req = httplib::Request;
  server.Post("/sessions", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req&) { return svc.create(); });
  });
  server.Get(R"(/sessions/([^/]+))", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) { return svc.get(r.matches[1]); });
  });
  server.Put(R"(/sessions/([^/]+)/data)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) {
      return svc.put_data(r.matches[1], detail::body_json(r), detail::expected_revision(r));
    });
  });
  server.Put(R"(/sessions/([^/]+)/strategy)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) {
      return svc.put_strategy(r.matches[1], detail::body_json(r), detail::expected_revision(r));
    });
  });
  server.Get(R"(/sessions/([^/]+)/request)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) { return svc.next_request(r.matches[1]); });
  });
  server.Post(R"(/sessions/([^/]+)/answer)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) {
      return svc.answer(r.matches[1], detail::body_json(r), detail::expected_revision(r));
    });
  });
  server.Post(R"(/sessions/([^/]+)/run)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) { return svc.run(r.matches[1], detail::expected_revision(r)); });
  });
  server.Get(R"(/sessions/([^/]+)/artifacts)", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) { return svc.artifacts(r.matches[1]); });
  });
  server.Post("/synthesize", [&](const Req& req, httplib::Response& res) {
    guarded(req, res, [&](const Req& r) {
      int variant = r.has_param("variant") ? std::stoi(r.get_param_value("variant")) : 2;
      return Service::synthesize(detail::body_json(r), variant);
    });
  });
  server.Options(R"(/.*)", [](const Req&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
    res.status = 204;
  });
}

}  // namespace mcrank::service
