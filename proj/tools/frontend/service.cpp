#include "service.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "api.hpp"
#include "httplib.h"

namespace hybridctl::frontend {

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int env_int(const char* name, int fallback) {
  if (const char* v = std::getenv(name)) {
    char* end = nullptr;
    const long x = std::strtol(v, &end, 10);
    if (*v != '\0' && *end == '\0') return static_cast<int>(x);
  }
  return fallback;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status,
            {{"schema_version", kSchemaVersion},
             {"error", {{"code", code}, {"message", message}}}});
}

/// Runs `fn` on the parsed body and maps failures to HTTP statuses.
template <class Fn>
void handle_json(const httplib::Request& req, httplib::Response& res, int ok_status, Fn&& fn) {
  json body;
  try {
    body = req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::exception& e) {
    send_error(res, 400, "malformed_body", e.what());
    return;
  }
  try {
    send_json(res, ok_status, fn(body));
  } catch (const ApiError& e) {
    const int status = is_request_error(e.status()) ? 400
                       : e.status() == HCTL_E_INTERNAL ? 500
                                                       : 422;
    send_json(res, status, error_body(e.status(), e.what()));
  } catch (const json::exception& e) {
    send_error(res, 400, "malformed_body", e.what());
  }
}

struct Job {
  std::string id;
  std::string status = "queued";  // queued -> running -> done | failed
  json request;
  std::int64_t done = 0;
  std::int64_t total = 0;
  std::string submitted_at;
  std::string started_at;
  std::string finished_at;
  json results;  // export document, set once when done
  std::string csv;
  json error;
  std::atomic<bool> cancel{false};
};

}  // namespace

ServiceOptions options_from_env() {
  ServiceOptions o;
  if (const char* b = std::getenv("HYBRIDCTL_BIND")) {
    if (*b != '\0') o.bind = b;
  }
  o.port = env_int("HYBRIDCTL_PORT", o.port);
  o.workers = std::max(1, env_int("HYBRIDCTL_WORKERS", o.workers));
  return o;
}

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::shared_ptr<Job>> queue;
  std::shared_ptr<Job> running;
  bool stopping = false;
  std::mt19937_64 id_gen{std::random_device{}()};
  std::jthread worker;

  explicit Impl(ServiceOptions o) : options(std::move(o)) {
    routes();
    worker = std::jthread([this] { work(); });
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    {
      std::lock_guard lock(mu);
      if (stopping) return;
      stopping = true;
      if (running) running->cancel = true;
      for (auto& j : queue) fail_job(*j, "cancelled", "service shutting down");
      queue.clear();
    }
    cv.notify_all();
    server.stop();
    if (worker.joinable()) worker.join();
  }

  static void fail_job(Job& j, const std::string& code, const std::string& message) {
    j.status = "failed";
    j.finished_at = now_iso8601();
    j.error = {{"code", code}, {"message", message}};
  }

  std::string new_id() {
    static const char* hex = "0123456789abcdef";
    std::string id;
    std::uint64_t x = id_gen();
    for (int i = 0; i < 16; ++i, x >>= 4) id.push_back(hex[x & 15]);
    return id;
  }

  json job_json(const Job& j) const {
    json out = {{"id", j.id},
                {"status", j.status},
                {"progress", j.total > 0 ? static_cast<double>(j.done) / j.total
                             : j.status == "done" ? 1.0
                                                  : 0.0},
                {"done", j.done},
                {"total", j.total},
                {"submitted_at", j.submitted_at},
                {"started_at", j.started_at.empty() ? json(nullptr) : json(j.started_at)},
                {"finished_at", j.finished_at.empty() ? json(nullptr) : json(j.finished_at)},
                {"request", j.request},
                {"error", j.error}};
    out["results"] = j.status == "done" ? j.results["results"] : json(nullptr);
    return out;
  }

  void work() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        job = queue.front();
        queue.pop_front();
        job->status = "running";
        job->started_at = now_iso8601();
        running = job;
      }
      const Progress progress = [&](std::int64_t done, std::int64_t total) {
        std::lock_guard lock(mu);
        job->total = total;
        job->done = std::max(job->done, done);
        return !job->cancel.load();
      };
      json results;
      std::string csv;
      json error;
      try {
        auto handle = run_simulate(job->request, progress);
        results = results_to_json(handle.get());
        csv = export_results(handle.get(), HCTL_FORMAT_CSV);
      } catch (const ApiError& e) {
        error = {{"code", hctl_status_name(e.status())}, {"message", e.what()}};
      } catch (const std::exception& e) {
        error = {{"code", "internal_error"}, {"message", e.what()}};
      }
      std::lock_guard lock(mu);
      if (error.is_null()) {
        job->results = std::move(results);
        job->csv = std::move(csv);
        job->done = job->total;
        job->status = "done";
        job->finished_at = now_iso8601();
      } else {
        fail_job(*job, error["code"].get<std::string>(), error["message"].get<std::string>());
      }
      running.reset();
    }
  }

  void routes() {
    server.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu);
      send_json(res, 200,
                {{"schema_version", kSchemaVersion},
                 {"status", "ok"},
                 {"version", hctl_version()},
                 {"queued_jobs", queue.size()},
                 {"running_job", running ? json(running->id) : json(nullptr)}});
    });
    server.Get("/api/v1/scenarios", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, list_scenarios());
    });
    server.Post("/api/v1/analyze", [this](const httplib::Request& req, httplib::Response& res) {
      handle_json(req, res, 200, [this](json body) {
        if (body.is_object() && body.contains("bootstrap") && body["bootstrap"].is_object() &&
            !body["bootstrap"].contains("workers")) {
          body["bootstrap"]["workers"] = options.workers;
        }
        return run_analyze(body);
      });
    });
    server.Post("/api/v1/adjust-alpha", [](const httplib::Request& req, httplib::Response& res) {
      handle_json(req, res, 200, [](const json& body) { return run_adjust_alpha(body); });
    });
    server.Post("/api/v1/weight-curve", [](const httplib::Request& req, httplib::Response& res) {
      handle_json(req, res, 200, [](const json& body) { return run_weight_curve(body); });
    });
    server.Post("/api/v1/simulate", [this](const httplib::Request& req, httplib::Response& res) {
      handle_json(req, res, 202, [this, &res](json body) {
        if (body.is_object() && !body.contains("workers")) body["workers"] = options.workers;
        validate_simulate(body);
        auto job = std::make_shared<Job>();
        job->request = body;
        job->submitted_at = now_iso8601();
        std::lock_guard lock(mu);
        if (stopping) throw ApiError(HCTL_E_CANCELLED, "service shutting down");
        do {
          job->id = new_id();
        } while (jobs.count(job->id));
        jobs[job->id] = job;
        queue.push_back(job);
        cv.notify_one();
        res.set_header("Location", "/api/v1/jobs/" + job->id);
        return json{{"schema_version", kSchemaVersion},
                    {"job_id", job->id},
                    {"status", job->status},
                    {"location", "/api/v1/jobs/" + job->id}};
      });
    });
    server.Get(R"(/api/v1/jobs/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 std::lock_guard lock(mu);
                 const auto it = jobs.find(req.matches[1]);
                 if (it == jobs.end()) {
                   send_error(res, 404, "not_found", "unknown job id");
                   return;
                 }
                 send_json(res, 200,
                           {{"schema_version", kSchemaVersion}, {"job", job_json(*it->second)}});
               });
    server.Get(R"(/api/v1/jobs/([^/]+)/export)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 std::lock_guard lock(mu);
                 const auto it = jobs.find(req.matches[1]);
                 if (it == jobs.end()) {
                   send_error(res, 404, "not_found", "unknown job id");
                   return;
                 }
                 const Job& j = *it->second;
                 if (j.status != "done") {
                   send_error(res, 409, "not_ready", "job has no results");
                   return;
                 }
                 const std::string format =
                     req.has_param("format") ? req.get_param_value("format") : "csv";
                 if (format == "csv") {
                   send_json(res, 200, {{"schema_version", kSchemaVersion},
                                        {"format", "csv"},
                                        {"content", j.csv}});
                 } else if (format == "json") {
                   send_json(res, 200, {{"schema_version", kSchemaVersion},
                                        {"format", "json"},
                                        {"content", j.results}});
                 } else {
                   send_error(res, 400, "usage_error", "format must be csv or json");
                 }
               });
    server.Delete(R"(/api/v1/jobs/([^/]+))",
                  [this](const httplib::Request& req, httplib::Response& res) {
                    std::lock_guard lock(mu);
                    const auto it = jobs.find(req.matches[1]);
                    if (it == jobs.end()) {
                      send_error(res, 404, "not_found", "unknown job id");
                      return;
                    }
                    Job& j = *it->second;
                    if (j.status == "queued") {
                      std::erase(queue, it->second);
                      fail_job(j, "cancelled", "cancelled before start");
                    } else if (j.status == "running") {
                      j.cancel = true;
                    } else {
                      send_error(res, 409, "finished", "job already finished");
                      return;
                    }
                    send_json(res, 202,
                              {{"schema_version", kSchemaVersion}, {"job", job_json(j)}});
                  });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 404 ? "not_found" : "http_error";
      send_error(res, res.status, code, "no such endpoint or method");
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string message = "unexpected failure";
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            message = e.what();
          } catch (...) {
          }
          send_error(res, 500, "internal_error", message);
        });
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

int Service::bind() {
  if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.bind);
  return impl_->server.bind_to_port(impl_->options.bind, impl_->options.port)
             ? impl_->options.port
             : -1;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->shutdown(); }

int serve_until_signal(const ServiceOptions& options, std::ostream& log) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  Service service(options);
  const int port = service.bind();
  if (port < 0) {
    log << "error: cannot bind " << options.bind << ":" << options.port << "\n";
    return 1;
  }
  log << "hybridctl listening on http://" << options.bind << ":" << port << "\n" << std::flush;

  std::atomic<bool> finished{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    if (!finished) {
      log << "shutting down\n" << std::flush;
      service.stop();
    }
  });
  service.listen();
  finished = true;
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  service.stop();
  return 0;
}

}  // namespace hybridctl::frontend
