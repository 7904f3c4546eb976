#include "ebb/service.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

#include "httplib.h"

namespace ebb::service {
namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

std::optional<std::uint32_t> parse_u32(const std::string& s) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Annotation annotation_from_json(const nlohmann::json& j) {
    Annotation a;
    a.id = j.at("id").get<std::uint64_t>();
    a.t0 = j.at("t0").get<std::uint32_t>();
    a.t1 = j.at("t1").get<std::uint32_t>();
    a.author = j.value("author", "");
    a.text = j.value("text", "");
    a.created_utc = j.value("created_utc", "");
    return a;
}

}  // namespace

nlohmann::ordered_json annotation_to_json(const Annotation& a) {
    return {{"id", a.id},         {"t0", a.t0},     {"t1", a.t1},
            {"author", a.author}, {"text", a.text}, {"created_utc", a.created_utc}};
}

std::string utc_now_iso8601() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

AnnotationStore::AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // A torn final line from a crash mid-append is skipped.
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        try {
            auto a = annotation_from_json(j);
            next_id_ = std::max(next_id_, a.id + 1);
            items_.push_back(std::move(a));
        } catch (const nlohmann::json::exception&) {
        }
    }
}

std::vector<Annotation> AnnotationStore::list() const {
    std::lock_guard lock(mu_);
    return items_;
}

Annotation AnnotationStore::append(std::uint32_t t0, std::uint32_t t1, std::string author,
                                   std::string text) {
    std::lock_guard lock(mu_);
    Annotation a{next_id_, t0, t1, std::move(author), std::move(text), utc_now_iso8601()};
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot append to " + path_.string());
    out << annotation_to_json(a).dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("append to " + path_.string() + " failed");
    ++next_id_;
    items_.push_back(a);
    return a;
}

Server::Server(EbbLog log, std::vector<Finding> findings, std::filesystem::path annotations_path,
               std::string cors_origin)
    : log_(std::move(log)),
      findings_(std::move(findings)),
      annotations_(std::move(annotations_path)),
      cors_origin_(std::move(cors_origin)),
      http_(std::make_unique<httplib::Server>()) {
    const std::uint32_t end = log_.empty() ? 0 : log_.records.back().t + 1;
    for (const auto& f : findings_) {
        if (f.t0 >= f.t1 || f.t1 > end || (!log_.empty() && f.t0 < log_.records.front().t)) {
            throw ArgumentError("report finding lies outside the served log");
        }
    }
    routes();
}

Server::~Server() = default;

void Server::routes() {
    auto& http = *http_;
    const std::uint32_t begin = log_.empty() ? 0 : log_.records.front().t;
    const std::uint32_t end = log_.empty() ? 0 : log_.records.back().t + 1;

    http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", cors_origin_);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
    });
    http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            send_error(res, res.status, res.status == 404 ? "no such endpoint: " + req.path
                                                          : "request failed");
        }
    });

    http.Get("/api/meta", [this, begin, end](const httplib::Request&, httplib::Response& res) {
        auto doc = store::export_json(EbbLog{log_.meta, {}}, {});
        nlohmann::ordered_json body;
        body["meta"] = doc["meta"];
        body["channels"] = doc["channels"];
        body["record_count"] = log_.size();
        body["t0"] = begin;
        body["t1"] = end;
        send_json(res, 200, body);
    });

    http.Get("/api/log", [this, begin, end](const httplib::Request& req, httplib::Response& res) {
        std::uint32_t from = begin;
        std::uint32_t to = end;
        if (req.has_param("from")) {
            auto v = parse_u32(req.get_param_value("from"));
            if (!v) return send_error(res, 400, "'from' must be a non-negative integer");
            from = *v;
        }
        if (req.has_param("to")) {
            auto v = parse_u32(req.get_param_value("to"));
            if (!v) return send_error(res, 400, "'to' must be a non-negative integer");
            to = *v;
        }
        if (from > to) return send_error(res, 400, "'from' must not exceed 'to'");
        const auto slice = store::read_range(log_, from, to);
        EbbLog part{log_.meta, {slice.begin(), slice.end()}};
        auto doc = store::export_json(part, {});
        doc.erase("findings");
        doc["from"] = from;
        doc["to"] = to;
        send_json(res, 200, doc);
    });

    http.Get("/api/findings", [this](const httplib::Request&, httplib::Response& res) {
        auto out = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < findings_.size(); ++i) {
            out.push_back(store::finding_to_json(findings_[i], i));
        }
        send_json(res, 200, {{"findings", std::move(out)}});
    });

    http.Get("/api/annotations", [this](const httplib::Request&, httplib::Response& res) {
        auto out = nlohmann::ordered_json::array();
        for (const auto& a : annotations_.list()) out.push_back(annotation_to_json(a));
        send_json(res, 200, {{"annotations", std::move(out)}});
    });

    http.Post("/api/annotations",
              [this, begin, end](const httplib::Request& req, httplib::Response& res) {
                  auto body = nlohmann::json::parse(req.body, nullptr, false);
                  if (body.is_discarded() || !body.is_object()) {
                      return send_error(res, 400, "body must be a JSON object");
                  }
                  std::uint32_t t0 = 0, t1 = 0;
                  std::string author, text;
                  try {
                      t0 = body.at("t0").get<std::uint32_t>();
                      t1 = body.at("t1").get<std::uint32_t>();
                      text = body.at("text").get<std::string>();
                      author = body.value("author", "");
                  } catch (const nlohmann::json::exception&) {
                      return send_error(res, 400,
                                        "annotation needs integer t0, t1 and a string text");
                  }
                  if (t1 <= t0) return send_error(res, 422, "annotation needs t0 < t1");
                  if (t0 < begin || t1 > end) {
                      return send_error(res, 422, "annotation interval lies outside the log");
                  }
                  send_json(res, 201,
                            annotation_to_json(
                                annotations_.append(t0, t1, std::move(author), std::move(text))));
              });
}

bool Server::listen(const std::string& host, int port) { return http_->listen(host, port); }

int Server::bind_to_any_port(const std::string& host) { return http_->bind_to_any_port(host); }

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

void Server::wait_until_ready() const { http_->wait_until_ready(); }

std::pair<std::string, int> parse_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos || colon == 0) {
        throw ArgumentError("bind address must look like host:port");
    }
    int port = 0;
    const auto digits = bind.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || port < 0 ||
        port > 65535) {
        throw ArgumentError("invalid port in bind address: " + bind);
    }
    return {bind.substr(0, colon), port};
}

}  // namespace ebb::service
