#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ebb/finding.hpp"
#include "ebb/store.hpp"

namespace httplib {
class Server;
}

namespace ebb::service {

struct Annotation {
    std::uint64_t id = 0;
    std::uint32_t t0 = 0;
    std::uint32_t t1 = 0;
    std::string author;
    std::string text;
    std::string created_utc;
};

nlohmann::ordered_json annotation_to_json(const Annotation& a);

/// JSON-lines sidecar. Appends are serialized through one mutex; ids continue
/// from the highest id already on disk.
class AnnotationStore {
public:
    explicit AnnotationStore(std::filesystem::path path);

    std::vector<Annotation> list() const;
    Annotation append(std::uint32_t t0, std::uint32_t t1, std::string author, std::string text);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::vector<Annotation> items_;
    std::uint64_t next_id_ = 1;
};

std::string utc_now_iso8601();

/// Read-only HTTP/JSON view over one log and its findings, plus the
/// annotation sidecar. Never writes to the log file.
class Server {
public:
    Server(EbbLog log, std::vector<Finding> findings, std::filesystem::path annotations_path,
           std::string cors_origin = "*");
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Blocks until stop(). Returns false if the address cannot be bound.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (or -1); then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    void routes();

    EbbLog log_;
    std::vector<Finding> findings_;
    AnnotationStore annotations_;
    std::string cors_origin_;
    std::unique_ptr<httplib::Server> http_;
};

/// Parses "host:port"; throws ArgumentError.
std::pair<std::string, int> parse_bind(const std::string& bind);

}  // namespace ebb::service
