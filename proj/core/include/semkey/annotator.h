#ifndef SEMKEY_ANNOTATOR_H_
#define SEMKEY_ANNOTATOR_H_

// Client for an LTP-compatible annotation service (semantic dependency
// parsing and keyword extraction) with an on-disk response cache.
//
// Modes:
//   live    every request goes to the service; the cache is not touched.
//   record  every request goes to the service; successful responses are
//           written to the cache (existing entries are left alone).
//   replay  responses come from the cache only; a miss is an error and no
//           network I/O ever happens.
//
// Requests are POSTed as {"text": str, "task": "sdp" | "keywords"}.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semkey/errors.h"
#include "semkey/ingest.h"
#include "semkey/model.h"

namespace semkey {

class NetworkError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& body_excerpt)
      : Error("HTTP " + std::to_string(status) + ": " + body_excerpt), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class CacheMissError : public Error {
 public:
  explicit CacheMissError(const std::string& key)
      : Error("no cached annotation for sentence " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// The service answered with something the adapter cannot use.
class AdapterError : public Error {
 public:
  AdapterError(const std::string& field, const std::string& what)
      : Error("annotation response: " + (field.empty() ? what : field + ": " + what)),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class AnnotationMode { kLive, kRecord, kReplay };
enum class AnnotationTask { kSdp, kKeywords };

AnnotationMode parse_annotation_mode(std::string_view name);  // throws UsageError
std::string_view to_string(AnnotationMode mode);
std::string_view to_string(AnnotationTask task);

struct AnnotatorConfig {
  std::string endpoint;
  std::string auth_token;
  std::chrono::milliseconds timeout{10'000};
  int max_retries = 3;
  AnnotationMode mode = AnnotationMode::kReplay;
  unsigned max_in_flight = 4;
  std::chrono::milliseconds backoff_base{500};
  double backoff_factor = 2.0;
};

struct HttpRequest {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{10'000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Sends one request. Throws TimeoutError on timeouts and NetworkError on
// other transport failures; any HTTP status is returned, not thrown.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport for http:// and https:// endpoints.
std::shared_ptr<Transport> make_http_transport();

// Unicode NFC plus trimming of surrounding white space.
std::string normalize_text(std::string_view text);

// Directory of immutable cache entries, one file per (task, sentence).
// Files are named by the hex SHA-256 of "<task>\n<normalized text>" and hold
// a one-line JSON metadata header followed by the raw response bytes.
class AnnotationCache {
 public:
  struct Entry {
    std::string kind;
    std::string timestamp;
    std::string endpoint;
    std::string text;
    std::string payload;
  };

  explicit AnnotationCache(std::filesystem::path directory);

  static std::string key(AnnotationTask task, std::string_view text);

  std::filesystem::path path_for(const std::string& key) const;

  // Throws IoError if an entry exists but is unreadable or truncated.
  std::optional<Entry> load(AnnotationTask task, std::string_view text) const;

  // Writes through a temporary file and a rename, so readers never see a
  // partial entry. Returns false, leaving the file alone, if the entry exists.
  bool store(AnnotationTask task, std::string_view text, std::string_view payload,
             std::string_view endpoint);

  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
};

// Turns a provider response into the canonical graph / keyword JSON.
class ResponseAdapter {
 public:
  virtual ~ResponseAdapter() = default;
  virtual std::string sdp_to_graph_json(std::string_view raw, const std::string& text) const = 0;
  virtual std::string keywords_to_json(std::string_view raw) const = 0;
};

// Accepts the canonical documents unchanged, and LTP cloud envelopes:
//   {"code": "0", "data": {"word": [...], "pos": [...],
//                          "sdp": [{"id": i, "parent": p, "relate": r}]}}
// with 0-based ids and parent -1 for the root, and
//   {"code": "0", "data": {"ke": [{"word": w, "score": s}]}}.
class LtpResponseAdapter final : public ResponseAdapter {
 public:
  std::string sdp_to_graph_json(std::string_view raw, const std::string& text) const override;
  std::string keywords_to_json(std::string_view raw) const override;
};

class Annotator final : public AnnotationSource {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  // `cache` is required for record and replay; `transport` for live and
  // record. Throws UsageError when a required piece is missing.
  Annotator(AnnotatorConfig config, std::shared_ptr<AnnotationCache> cache,
            std::shared_ptr<Transport> transport,
            std::shared_ptr<const ResponseAdapter> adapter = nullptr,
            Sleeper sleeper = nullptr);

  SemGraph annotate_sdp(const std::string& text) override;
  KeywordSet annotate_keywords(const std::string& text) override;

  const AnnotatorConfig& config() const { return config_; }

 private:
  template <typename T, typename Adapt>
  T annotate(AnnotationTask task, const std::string& text, Adapt adapt);

  std::string request(AnnotationTask task, const std::string& text);

  AnnotatorConfig config_;
  std::shared_ptr<AnnotationCache> cache_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<const ResponseAdapter> adapter_;
  Sleeper sleeper_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace semkey

#endif  // SEMKEY_ANNOTATOR_H_
