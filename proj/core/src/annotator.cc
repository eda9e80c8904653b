#include "semkey/annotator.h"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

namespace semkey {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kCacheFormat = "semkey-cache/1";
constexpr std::size_t kExcerptBytes = 200;

std::string excerpt(std::string_view body) {
  if (body.size() <= kExcerptBytes) return std::string(body);
  return std::string(body.substr(0, kExcerptBytes)) + "...";
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json parse_response(std::string_view raw) {
  try {
    return json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    throw AdapterError("", std::string("body is not valid JSON: ") + e.what());
  }
}

// Checks the LTP envelope and returns its "data" object.
const json& ltp_data(const json& doc) {
  if (auto code = doc.find("code"); code != doc.end()) {
    const std::string value = code->is_string() ? code->get<std::string>() : code->dump();
    if (value != "0") {
      std::string desc = doc.value("desc", std::string("no description"));
      throw AdapterError("code", "service returned code " + value + ": " + desc);
    }
  }
  auto data = doc.find("data");
  if (data == doc.end() || !data->is_object()) {
    throw AdapterError("data", "missing or not an object");
  }
  return *data;
}

long as_integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      long n = std::stol(s, &used);
      if (used == s.size()) return n;
    } catch (const std::exception&) {
    }
  }
  throw AdapterError(field, "expected an integer");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    // Split "scheme://host[:port]/path".
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) {
      throw NetworkError("endpoint '" + request.url + "' has no scheme");
    }
    const auto path_start = request.url.find('/', scheme_end + 3);
    const std::string origin = request.url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : request.url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto result = client.Post(path, headers, request.body, "application/json");
    if (!result) {
      const auto err = result.error();
      const std::string what = "POST " + request.url + ": " + httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw TimeoutError(what);
      }
      throw NetworkError(what);
    }
    return {result->status, result->body};
  }
};

}  // namespace

AnnotationMode parse_annotation_mode(std::string_view name) {
  if (name == "live") return AnnotationMode::kLive;
  if (name == "record") return AnnotationMode::kRecord;
  if (name == "replay") return AnnotationMode::kReplay;
  throw UsageError("unknown mode '" + std::string(name) +
                   "' (expected live, record or replay)");
}

std::string_view to_string(AnnotationMode mode) {
  switch (mode) {
    case AnnotationMode::kLive: return "live";
    case AnnotationMode::kRecord: return "record";
    case AnnotationMode::kReplay: return "replay";
  }
  return "replay";
}

std::string_view to_string(AnnotationTask task) {
  return task == AnnotationTask::kSdp ? "sdp" : "keywords";
}

std::shared_ptr<Transport> make_http_transport() {
  return std::make_shared<HttplibTransport>();
}

std::string normalize_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(std::string("ICU NFC unavailable: ") + u_errorName(status));
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(input, status);
  if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
  normalized.trim();
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

AnnotationCache::AnnotationCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

std::string AnnotationCache::key(AnnotationTask task, std::string_view text) {
  std::string material(to_string(task));
  material += '\n';
  material += normalize_text(text);
  return sha256_hex(material);
}

std::filesystem::path AnnotationCache::path_for(const std::string& key) const {
  return directory_ / key;
}

std::optional<AnnotationCache::Entry> AnnotationCache::load(AnnotationTask task,
                                                            std::string_view text) const {
  const std::filesystem::path path = path_for(key(task, text));
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  const std::string bytes = read_file(path);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw IoError("cache entry '" + path.string() + "' has no header");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::parse_error&) {
    throw IoError("cache entry '" + path.string() + "' has a corrupt header");
  }
  Entry entry;
  entry.payload = bytes.substr(nl + 1);
  if (header.value("format", std::string()) != kCacheFormat ||
      header.value("bytes", std::size_t{0}) != entry.payload.size()) {
    throw IoError("cache entry '" + path.string() + "' is truncated or of an unknown format");
  }
  entry.kind = header.value("kind", std::string());
  entry.timestamp = header.value("timestamp", std::string());
  entry.endpoint = header.value("endpoint", std::string());
  entry.text = header.value("text", std::string());
  return entry;
}

bool AnnotationCache::store(AnnotationTask task, std::string_view text,
                            std::string_view payload, std::string_view endpoint) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::create_directories(directory_);
  const std::string k = key(task, text);
  const std::filesystem::path final_path = path_for(k);
  if (std::filesystem::exists(final_path)) return false;

  ordered_json header;
  header["format"] = kCacheFormat;
  header["kind"] = to_string(task);
  header["timestamp"] = utc_timestamp();
  header["endpoint"] = endpoint;
  header["text"] = normalize_text(text);
  header["bytes"] = payload.size();

  std::ostringstream tmp_name;
  tmp_name << '.' << k << ".tmp." << ::getpid() << '.' << counter++;
  const std::filesystem::path tmp = directory_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << header.dump() << '\n';
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("cannot write cache entry '" + tmp.string() + "'");
    }
  }
  if (std::filesystem::exists(final_path)) {
    std::filesystem::remove(tmp);
    return false;
  }
  std::filesystem::rename(tmp, final_path);
  return true;
}

std::string LtpResponseAdapter::sdp_to_graph_json(std::string_view raw,
                                                  const std::string& text) const {
  const json doc = parse_response(raw);
  if (!doc.is_object()) throw AdapterError("", "expected a JSON object");
  if (doc.contains("tokens")) {
    if (doc.contains("sentence")) return std::string(raw);
    json with_text = doc;
    with_text["sentence"] = text;
    return with_text.dump();
  }

  const json& data = ltp_data(doc);
  auto words = data.find("word");
  auto sdp = data.find("sdp");
  if (words == data.end() || !words->is_array()) {
    throw AdapterError("data.word", "missing or not an array");
  }
  if (sdp == data.end() || !sdp->is_array()) {
    throw AdapterError("data.sdp", "missing or not an array");
  }
  const json* pos = nullptr;
  if (auto p = data.find("pos"); p != data.end()) {
    if (!p->is_array() || p->size() != words->size()) {
      throw AdapterError("data.pos", "must be an array as long as data.word");
    }
    pos = &*p;
  }

  ordered_json out;
  out["sentence"] = text;
  out["tokens"] = ordered_json::array();
  for (std::size_t i = 0; i < words->size(); ++i) {
    const json& w = (*words)[i];
    if (!w.is_string()) {
      throw AdapterError("data.word[" + std::to_string(i) + "]", "expected a string");
    }
    std::string tag;
    if (pos != nullptr && (*pos)[i].is_string()) tag = (*pos)[i].get<std::string>();
    out["tokens"].push_back({{"index", i + 1}, {"surface", w}, {"pos", tag}});
  }
  const long n = static_cast<long>(words->size());
  out["edges"] = ordered_json::array();
  for (std::size_t i = 0; i < sdp->size(); ++i) {
    const std::string at = "data.sdp[" + std::to_string(i) + "]";
    const json& e = (*sdp)[i];
    if (!e.is_object()) throw AdapterError(at, "expected an object");
    if (!e.contains("id")) throw AdapterError(at + ".id", "missing");
    if (!e.contains("parent")) throw AdapterError(at + ".parent", "missing");
    if (!e.contains("relate") || !e["relate"].is_string()) {
      throw AdapterError(at + ".relate", "missing or not a string");
    }
    const long id = as_integer(e["id"], at + ".id");
    const long parent = as_integer(e["parent"], at + ".parent");
    if (id < 0 || id >= n) throw AdapterError(at + ".id", "no word " + std::to_string(id));
    if (parent < -1 || parent >= n) {
      throw AdapterError(at + ".parent", "no word " + std::to_string(parent));
    }
    out["edges"].push_back({{"head", parent + 1}, {"dep", id + 1}, {"rel", e["relate"]}});
  }
  return out.dump();
}

std::string LtpResponseAdapter::keywords_to_json(std::string_view raw) const {
  const json doc = parse_response(raw);
  if (!doc.is_object()) throw AdapterError("", "expected a JSON object");
  if (doc.contains("keywords")) return std::string(raw);
  const json& data = ltp_data(doc);
  auto ke = data.find("ke");
  if (ke == data.end() || !ke->is_array()) {
    throw AdapterError("data.ke", "missing or not an array");
  }
  return json{{"keywords", *ke}}.dump();
}

Annotator::Annotator(AnnotatorConfig config, std::shared_ptr<AnnotationCache> cache,
                     std::shared_ptr<Transport> transport,
                     std::shared_ptr<const ResponseAdapter> adapter, Sleeper sleeper)
    : config_(std::move(config)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      adapter_(adapter ? std::move(adapter) : std::make_shared<LtpResponseAdapter>()),
      sleeper_(sleeper ? std::move(sleeper)
                       : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  if (config_.mode != AnnotationMode::kLive && !cache_) {
    throw UsageError(std::string(to_string(config_.mode)) + " mode needs a cache directory");
  }
  if (config_.mode != AnnotationMode::kReplay) {
    if (config_.endpoint.empty()) {
      throw UsageError(std::string(to_string(config_.mode)) + " mode needs an endpoint");
    }
    if (!transport_) throw UsageError("no transport configured");
  }
  if (config_.max_in_flight < 1 || config_.max_in_flight > 1024) {
    throw UsageError("max in-flight requests must be between 1 and 1024");
  }
  in_flight_ = std::make_unique<std::counting_semaphore<1024>>(
      static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

std::string Annotator::request(AnnotationTask task, const std::string& text) {
  HttpRequest req;
  req.url = config_.endpoint;
  req.body = json{{"text", text}, {"task", to_string(task)}}.dump();
  req.timeout = config_.timeout;
  req.headers.emplace_back("Accept", "application/json");
  if (!config_.auth_token.empty()) {
    req.headers.emplace_back("Authorization", "Bearer " + config_.auth_token);
  }

  for (int attempt = 0;; ++attempt) {
    const bool can_retry = attempt < config_.max_retries;
    try {
      in_flight_->acquire();
      HttpResponse resp;
      try {
        resp = transport_->post(req);
      } catch (...) {
        in_flight_->release();
        throw;
      }
      in_flight_->release();
      if (resp.status >= 200 && resp.status < 300) return std::move(resp.body);
      const bool transient = resp.status >= 500 || resp.status == 429;
      if (!transient || !can_retry) throw HttpStatusError(resp.status, excerpt(resp.body));
    } catch (const TimeoutError&) {
      if (!can_retry) throw;
    }
    const double scale = std::pow(config_.backoff_factor, attempt);
    sleeper_(std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(config_.backoff_base.count()) * scale)));
  }
}

template <typename T, typename Adapt>
T Annotator::annotate(AnnotationTask task, const std::string& text, Adapt adapt) {
  const std::string normalized = normalize_text(text);
  if (normalized.empty()) throw UsageError("cannot annotate an empty sentence");

  if (config_.mode == AnnotationMode::kReplay) {
    auto entry = cache_->load(task, normalized);
    if (!entry) throw CacheMissError(AnnotationCache::key(task, normalized));
    return adapt(entry->payload, normalized);
  }
  const std::string raw = request(task, normalized);
  T value = adapt(raw, normalized);  // throws before anything is cached
  if (config_.mode == AnnotationMode::kRecord) {
    cache_->store(task, normalized, raw, config_.endpoint);
  }
  return value;
}

SemGraph Annotator::annotate_sdp(const std::string& text) {
  return annotate<SemGraph>(AnnotationTask::kSdp, text,
                            [this](std::string_view raw, const std::string& t) {
                              const std::string doc = adapter_->sdp_to_graph_json(raw, t);
                              try {
                                return parse_sdp_json(doc);
                              } catch (const SchemaError& e) {
                                throw AdapterError(e.field(), e.what());
                              } catch (const ParseError& e) {
                                throw AdapterError("", e.what());
                              }
                            });
}

KeywordSet Annotator::annotate_keywords(const std::string& text) {
  return annotate<KeywordSet>(AnnotationTask::kKeywords, text,
                              [this](std::string_view raw, const std::string&) {
                                const std::string doc = adapter_->keywords_to_json(raw);
                                try {
                                  return parse_keywords(doc);
                                } catch (const SchemaError& e) {
                                  throw AdapterError(e.field(), e.what());
                                } catch (const ParseError& e) {
                                  throw AdapterError("", e.what());
                                }
                              });
}

}  // namespace semkey
