#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/provider.hpp"
#include "qaaug/random.hpp"

namespace qaaug {

using json = nlohmann::json;

namespace {

class HttpTransport : public Transport {
 public:
  explicit HttpTransport(const ProviderConfig& config) : config_(config) {
    const std::string& url = config.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
      throw ConfigError("provider endpoint must be an http:// URL or 'stub', got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    host_ = url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  std::string post(const std::string& path, const std::string& body) override {
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (config_.bearer_token) headers.emplace("Authorization", "Bearer " + *config_.bearer_token);
    auto res = client.Post(prefix_ + path, headers, body, "application/json");
    if (!res) throw TransportError("POST " + host_ + prefix_ + path + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw TransportError("POST " + host_ + prefix_ + path + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
  }

 private:
  ProviderConfig config_;
  std::string host_;
  std::string prefix_;
};

json parse_response(const std::string& service, const std::string& body) {
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw ProviderError(service + ": response is not a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ProviderError(service + ": malformed response: " + e.what());
  }
}

}  // namespace

std::unique_ptr<Transport> make_http_transport(const ProviderConfig& config) {
  return std::make_unique<HttpTransport>(config);
}

RemoteProvider::RemoteProvider(ProviderConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) throw ArgumentError("remote provider needs a transport");
  if (config_.max_concurrent < 1) throw ConfigError("max_concurrent must be positive");
  if (config_.max_retries < 0) throw ConfigError("max_retries must be non-negative");
}

std::optional<std::filesystem::path> RemoteProvider::cache_path(const std::string& service,
                                                                const std::string& key) const {
  if (!config_.cache_dir) return std::nullopt;
  return *config_.cache_dir / service / (key + ".json");
}

std::string RemoteProvider::fetch(const std::string& service, const std::string& body) {
  const int attempts = 1 + config_.max_retries;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1LL << std::min(attempt - 1, 20)));
    {
      std::unique_lock lock(slot_mutex_);
      slot_cv_.wait(lock, [&] { return active_ < config_.max_concurrent; });
      ++active_;
    }
    ++remote_calls_;
    try {
      std::string response = transport_->post("/" + service, body);
      {
        std::lock_guard lock(slot_mutex_);
        --active_;
      }
      slot_cv_.notify_one();
      return response;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
    {
      std::lock_guard lock(slot_mutex_);
      --active_;
    }
    slot_cv_.notify_one();
  }
  throw ProviderError(service + " failed after " + std::to_string(attempts) + " attempt(s): " + last_error);
}

std::string RemoteProvider::call(const std::string& service, const std::string& body) {
  const std::string key = sha256_hex(service + '\n' + body);
  std::promise<std::string> promise;
  std::shared_future<std::string> pending;
  {
    std::lock_guard lock(mutex_);
    if (auto hit = memory_cache_.find(key); hit != memory_cache_.end()) {
      ++cache_hits_;
      return hit->second;
    }
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      pending = it->second;
    } else {
      in_flight_.emplace(key, promise.get_future().share());
    }
  }
  if (pending.valid()) {
    // Another thread is fetching the same request.
    ++cache_hits_;
    return pending.get();
  }

  std::string result;
  try {
    const auto path = cache_path(service, key);
    if (path && std::filesystem::exists(*path)) {
      std::ifstream in(*path, std::ios::binary);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      result = buffer.str();
      ++cache_hits_;
    } else {
      result = fetch(service, body);
      if (path) {
        std::filesystem::create_directories(path->parent_path());
        auto tmp = *path;
        tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
          std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
          out << result;
        }
        std::filesystem::rename(tmp, *path);
      }
    }
  } catch (...) {
    std::lock_guard lock(mutex_);
    promise.set_exception(std::current_exception());
    in_flight_.erase(key);
    throw;
  }
  std::lock_guard lock(mutex_);
  memory_cache_.emplace(key, result);
  promise.set_value(result);
  in_flight_.erase(key);
  return result;
}

std::string RemoteProvider::translate(const std::string& text, const std::string& source,
                                      const std::string& target) {
  json req = {{"text", text}, {"source", source}, {"target", target}};
  auto res = parse_response("translate", call("translate", req.dump()));
  if (!res.contains("text") || !res["text"].is_string()) throw ProviderError("translate: response lacks 'text'");
  return res["text"].get<std::string>();
}

std::vector<MaskSuggestion> RemoteProvider::fill_mask(const std::string& text) {
  json req = {{"text", text}};
  auto res = parse_response("fill_mask", call("fill_mask", req.dump()));
  if (!res.contains("suggestions") || !res["suggestions"].is_array()) {
    throw ProviderError("fill_mask: response lacks 'suggestions'");
  }
  std::vector<MaskSuggestion> out;
  for (const auto& s : res["suggestions"]) {
    if (!s.is_object() || !s.contains("word") || !s["word"].is_string() || !s.contains("probability") ||
        !s["probability"].is_number()) {
      throw ProviderError("fill_mask: malformed suggestion");
    }
    out.push_back({s["word"].get<std::string>(), s["probability"].get<double>()});
  }
  return out;
}

std::vector<GeneratedQA> RemoteProvider::generate_questions(const std::string& snippet, std::size_t max_items) {
  json req = {{"snippet", snippet}, {"max_items", max_items}};
  auto res = parse_response("generate_questions", call("generate_questions", req.dump()));
  if (!res.contains("items") || !res["items"].is_array()) {
    throw ProviderError("generate_questions: response lacks 'items'");
  }
  std::vector<GeneratedQA> out;
  for (const auto& item : res["items"]) {
    if (!item.is_object()) throw ProviderError("generate_questions: malformed item");
    auto str = [&](const char* name) {
      return item.contains(name) && item[name].is_string() ? item[name].get<std::string>() : std::string{};
    };
    auto off = [&](const char* name) -> std::size_t {
      if (!item.contains(name) || !item[name].is_number_integer() || item[name].get<std::int64_t>() < 0) return 0;
      return static_cast<std::size_t>(item[name].get<std::int64_t>());
    };
    // Malformed offsets become empty spans, which the gateway drops and counts.
    out.push_back({str("question"), str("answer"), {off("start"), off("end")}});
  }
  return out;
}

}  // namespace qaaug
