#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "whow/hash.hpp"
#include "whow/llm.hpp"

namespace whow {

namespace {

using ordered_json = nlohmann::ordered_json;

// "https://host[:port]/path" -> {"https://host[:port]", "/path"}
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::runtime_error("endpoint URL '" + url + "' has no scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string request_cache_key(const std::string& prompt, const std::string& model,
                              const std::string& mode_tag) {
  // 0x1f separators keep (prompt, model, tag) unambiguous in the hash input.
  return sha256_hex(prompt + '\x1f' + model + '\x1f' + mode_tag);
}

HttpChatClient::HttpChatClient(std::string api_key) : api_key_(std::move(api_key)) {
  if (api_key_.empty()) {
    const char* env = std::getenv("WHOW_LLM_API_KEY");
    if (env != nullptr) api_key_ = env;
  }
}

LlmResponse HttpChatClient::complete(const LlmRequest& request) {
  const auto [base, path] = split_endpoint(request.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);

  ordered_json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["messages"] = ordered_json::array(
      {ordered_json{{"role", "user"}, {"content", request.prompt}}});

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, headers, body.dump(), "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  if (!res)
    throw std::runtime_error("request to " + request.endpoint + " failed: " +
                             httplib::to_string(res.error()));
  if (res->status != 200)
    throw std::runtime_error("request to " + request.endpoint + " returned HTTP " +
                             std::to_string(res->status) + ": " + res->body);

  ordered_json reply;
  try {
    reply = ordered_json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("response body is not JSON: ") + e.what());
  }
  LlmResponse out;
  out.latency_ms = elapsed.count();
  try {
    out.raw_text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("response has no message content: ") + e.what());
  }
  return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    auto j = ordered_json::parse(buf.str());
    return j.at("raw_response").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt cache entry " + (dir_ / (key + ".json")).string() +
                             ": " + e.what());
  }
}

void ResponseCache::store(const std::string& key, const LlmRequest& request,
                          const std::string& raw_response) const {
  ordered_json j;
  j["request"] = ordered_json{{"endpoint", request.endpoint},
                              {"model", request.model},
                              {"temperature", request.temperature},
                              {"mode", request.mode_tag},
                              {"prompt", request.prompt}};
  j["raw_response"] = raw_response;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();

  const auto path = dir_ / (key + ".json");
  const auto tmp = dir_ / (key + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace whow
