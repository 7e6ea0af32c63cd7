// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "synthaudit/errors.h"
#include "synthaudit/provider.h"

namespace synthaudit {
namespace {

constexpr char kJson[] = "application/json";

std::string ErrorBody(const std::string& message) {
  return nlohmann::json{{"error", message}}.dump();
}

// Runs `body` and maps library exceptions onto HTTP status codes.
template <typename F>
void Guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const ParseError& e) {
    res.status = 422;
    res.set_content(ErrorBody(e.what()), kJson);
  } catch (const QuotaExceeded& e) {
    res.status = 429;
    res.set_content(ErrorBody(e.what()), kJson);
  } catch (const InvalidArgument& e) {
    res.status = 400;
    res.set_content(ErrorBody(e.what()), kJson);
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(ErrorBody(e.what()), kJson);
  }
}

struct SampleRequest {
  std::size_t n;
  std::optional<uint64_t> seed;
};

SampleRequest ParseSampleRequest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 1, e.byte);
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer() ||
      j["n"].get<int64_t>() < 0) {
    throw InvalidArgument("'n' must be a nonnegative integer");
  }
  SampleRequest req{j["n"].get<std::size_t>(), std::nullopt};
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_integer()) {
      throw InvalidArgument("'seed' must be an integer");
    }
    req.seed = j["seed"].get<uint64_t>();
  }
  return req;
}

[[noreturn]] void ThrowForStatus(const httplib::Result& res,
                                 const std::string& what) {
  if (!res) {
    throw RemoteError(what + ": " + httplib::to_string(res.error()), 0);
  }
  std::string message = res->body;
  try {
    message = nlohmann::json::parse(res->body).at("error").get<std::string>();
  } catch (const std::exception&) {
  }
  if (res->status == 429) throw QuotaExceeded(message);
  throw RemoteError(what + " failed with HTTP " + std::to_string(res->status) +
                        ": " + message,
                    res->status);
}

}  // namespace

struct ProviderServer::Impl {
  Provider& provider;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Provider& p) : provider(p) {
    // Idle keep-alive connections would otherwise hold Stop() for seconds.
    server.set_keep_alive_timeout(1);
    // Small request/response pairs stall on Nagle plus delayed ACKs.
    server.set_tcp_nodelay(true);
    server.Post("/v1/sample", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      Guarded(res, [&] {
        SampleRequest r = ParseSampleRequest(req.body);
        res.set_content(EncodeSampleResponse(provider.Sample(r.n, r.seed)),
                        kJson);
      });
    });
    server.Post("/v1/metrics", [this](const httplib::Request& req,
                                      httplib::Response& res) {
      Guarded(res, [&] {
        Dataset synth = DecodeRecords(req.body, provider.schema());
        res.set_content(EncodeMetricsResponse(provider.Metrics(synth)), kJson);
      });
    });
    server.Get("/v1/stats", [this](const httplib::Request&,
                                   httplib::Response& res) {
      Guarded(res, [&] { res.set_content(EncodeStats(provider.Stats()), kJson); });
    });
  }

  int Bind(const std::string& host, int port) {
    if (port == 0) {
      int bound = server.bind_to_any_port(host);
      if (bound < 0) throw RemoteError("cannot bind " + host, 0);
      return bound;
    }
    if (!server.bind_to_port(host, port)) {
      throw RemoteError("cannot bind " + host + ":" + std::to_string(port), 0);
    }
    return port;
  }
};

ProviderServer::ProviderServer(Provider& provider)
    : impl_(std::make_unique<Impl>(provider)) {}

ProviderServer::~ProviderServer() { Stop(); }

int ProviderServer::Start(const std::string& host, int port) {
  int bound = impl_->Bind(host, port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ProviderServer::Run(const std::string& host, int port,
                         const std::function<void(int)>& on_bound) {
  int bound = impl_->Bind(host, port);
  if (on_bound) on_bound(bound);
  impl_->server.listen_after_bind();
}

void ProviderServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

struct RemoteProvider::Impl {
  httplib::Client client;
  std::mutex mu;  // httplib::Client is not safe for concurrent use
  Impl(const std::string& host, int port) : client(host, port) {
    client.set_keep_alive(true);
    client.set_tcp_nodelay(true);
    client.set_read_timeout(600, 0);
    client.set_write_timeout(600, 0);
  }
};

RemoteProvider::RemoteProvider(const std::string& host, int port)
    : impl_(std::make_unique<Impl>(host, port)) {}

RemoteProvider::~RemoteProvider() = default;

Dataset RemoteProvider::Sample(std::size_t n, std::optional<uint64_t> seed) {
  nlohmann::json body{{"n", n}};
  if (seed) body["seed"] = *seed;
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto res = impl_->client.Post("/v1/sample", body.dump(), kJson);
  if (!res || res->status != 200) ThrowForStatus(res, "sample");
  return DecodeSampleResponse(res->body);
}

MetricsResponse RemoteProvider::Metrics(const Dataset& synth) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto res = impl_->client.Post("/v1/metrics", EncodeRecords(synth), kJson);
  if (!res || res->status != 200) ThrowForStatus(res, "metrics");
  return DecodeMetricsResponse(res->body);
}

CallStats RemoteProvider::Stats() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto res = impl_->client.Get("/v1/stats");
  if (!res || res->status != 200) ThrowForStatus(res, "stats");
  return DecodeStats(res->body);
}

std::pair<std::string, int> ParseBindAddress(const std::string& address) {
  std::size_t colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw InvalidArgument("address '" + address + "' is not host:port");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw InvalidArgument("address '" + address + "' has a bad port");
  }
  if (port < 0 || port > 65535) {
    throw InvalidArgument("port out of range in '" + address + "'");
  }
  return {address.substr(0, colon), port};
}

}  // namespace synthaudit
