#include "applause/service.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"

#include "applause/corpus.hpp"
#include "applause/error.hpp"
#include "applause/rng.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that collides with Eigen.
#include "httplib.h"

namespace applause {

namespace {

nlohmann::ordered_json result_to_json(const ScoreResult& r) {
  nlohmann::ordered_json j;
  j["text"] = r.text;
  j["probability"] = r.probability;
  auto devices = nlohmann::ordered_json::array();
  for (const FiredDevice& d : r.fired_devices) {
    devices.push_back({{"feature", d.feature}, {"value", d.value}});
  }
  j["fired_devices"] = std::move(devices);
  return j;
}

HttpReply error_reply(int status, std::string_view message) {
  return {status, nlohmann::json{{"error", message}}.dump()};
}

}  // namespace

std::vector<ScoreResult> score_draft(const LassoModel& model,
                                     const LexiconBundle& bundle,
                                     const FeatureRegistry& registry,
                                     std::string_view draft_text) {
  if (model.registry_fingerprint != registry.fingerprint() ||
      model.feature_names != registry.names() || !registry.matches(bundle)) {
    throw Error(ErrorCode::kModelMismatch,
                "model was trained against a different feature registry");
  }
  std::vector<ScoreResult> results;
  const auto entries = registry.entries();
  for (const Sentence& sentence : split_sentences(draft_text)) {
    const std::vector<std::string> window{sentence.text};
    const FeatureVector fv = extract(window, bundle, registry);
    const Eigen::VectorXd z = standardized_input(model, fv.values);

    ScoreResult r;
    r.text = sentence.text;
    r.probability = sigmoid(model.intercept + model.std_coefficients.dot(z));

    std::vector<std::pair<double, std::size_t>> ratio_contributions;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      if (entries[j].kind == FeatureKind::kBinary) {
        if (fv.values[col] != 0) r.fired_devices.push_back({entries[j].name, fv.values[col]});
      } else if (fv.values[col] != 0) {
        const double contribution = std::abs(model.std_coefficients[col] * z[col]);
        if (contribution > 0) ratio_contributions.emplace_back(contribution, j);
      }
    }
    std::stable_sort(ratio_contributions.begin(), ratio_contributions.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < std::min<std::size_t>(3, ratio_contributions.size()); ++k) {
      const std::size_t j = ratio_contributions[k].second;
      r.fired_devices.push_back({entries[j].name, fv.values[static_cast<Eigen::Index>(j)]});
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string score_results_json(const std::vector<ScoreResult>& results) {
  nlohmann::ordered_json j;
  j["sentences"] = nlohmann::ordered_json::array();
  for (const ScoreResult& r : results) j["sentences"].push_back(result_to_json(r));
  return j.dump();
}

std::string model_file_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

ScoringService::ScoringService(LassoModel model, LexiconBundle bundle,
                               std::string model_hash)
    : model_(std::move(model)),
      bundle_(std::move(bundle)),
      registry_(FeatureRegistry::for_bundle(bundle_)),
      model_hash_(std::move(model_hash)) {
  if (model_.registry_fingerprint != registry_.fingerprint() ||
      model_.feature_names != registry_.names()) {
    throw Error(ErrorCode::kModelMismatch,
                "model was trained against a different feature registry");
  }
}

HttpReply ScoringService::score(std::string_view body) const {
  if (body.size() > kMaxBodyBytes) return error_reply(413, "request body exceeds 1 MB");
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string()) {
    return error_reply(400, "expected {\"text\": string}");
  }
  const auto text = request["text"].get<std::string>();
  return {200, score_results_json(score_draft(model_, bundle_, registry_, text))};
}

HttpReply ScoringService::importance() const {
  nlohmann::ordered_json j;
  j["importance"] = nlohmann::ordered_json::array();
  if (!model_.support().empty()) {
    auto weights = relative_importance(model_);
    std::stable_sort(weights.begin(), weights.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [index, weight] : weights) {
      j["importance"].push_back(
          {{"feature", model_.feature_names[index]},
           {"weight", weight},
           {"beta", model_.std_coefficients[static_cast<Eigen::Index>(index)]}});
    }
  }
  return {200, j.dump()};
}

HttpReply ScoringService::health() const {
  return {200, nlohmann::json{{"status", "ok"}, {"model", model_hash_}}.dump()};
}

std::unique_ptr<httplib::Server> make_http_server(const ScoringService& service,
                                                  std::string cors_origin) {
  auto server = std::make_unique<httplib::Server>();
  server->set_payload_max_length(ScoringService::kMaxBodyBytes);
  server->set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                               {"Access-Control-Allow-Headers", "Content-Type"},
                               {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                               {"Access-Control-Expose-Headers", "X-Model-Fingerprint"},
                               {"X-Model-Fingerprint", service.model_hash()}});
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  server->Post("/score", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.score(req.body));
  });
  server->Get("/model/importance", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.importance());
  });
  server->Get("/healthz", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  server->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server->set_exception_handler(
      [send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        }
        send(res, error_reply(500, message));
      });
  server->set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (res.status == 413) {
      send(res, error_reply(413, "request body exceeds 1 MB"));
    } else if (res.body.empty()) {
      send(res, error_reply(res.status, httplib::status_message(res.status)));
    }
  });
  return server;
}

std::pair<std::string, int> parse_listen_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= address.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "listen address must be host:port, got '" + std::string(address) + "'");
  }
  int port = 0;
  for (char c : address.substr(colon + 1)) {
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kInvalidArgument, "bad port in '" + std::string(address) + "'");
    }
    port = port * 10 + (c - '0');
    if (port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  }
  return {std::string(address.substr(0, colon)), port};
}

}  // namespace applause
