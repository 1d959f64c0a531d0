#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "applause/features.hpp"
#include "applause/lexicon.hpp"
#include "applause/model.hpp"

namespace httplib {
class Server;
}

namespace applause {

struct FiredDevice {
  std::string feature;
  double value = 0;
};

struct ScoreResult {
  std::string text;
  double probability = 0.5;
  // Binary features that fired, then up to three ratio features ranked by
  // |beta_j * z_j|.
  std::vector<FiredDevice> fired_devices;
};

// Splits the draft, scores each sentence as a one-sentence window.
// Throws kModelMismatch when the model was trained against another registry.
std::vector<ScoreResult> score_draft(const LassoModel& model,
                                     const LexiconBundle& bundle,
                                     const FeatureRegistry& registry,
                                     std::string_view draft_text);

std::string score_results_json(const std::vector<ScoreResult>& results);

// Hex FNV-1a of the model file bytes.
std::string model_file_hash(std::string_view bytes);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// Stateless request handling over an immutable model and bundle.
class ScoringService {
 public:
  static constexpr std::size_t kMaxBodyBytes = 1 << 20;

  ScoringService(LassoModel model, LexiconBundle bundle, std::string model_hash);

  HttpReply score(std::string_view body) const;
  HttpReply importance() const;
  HttpReply health() const;

  const std::string& model_hash() const { return model_hash_; }

 private:
  LassoModel model_;
  LexiconBundle bundle_;
  FeatureRegistry registry_;
  std::string model_hash_;
};

// Routes: POST /score, GET /model/importance, GET /healthz. Every response
// carries X-Model-Fingerprint; CORS headers use `cors_origin`.
std::unique_ptr<httplib::Server> make_http_server(const ScoringService& service,
                                                  std::string cors_origin);

// "host:port" -> (host, port); throws kInvalidArgument.
std::pair<std::string, int> parse_listen_address(std::string_view address);

}  // namespace applause
