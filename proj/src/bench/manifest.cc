/*
 * Copyright 2026 The lazypi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bench/manifest.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "common/error.h"
#include "json.hpp"
#include "privacy/accountant.h"

namespace lazypi {
namespace {

using Json = nlohmann::json;

Json ToJsonObject(const Manifest& m) {
  Json methods = Json::array();
  for (Method method : m.methods) methods.push_back(MethodName(method));
  Json hidden = Json::array();
  for (Index w : m.hidden) hidden.push_back(w);
  Json j;
  j["data"] = {
      {"source", m.source == DataSource::kCsv ? "csv" : "simulate"},
      {"n_total", m.sim.n_total},
      {"p", m.sim.p},
      {"x_scale", m.sim.x_scale},
      {"noise_sd", m.sim.noise_sd},
      {"beta_a", m.sim.beta_a},
      {"beta_b", m.sim.beta_b},
      {"seed", m.sim.seed},
      {"path", m.csv_path},
      {"response_column", m.response_column},
      {"transform", TransformName(m.transform)},
  };
  j["n_train"] = m.n_train;
  j["methods"] = methods;
  j["trials"] = m.trials;
  j["seed"] = m.seed;
  j["workers"] = m.workers;
  j["record_timings"] = m.record_timings;
  j["model"] = {{"hidden", hidden},
                {"activation", ActivationName(m.activation)}};
  j["training"] = {{"epochs", m.training.epochs},
                   {"batch_size", m.training.batch_size},
                   {"learning_rate", m.training.learning_rate}};
  j["privacy"] = {{"epsilon", m.privacy.epsilon},
                  {"delta", m.privacy.delta},
                  {"sigma", m.privacy.sigma ? Json(*m.privacy.sigma) : Json()},
                  {"clip_norm", m.privacy.clip_norm}};
  j["lazy"] = {{"lambda", m.lazy.ridge_lambda},
               {"jacobian_reuse", m.lazy.jacobian_reuse},
               {"workers", m.lazy.workers}};
  j["interval"] = {{"alpha", m.interval.alpha}, {"nu", m.interval.nu}};
  j["stability"] = {{"trials", m.stability.trials},
                    {"test_points", m.stability.test_points},
                    {"nu", m.stability.nu}};
  return j;
}

// Keys whose value may be null to mean "unset".
bool Nullable(const std::string& key) { return key == "privacy.sigma"; }

bool CompatibleTypes(const std::string& key, const Json& reference,
                     const Json& value) {
  if (Nullable(key) && value.is_null()) return true;
  if (reference.is_null()) return value.is_number();
  if (reference.is_number()) return value.is_number();
  return reference.type() == value.type();
}

// Overlays `patch` onto `base`, rejecting keys that `base` does not have.
void Merge(Json& base, const Json& patch, const std::string& path) {
  if (!patch.is_object()) throw ParseError("manifest root must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ParseError("unknown manifest key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      if (!it->is_object()) throw ParseError("'" + key + "' must be an object");
      Merge(slot, *it, key);
    } else {
      if (!CompatibleTypes(key, slot, *it)) {
        throw ParseError("manifest key '" + key + "' has the wrong type");
      }
      slot = *it;
    }
  }
}

template <typename T>
T Get(const Json& j, const char* key, const std::string& section) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError("manifest key '" + section + "." + key + "' is invalid");
  }
}

Index GetCount(const Json& j, const char* key, const std::string& section) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ParseError("manifest key '" + section + key + "' must be an integer");
  }
  return v.get<Index>();
}

Manifest FromJsonObject(const Json& j) {
  Manifest m;
  const Json& data = j.at("data");
  const auto source = Get<std::string>(data, "source", "data");
  if (source == "simulate") {
    m.source = DataSource::kSimulate;
  } else if (source == "csv") {
    m.source = DataSource::kCsv;
  } else {
    throw ParseError("data.source must be 'simulate' or 'csv'");
  }
  m.sim.n_total = GetCount(data, "n_total", "data.");
  m.sim.p = GetCount(data, "p", "data.");
  m.sim.x_scale = Get<double>(data, "x_scale", "data");
  m.sim.noise_sd = Get<double>(data, "noise_sd", "data");
  m.sim.beta_a = Get<double>(data, "beta_a", "data");
  m.sim.beta_b = Get<double>(data, "beta_b", "data");
  m.sim.seed = Get<std::uint64_t>(data, "seed", "data");
  m.csv_path = Get<std::string>(data, "path", "data");
  m.response_column = Get<std::string>(data, "response_column", "data");
  m.transform = ParseTransform(Get<std::string>(data, "transform", "data"));

  m.n_train = GetCount(j, "n_train", "");
  m.methods.clear();
  for (const auto& name : j.at("methods")) {
    if (!name.is_string()) throw ParseError("methods must be strings");
    m.methods.push_back(ParseMethod(name.get<std::string>()));
  }
  m.trials = static_cast<int>(GetCount(j, "trials", ""));
  m.seed = Get<std::uint64_t>(j, "seed", "");
  m.workers = static_cast<int>(GetCount(j, "workers", ""));
  m.record_timings = Get<bool>(j, "record_timings", "");

  const Json& model = j.at("model");
  m.hidden.clear();
  for (const auto& w : model.at("hidden")) {
    if (!w.is_number_integer()) throw ParseError("model.hidden must hold integers");
    m.hidden.push_back(w.get<Index>());
  }
  m.activation = ParseActivation(Get<std::string>(model, "activation", "model"));

  const Json& training = j.at("training");
  m.training.epochs = static_cast<int>(GetCount(training, "epochs", "training."));
  m.training.batch_size = GetCount(training, "batch_size", "training.");
  m.training.learning_rate = Get<double>(training, "learning_rate", "training");

  const Json& privacy = j.at("privacy");
  m.privacy.epsilon = Get<double>(privacy, "epsilon", "privacy");
  m.privacy.delta = Get<double>(privacy, "delta", "privacy");
  if (!privacy.at("sigma").is_null()) {
    m.privacy.sigma = Get<double>(privacy, "sigma", "privacy");
  }
  m.privacy.clip_norm = Get<double>(privacy, "clip_norm", "privacy");

  const Json& lazy = j.at("lazy");
  m.lazy.ridge_lambda = Get<double>(lazy, "lambda", "lazy");
  m.lazy.jacobian_reuse = Get<bool>(lazy, "jacobian_reuse", "lazy");
  m.lazy.workers = static_cast<int>(GetCount(lazy, "workers", "lazy."));

  const Json& interval = j.at("interval");
  m.interval.alpha = Get<double>(interval, "alpha", "interval");
  m.interval.nu = Get<double>(interval, "nu", "interval");

  const Json& stability = j.at("stability");
  m.stability.trials = static_cast<int>(GetCount(stability, "trials", "stability."));
  m.stability.test_points = GetCount(stability, "test_points", "stability.");
  m.stability.nu = Get<double>(stability, "nu", "stability");
  m.Validate();
  return m;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kNaive:
      return "naive";
    case Method::kJackknife:
      return "jackknife";
    case Method::kJackknifePlus:
      return "jackknife_plus";
    case Method::kLazyFinetune:
      return "lazy_finetune";
    case Method::kDpLazy:
      return "dp_lazy";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  for (Method m : {Method::kNaive, Method::kJackknife, Method::kJackknifePlus,
                   Method::kLazyFinetune, Method::kDpLazy}) {
    if (MethodName(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + name + "'");
}

void Manifest::Validate() const {
  if (source == DataSource::kSimulate) {
    sim.Validate();
    if (sim.n_total < n_train + 1) {
      throw InvalidArgument("data.n_total must exceed n_train");
    }
  } else if (csv_path.empty()) {
    throw InvalidArgument("data.path is required for csv data");
  }
  if (n_train < 2) throw InvalidArgument("n_train must be >= 2");
  if (methods.empty()) throw InvalidArgument("methods must not be empty");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  for (Index w : hidden) {
    if (w < 1) throw InvalidArgument("model.hidden widths must be >= 1");
  }
  training.Validate();
  if (training.epochs < 1) throw InvalidArgument("training.epochs must be >= 1");
  if (training.batch_size > n_train) {
    throw InvalidArgument("training.batch_size must not exceed n_train");
  }
  if (!(privacy.epsilon > 0.0)) throw InvalidArgument("privacy.epsilon must be > 0");
  if (!(privacy.delta > 0.0 && privacy.delta < 1.0)) {
    throw InvalidArgument("privacy.delta must lie in (0, 1)");
  }
  if (privacy.sigma && !(*privacy.sigma >= 0.0)) {
    throw InvalidArgument("privacy.sigma must be >= 0");
  }
  if (!(privacy.clip_norm > 0.0)) throw InvalidArgument("privacy.clip_norm must be > 0");
  lazy.Validate();
  if (lazy.workers < 1) throw InvalidArgument("lazy.workers must be >= 1");
  interval.Validate();
  if (stability.trials < 1) throw InvalidArgument("stability.trials must be >= 1");
  if (stability.test_points < 1) {
    throw InvalidArgument("stability.test_points must be >= 1");
  }
  if (!(stability.nu >= 0.0)) throw InvalidArgument("stability.nu must be >= 0");
}

MlpArchitecture Manifest::Architecture(Index input_dim) const {
  MlpArchitecture arch{input_dim, hidden, activation};
  arch.Validate();
  return arch;
}

Manifest ParseManifest(const std::string& json_text) {
  Json patch;
  try {
    patch = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Json base = ToJsonObject(Manifest{});
  Merge(base, patch, "");
  return FromJsonObject(base);
}

Manifest LoadManifest(const std::string& path) {
  return ParseManifest(ReadFile(path));
}

std::string ManifestToJson(const Manifest& manifest, int indent) {
  return ToJsonObject(manifest).dump(indent);
}

void SetManifestValue(Manifest& manifest, const std::string& key,
                      const std::string& value) {
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;
  }
  Json patch;
  Json* cursor = &patch;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  if (path.empty()) throw InvalidArgument("empty manifest key");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) cursor = &(*cursor)[path[i]];
  (*cursor)[path.back()] = parsed;
  Json base = ToJsonObject(manifest);
  Merge(base, patch, "");
  manifest = FromJsonObject(base);
}

ResolvedPrivacy ResolvePrivacy(const Manifest& manifest, Index n) {
  ResolvedPrivacy rp;
  const Index batch = manifest.training.batch_size;
  const Index lots_per_epoch = (n + batch - 1) / batch;
  rp.iterations = static_cast<int>(lots_per_epoch * manifest.training.epochs);
  rp.sampling_rate = static_cast<double>(batch) / static_cast<double>(n);
  if (manifest.privacy.sigma) {
    rp.sigma = *manifest.privacy.sigma;
  } else {
    rp.sigma = CalibrateNoiseMultiplier(manifest.privacy.epsilon,
                                        rp.sampling_rate, rp.iterations,
                                        manifest.privacy.delta);
    rp.calibrated = true;
  }
  rp.epsilon_accounted = account_privacy(rp.sigma, rp.sampling_rate,
                                         rp.iterations, manifest.privacy.delta);
  return rp;
}

DpSgdConfig MakeDpSgdConfig(const Manifest& manifest, const ResolvedPrivacy& rp,
                            std::uint64_t seed) {
  DpSgdConfig cfg;
  cfg.noise_scale = rp.sigma;
  cfg.learning_rate = manifest.training.learning_rate;
  cfg.lot_size = manifest.training.batch_size;
  cfg.clip_norm = manifest.privacy.clip_norm;
  cfg.iterations = rp.iterations;
  cfg.target_delta = manifest.privacy.delta;
  cfg.seed = seed;
  return cfg;
}

std::string GitBlobHash(const std::string& content) {
  const std::string header = fmt::format("blob {}", content.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error(ErrorCode::kRuntime, "EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorCode::kRuntime, "SHA-1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string ManifestContentHash(const Manifest& manifest) {
  std::string content = ManifestToJson(manifest, -1);
  if (manifest.source == DataSource::kCsv) {
    content += "\n";
    content += ReadFile(manifest.csv_path);
  }
  return GitBlobHash(content);
}

}  // namespace lazypi
