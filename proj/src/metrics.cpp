#include "vlfsim/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "vlfsim/errors.hpp"

namespace vlfsim {

namespace {

std::map<std::string, std::size_t> ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key += ' ';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

void require_same_geometry(const FeatureFrame& a, const FeatureFrame& b) {
  if (a.geometry() != b.geometry()) throw GeometryError("feature frames differ in geometry");
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

BleuScore bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
               std::size_t max_n) {
  if (candidate.empty()) return {0.0, true};
  const std::size_t orders = std::min(max_n, candidate.size());
  if (orders == 0) return {0.0, false};

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand) {
      if (auto it = ref.find(gram); it != ref.end()) matched += std::min(count, it->second);
    }
    if (matched == 0) return {0.0, false};
    const double total = static_cast<double>(candidate.size() - n + 1);
    log_sum += std::log(static_cast<double>(matched) / total);
  }

  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return {brevity * std::exp(log_sum / static_cast<double>(orders)), false};
}

double bleu(std::string_view candidate, std::string_view reference, std::size_t max_n) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  return bleu(cand, ref, max_n).value;
}

double feature_cosine(const FeatureFrame& a, const FeatureFrame& b) {
  require_same_geometry(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    na += x[i] * x[i];
    nb += y[i] * y[i];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateFrameError("cosine of an all-zero feature frame");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double feature_mse(const FeatureFrame& a, const FeatureFrame& b) {
  require_same_geometry(a, b);
  double acc = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return acc / static_cast<double>(x.size());
}

double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received) {
  if (sent.size() != received.size()) {
    throw FramingError("bit streams differ in length: " + std::to_string(sent.size()) + " vs " +
                       std::to_string(received.size()));
  }
  if (sent.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) errors += (sent[i] != 0) != (received[i] != 0);
  return static_cast<double>(errors) / static_cast<double>(sent.size());
}

double character_error_rate(std::string_view sent, std::string_view received) {
  const std::size_t n = std::max(sent.size(), received.size());
  if (n == 0) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= sent.size() || i >= received.size() || sent[i] != received[i]) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(n);
}

double image_mse(const Image& a, const Image& b) {
  if (a.geometry != b.geometry || a.values.size() != b.values.size()) {
    throw GeometryError("images differ in geometry");
  }
  if (a.values.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.values.size());
}

double psnr_db(double mse) {
  if (mse < 1e-10) return kPsnrCapDb;
  return std::min(kPsnrCapDb, -10.0 * std::log10(mse));
}

void MetricRegistry::register_metric(std::string name, ExternalScorer scorer, bool thread_safe) {
  if (name.empty()) throw ConfigError("external metric needs a name");
  if (!scorer) throw ConfigError("external metric '" + name + "' has no scorer");
  for (const auto& e : entries_) {
    if (e.name == name) throw ConfigError("external metric '" + name + "' registered twice");
  }
  entries_.push_back(Entry{std::move(name), std::move(scorer),
                           thread_safe ? nullptr : std::make_unique<std::mutex>()});
}

std::vector<std::string> MetricRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

void MetricRegistry::evaluate(const TrialArtifacts& artifacts, LinkTrialReport& report) const {
  for (const auto& e : entries_) {
    std::optional<double> value;
    try {
      std::unique_lock<std::mutex> guard;
      if (e.lock) guard = std::unique_lock<std::mutex>(*e.lock);
      const double v = e.scorer(artifacts);
      if (std::isfinite(v)) {
        value = v;
      } else {
        report.status = "metric_failed";
      }
    } catch (...) {
      report.status = "metric_failed";
    }
    report.external.emplace_back(e.name, value);
  }
}

void register_external_metric(MetricRegistry& registry, std::string name, ExternalScorer scorer) {
  registry.register_metric(std::move(name), std::move(scorer));
}

}  // namespace vlfsim
