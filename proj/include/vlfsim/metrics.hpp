#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlfsim/feature_frame.hpp"
#include "vlfsim/image.hpp"

namespace vlfsim {

/// One row of a sweep: a single pipeline run at one (snr, trial, input).
/// Metrics that do not apply to the pipeline stay empty.
struct LinkTrialReport {
  std::string pipeline;
  double snr_db = 0.0;
  std::size_t snr_index = 0;
  std::size_t trial = 0;
  std::string input_id;
  std::uint64_t seed = 0;

  std::optional<double> feature_mse;
  std::optional<double> feature_cosine;
  std::optional<double> image_mse;
  std::optional<double> psnr_db;
  std::optional<double> label_correct;
  std::optional<double> confidence;
  std::optional<double> bleu;
  std::optional<double> ber_pre_fec;
  std::optional<double> ber_post_fec;
  std::optional<double> cer;
  std::size_t erasures = 0;

  std::vector<std::pair<std::string, std::optional<double>>> external;
  std::string status = "ok";
};

// Lowercase, split on ASCII whitespace.
std::vector<std::string> tokenize(std::string_view text);

struct BleuScore {
  double value = 0.0;
  bool empty_candidate = false;
};

/// Sentence BLEU without smoothing. Uses n-gram orders 1..min(max_n, |cand|),
/// clipped precisions, and brevity penalty exp(1 - |ref|/|cand|) when the
/// candidate is shorter. Any zero precision yields 0.
BleuScore bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
               std::size_t max_n = 4);
double bleu(std::string_view candidate, std::string_view reference, std::size_t max_n = 4);

/// Cosine of the flattened frames. GeometryError on mismatched shapes,
/// DegenerateFrameError if either frame is all zeros.
double feature_cosine(const FeatureFrame& a, const FeatureFrame& b);
double feature_mse(const FeatureFrame& a, const FeatureFrame& b);

/// Fraction of differing positions. FramingError on length mismatch.
double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);

/// Fraction of differing characters (position-wise, length of the longer).
double character_error_rate(std::string_view sent, std::string_view received);

double image_mse(const Image& a, const Image& b);

inline constexpr double kPsnrCapDb = 100.0;
/// Peak 1.0; capped at kPsnrCapDb for vanishing MSE.
double psnr_db(double mse);

// What an external scorer may look at. Pointers are null when the pipeline
// did not produce that artifact.
struct TrialArtifacts {
  std::string_view pipeline;
  const std::string* reference_text = nullptr;
  const std::string* received_text = nullptr;
  const Image* source_image = nullptr;
  const Image* received_image = nullptr;
  const FeatureFrame* sent_frame = nullptr;
  const FeatureFrame* received_frame = nullptr;
};

using ExternalScorer = std::function<double(const TrialArtifacts&)>;

/// Named scorers evaluated once per trial (LPIPS, CLIP score and similar
/// model-backed metrics attach here). A scorer that throws marks the trial
/// `metric_failed` and leaves its column empty.
class MetricRegistry {
 public:
  // ConfigError on a duplicate name. thread_safe = false serializes calls.
  void register_metric(std::string name, ExternalScorer scorer, bool thread_safe = true);

  std::vector<std::string> names() const;
  bool empty() const noexcept { return entries_.empty(); }

  // Appends one `external` entry per scorer, in registration order.
  void evaluate(const TrialArtifacts& artifacts, LinkTrialReport& report) const;

 private:
  struct Entry {
    std::string name;
    ExternalScorer scorer;
    std::unique_ptr<std::mutex> lock;  // null when the scorer is thread-safe
  };
  std::vector<Entry> entries_;
};

void register_external_metric(MetricRegistry& registry, std::string name, ExternalScorer scorer);

}  // namespace vlfsim
