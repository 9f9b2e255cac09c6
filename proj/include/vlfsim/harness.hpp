#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlfsim/channel.hpp"
#include "vlfsim/codec.hpp"
#include "vlfsim/metrics.hpp"

namespace vlfsim {

enum class Pipeline { Semantic, Baseline };

std::string to_string(Pipeline p);
Pipeline parse_pipeline(std::string_view text);

// -5 dB to 10 dB in 2.5 dB steps.
std::vector<double> default_snr_list();

inline constexpr std::string_view kCsvSchemaVersion = "1";
inline constexpr std::string_view kOutputDirEnv = "VLFSIM_OUT_DIR";

struct SweepConfig {
  std::vector<double> snr_list = default_snr_list();
  std::size_t trials_per_snr = 200;
  std::uint64_t base_seed = 1;
  ChannelKind channel = ChannelKind::Awgn;
  CsiMode csi = CsiMode::Perfect;
  std::string codec = "toy";  // "toy" | "bridge"
  std::vector<Pipeline> pipelines{Pipeline::Semantic, Pipeline::Baseline};
  std::filesystem::path output;  // empty: keep the CSV in memory only
  // Drop the SNR index from seed derivation so every SNR point reuses the
  // same unit draws (paired comparisons across SNR).
  bool paired_snr_seeds = false;

  FeatureGeometry features{};
  std::size_t text_dim = 64;
  std::uint64_t codec_seed = 7;
  double target_power = kDefaultTargetPower;
  std::string bridge_command;

  // ConfigError on an empty SNR list, zero trials or no pipelines.
  void validate() const;
};

struct DatasetItem {
  std::string id;
  std::optional<Image> image;
  std::string caption;  // reference text; empty means no baseline run
};

struct Dataset {
  std::vector<DatasetItem> items;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

/// Images (PPM/PGM/farbfeld) from a directory, sorted by file name, with
/// captions from an optional `captions.tsv` (name<TAB>caption); otherwise the
/// file stem with '_'/'-' turned into spaces. Each non-empty line of
/// `text_file` becomes a text-only item. Unreadable files are skipped with a
/// warning.
Dataset load_dataset(const std::optional<std::filesystem::path>& image_dir,
                     const std::optional<std::filesystem::path>& text_file);

/// Deterministic captioned images: a coloured shape on a plain background.
Dataset synthetic_dataset(std::size_t count, const ImageGeometry& geometry, std::uint64_t seed);

/// Stable 64-bit hash of (base_seed, snr_index, trial, input_id).
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t snr_index, std::size_t trial,
                          std::string_view input_id);

struct SweepHooks {
  const MetricRegistry* metrics = nullptr;
  // Overrides the codec named in the config (used for injected backends).
  std::shared_ptr<const SemanticCodec> codec;
};

struct SweepResult {
  std::vector<LinkTrialReport> rows;  // canonical (snr, trial, input, pipeline) order
  std::string csv;
  std::string summary;
  std::vector<std::string> warnings;
  std::size_t failed_trials = 0;
  std::size_t skipped_inputs = 0;

  bool ok() const noexcept { return failed_trials == 0 && skipped_inputs == 0; }
};

/// Runs every configured pipeline for each (snr, trial, input). Semantic and
/// baseline rows at the same point share one channel seed. Output is a pure
/// function of (cfg, inputs). ConfigError if cfg.output cannot be written.
SweepResult run_sweep(const SweepConfig& cfg, const Dataset& inputs, const SweepHooks& hooks = {});

std::string render_csv(const std::vector<LinkTrialReport>& rows, const std::vector<std::string>& external_names);

// Mean +/- standard error per (pipeline, snr) for each populated metric.
std::string render_summary(const std::vector<LinkTrialReport>& rows);

/// Writes `<pipeline>.<metric>.dat` files of "snr_db mean stderr count" lines
/// under out_dir. VersionError on a schema mismatch, DataError on an empty
/// CSV; nothing is written in either case.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv_path,
                                              const std::filesystem::path& out_dir);

}  // namespace vlfsim
