// vlfsim: link-level simulator for transmitting vision-language features.
//
//   vlfsim sweep      Monte-Carlo SNR sweep of the semantic and/or digital pipelines
//   vlfsim baseline   ASCII + Hamming(7,4) + 16-QAM chain over a text file
//   vlfsim bcr        bandwidth compression ratio vs image resolution
//   vlfsim calibrate  measured vs configured SNR from pilot symbols
//   vlfsim plot-data  per-metric (snr, mean, stderr) series from a sweep CSV

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlfsim/bcr.hpp"
#include "vlfsim/channel.hpp"
#include "vlfsim/digital_baseline.hpp"
#include "vlfsim/errors.hpp"
#include "vlfsim/harness.hpp"

namespace fs = std::filesystem;
using namespace vlfsim;

namespace {

fs::path resolve_output(const std::string& requested, const char* fallback_name) {
  fs::path p = requested.empty() ? fs::path(fallback_name) : fs::path(requested);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(std::string(kOutputDirEnv).c_str()); dir && *dir) p = fs::path(dir) / p;
  }
  return p;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct SweepArgs {
  std::string config_images;
  std::string texts;
  std::size_t synthetic = 0;
  std::size_t synthetic_size = 128;
  std::vector<double> snr = default_snr_list();
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string channel = "awgn";
  std::string csi = "perfect";
  std::string codec = "toy";
  std::vector<std::string> pipelines{"semantic", "baseline"};
  std::string output;
  std::string summary;
  bool paired = false;
  std::size_t queries = kDefaultQueries;
  std::size_t dim = kDefaultFeatureDim;
  std::size_t text_dim = 64;
  std::uint64_t codec_seed = 7;
  std::string bridge_cmd;
};

int run_sweep_command(const SweepArgs& a) {
  SweepConfig cfg;
  cfg.snr_list = a.snr;
  cfg.trials_per_snr = a.trials;
  cfg.base_seed = a.seed;
  cfg.channel = parse_channel_kind(a.channel);
  cfg.csi = parse_csi_mode(a.csi);
  cfg.codec = a.codec;
  cfg.pipelines.clear();
  for (const auto& p : a.pipelines) cfg.pipelines.push_back(parse_pipeline(p));
  cfg.paired_snr_seeds = a.paired;
  cfg.features = FeatureGeometry{a.queries, a.dim};
  cfg.text_dim = a.text_dim;
  cfg.codec_seed = a.codec_seed;
  cfg.bridge_command = a.bridge_cmd;
  cfg.output = resolve_output(a.output, "sweep.csv");
  if (cfg.output.has_parent_path()) fs::create_directories(cfg.output.parent_path());

  Dataset data;
  if (!a.config_images.empty() || !a.texts.empty()) {
    data = load_dataset(a.config_images.empty() ? std::nullopt : std::optional<fs::path>(a.config_images),
                        a.texts.empty() ? std::nullopt : std::optional<fs::path>(a.texts));
  }
  if (a.synthetic > 0) {
    Dataset synth = synthetic_dataset(a.synthetic, ImageGeometry{3, a.synthetic_size, a.synthetic_size}, a.seed);
    for (auto& item : synth.items) data.items.push_back(std::move(item));
  }
  if (data.items.empty()) {
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    throw ConfigError("no inputs: pass --images, --texts or --synthetic");
  }

  const SweepResult res = run_sweep(cfg, data);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << res.summary;
  if (!a.summary.empty()) {
    std::ofstream s(resolve_output(a.summary, "summary.txt"));
    s << res.summary;
  }
  std::cerr << "wrote " << res.rows.size() << " rows to " << cfg.output.string() << '\n';
  if (!res.ok()) {
    std::cerr << res.failed_trials << " failed trials, " << res.skipped_inputs << " skipped inputs\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-level simulator for vision-language feature transmission"};
  app.require_subcommand(1);

  // sweep
  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo SNR sweep writing one CSV row per trial and pipeline");
  sw->set_config("--config", "", "Flat key = value file; keys are the long option names");
  sw->add_option("--images", sweep.config_images, "Directory of PPM/PGM/farbfeld images (+ captions.tsv)");
  sw->add_option("--texts", sweep.texts, "Text file, one reference sentence per line (baseline only)");
  sw->add_option("--synthetic", sweep.synthetic, "Add N generated captioned images");
  sw->add_option("--synthetic-size", sweep.synthetic_size, "Side length of generated images")->capture_default_str();
  sw->add_option("--snr", sweep.snr, "SNR points in dB")->delimiter(',')->capture_default_str();
  sw->add_option("--trials", sweep.trials, "Trials per SNR point")->capture_default_str();
  sw->add_option("--seed", sweep.seed, "Base seed")->capture_default_str();
  sw->add_option("--channel", sweep.channel, "awgn | rayleigh")->capture_default_str();
  sw->add_option("--csi", sweep.csi, "perfect | none")->capture_default_str();
  sw->add_option("--codec", sweep.codec, "toy | bridge")->capture_default_str();
  sw->add_option("--pipelines", sweep.pipelines, "semantic,baseline")->delimiter(',')->capture_default_str();
  sw->add_option("--output", sweep.output, "CSV path (relative paths resolve under $VLFSIM_OUT_DIR)");
  sw->add_option("--summary", sweep.summary, "Also write the summary table here");
  sw->add_flag("--paired-snr-seeds", sweep.paired, "Reuse the same channel draws at every SNR point");
  sw->add_option("--queries", sweep.queries, "Feature rows N")->capture_default_str();
  sw->add_option("--dim", sweep.dim, "Feature width d")->capture_default_str();
  sw->add_option("--text-dim", sweep.text_dim, "Toy text embedding width")->capture_default_str();
  sw->add_option("--codec-seed", sweep.codec_seed, "Toy codec seed")->capture_default_str();
  sw->add_option("--bridge-cmd", sweep.bridge_cmd, "Command serving the bridge protocol on stdin/stdout");

  // baseline
  std::string text_file;
  std::string bl_channel = "awgn";
  std::string bl_csi = "perfect";
  std::vector<double> bl_snr = default_snr_list();
  std::size_t bl_trials = 10;
  std::uint64_t bl_seed = 1;
  std::string bl_output;
  auto* bl = app.add_subcommand("baseline", "Run the ASCII/Hamming/16-QAM chain over a text file");
  bl->add_option("--text-file", text_file, "Message to send")->required();
  bl->add_option("--channel", bl_channel, "awgn | rayleigh")->capture_default_str();
  bl->add_option("--csi", bl_csi, "perfect | none")->capture_default_str();
  bl->add_option("--snr", bl_snr, "SNR points in dB")->delimiter(',')->capture_default_str();
  bl->add_option("--trials", bl_trials, "Trials per SNR point")->capture_default_str();
  bl->add_option("--seed", bl_seed, "Base seed")->capture_default_str();
  bl->add_option("--output", bl_output, "CSV path (default: stdout)");

  // bcr
  std::size_t bcr_queries = kDefaultQueries;
  std::size_t bcr_dim = kDefaultFeatureDim;
  std::size_t bcr_channels = 3;
  std::vector<std::size_t> bcr_res{64, 128, 256, 512, 1024};
  auto* bc = app.add_subcommand("bcr", "Print channel uses and BCR against square image resolution");
  bc->add_option("--queries", bcr_queries)->capture_default_str();
  bc->add_option("--dim", bcr_dim)->capture_default_str();
  bc->add_option("--channels", bcr_channels)->capture_default_str();
  bc->add_option("--res", bcr_res, "Square side lengths")->delimiter(',')->capture_default_str();

  // calibrate
  std::string cal_channel = "awgn";
  std::vector<double> cal_snr = default_snr_list();
  std::size_t cal_pilots = 100000;
  std::uint64_t cal_seed = 1;
  auto* ca = app.add_subcommand("calibrate", "Measure SNR with unit-power pilots");
  ca->add_option("--channel", cal_channel, "awgn | rayleigh")->capture_default_str();
  ca->add_option("--snr", cal_snr)->delimiter(',')->capture_default_str();
  ca->add_option("--pilots", cal_pilots)->capture_default_str();
  ca->add_option("--seed", cal_seed)->capture_default_str();

  // plot-data
  std::string plot_csv;
  std::string plot_out;
  auto* pd = app.add_subcommand("plot-data", "Write per-metric series files from a sweep CSV");
  pd->add_option("--csv", plot_csv, "Sweep CSV")->required();
  pd->add_option("--out", plot_out, "Output directory (default: $VLFSIM_OUT_DIR/plots or ./plots)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sw) return run_sweep_command(sweep);

    if (*bl) {
      const std::string text = read_file(text_file);
      const ChannelKind kind = parse_channel_kind(bl_channel);
      const CsiMode csi = parse_csi_mode(bl_csi);
      std::ostringstream csv;
      csv << "snr_db,trial,ber_pre_fec,ber_post_fec,cer,bleu\n";
      for (std::size_t s = 0; s < bl_snr.size(); ++s) {
        for (std::size_t t = 0; t < bl_trials; ++t) {
          ChannelConfig cfg{kind, bl_snr[s], csi, derive_seed(bl_seed, s, t, text_file), false};
          const auto res = baseline_pipeline(text, cfg);
          csv << bl_snr[s] << ',' << t << ',' << *res.report.ber_pre_fec << ',' << *res.report.ber_post_fec << ','
              << *res.report.cer << ',' << *res.report.bleu << '\n';
        }
      }
      if (bl_output.empty()) {
        std::cout << csv.str();
      } else {
        const fs::path out = resolve_output(bl_output, "baseline.csv");
        std::ofstream f(out, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + out.string() + "'");
        f << csv.str();
      }
      return 0;
    }

    if (*bc) {
      std::cout << "resolution  channel_uses  bcr  bcr_value\n";
      for (std::size_t r : bcr_res) {
        const ImageGeometry g{bcr_channels, r, r};
        const Rational v = compute_bcr(bcr_queries, bcr_dim, g);
        std::cout << bcr_channels << "x" << r << "x" << r << "  " << channel_uses(bcr_queries, bcr_dim) << "  "
                  << v.to_string() << "  " << fmt(v.value(), 6) << '\n';
      }
      return 0;
    }

    if (*ca) {
      const ChannelKind kind = parse_channel_kind(cal_channel);
      std::cout << "channel  configured_db  measured_db  error_db\n";
      for (double snr : cal_snr) {
        const double measured = calibrate_snr(ChannelConfig{kind, snr, CsiMode::Perfect, cal_seed, false}, cal_pilots);
        std::cout << to_string(kind) << "  " << fmt(snr, 2) << "  " << fmt(measured) << "  " << fmt(measured - snr)
                  << '\n';
      }
      return 0;
    }

    if (*pd) {
      const fs::path out = resolve_output(plot_out, "plots");
      for (const auto& p : emit_plots(plot_csv, out)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
