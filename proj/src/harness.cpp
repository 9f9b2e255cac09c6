#include "vlfsim/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>

#include "vlfsim/digital_baseline.hpp"
#include "vlfsim/errors.hpp"
#include "vlfsim/image_io.hpp"
#include "vlfsim/rng.hpp"

#include "vlfsim/bridge.hpp"

namespace vlfsim {

namespace {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

struct NamedMetric {
  const char* name;
  std::optional<double> LinkTrialReport::*field;
};

constexpr std::array<NamedMetric, 10> kCoreMetrics{{
    {"feature_mse", &LinkTrialReport::feature_mse},
    {"feature_cosine", &LinkTrialReport::feature_cosine},
    {"image_mse", &LinkTrialReport::image_mse},
    {"psnr_db", &LinkTrialReport::psnr_db},
    {"label_correct", &LinkTrialReport::label_correct},
    {"confidence", &LinkTrialReport::confidence},
    {"bleu", &LinkTrialReport::bleu},
    {"ber_pre_fec", &LinkTrialReport::ber_pre_fec},
    {"ber_post_fec", &LinkTrialReport::ber_post_fec},
    {"cer", &LinkTrialReport::cer},
}};

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stderr_() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

std::string caption_from_stem(std::string stem) {
  std::ranges::replace(stem, '_', ' ');
  std::ranges::replace(stem, '-', ' ');
  return stem;
}

bool is_raster_name(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".ff" || ext == ".farbfeld";
}

// Owns whatever codec objects the sweep needs and routes each image to one.
class CodecRouter {
 public:
  CodecRouter(const SweepConfig& cfg, const SweepHooks& hooks, const Dataset& inputs,
              std::vector<std::string>& warnings) {
    if (hooks.codec) {
      shared_ = hooks.codec;
      return;
    }
    if (cfg.codec == "bridge") {
      if (cfg.bridge_command.empty()) throw ConfigError("codec 'bridge' needs bridge_command");
      shared_ = std::make_shared<bridge::BridgeCodec>(std::make_unique<bridge::Subprocess>(cfg.bridge_command),
                                                      cfg.features);
      return;
    }
    if (cfg.codec != "toy") throw ConfigError("unknown codec '" + cfg.codec + "'");
    bank_ = std::make_shared<LabelBank>(cfg.features, cfg.text_dim, cfg.codec_seed);
    for (const auto& item : inputs.items) {
      if (!item.image || toy_.contains(item.image->geometry)) continue;
      const ImageGeometry g = item.image->geometry;
      try {
        toy_.emplace(g, std::make_shared<ToyProjectionCodec>(ToyCodecOptions{cfg.features, g, cfg.codec_seed,
                                                                             cfg.text_dim},
                                                             bank_));
      } catch (const Error& e) {
        warnings.push_back("no toy projection for " + std::to_string(g.channels) + "x" + std::to_string(g.height) +
                           "x" + std::to_string(g.width) + ": " + e.what());
        toy_.emplace(g, nullptr);
      }
    }
  }

  const SemanticCodec* for_image(const ImageGeometry& g) const {
    if (shared_) return shared_.get();
    auto it = toy_.find(g);
    return it == toy_.end() ? nullptr : it->second.get();
  }

  LabelBank* bank() const { return bank_.get(); }

  bool concurrent() const { return shared_ ? shared_->concurrent() : true; }

 private:
  std::shared_ptr<const SemanticCodec> shared_;
  std::shared_ptr<LabelBank> bank_;
  std::map<ImageGeometry, std::shared_ptr<ToyProjectionCodec>> toy_;
};

struct PreparedItem {
  const SemanticCodec* codec = nullptr;
  std::optional<FeatureFrame> frame;
  std::string error;
};

LinkTrialReport semantic_trial(const DatasetItem& item, const PreparedItem& prep, const SweepConfig& cfg,
                               const ChannelConfig& channel, const MetricRegistry* metrics) {
  LinkTrialReport r;
  if (!prep.frame) throw DataError(prep.error.empty() ? "input has no feature frame" : prep.error);
  const FeatureFrame& sent = *prep.frame;

  const PackedFrame packed = pack_features(sent, cfg.target_power);
  const ReceivedFrame rx = transmit(packed.symbols, channel);
  const EqualizedFrame eq = recover(rx);
  const FeatureFrame received = unpack_features(eq.frame, packed.record);

  r.erasures = eq.erasures;
  r.feature_mse = feature_mse(sent, received);
  try {
    r.feature_cosine = feature_cosine(sent, received);
  } catch (const DegenerateFrameError&) {
    r.feature_cosine = 0.0;
  }

  const Image reconstructed = prep.codec->decode_image(received);
  if (reconstructed.geometry == item.image->geometry) {
    r.image_mse = image_mse(*item.image, reconstructed);
    r.psnr_db = psnr_db(*r.image_mse);
  }

  const DecodedText text = prep.codec->decode_text(received);
  r.label_correct = text.text == item.caption ? 1.0 : 0.0;
  r.confidence = text.confidence;
  r.bleu = bleu(text.text, item.caption);

  if (metrics && !metrics->empty()) {
    TrialArtifacts art;
    art.pipeline = "semantic";
    art.reference_text = &item.caption;
    art.received_text = &text.text;
    art.source_image = &*item.image;
    art.received_image = &reconstructed;
    art.sent_frame = &sent;
    art.received_frame = &received;
    metrics->evaluate(art, r);
  }
  return r;
}

LinkTrialReport baseline_trial(const DatasetItem& item, const ChannelConfig& channel,
                               const MetricRegistry* metrics) {
  BaselineResult res = baseline_pipeline(item.caption, channel);
  if (metrics && !metrics->empty()) {
    TrialArtifacts art;
    art.pipeline = "baseline";
    art.reference_text = &item.caption;
    art.received_text = &res.received_text;
    metrics->evaluate(art, res.report);
  }
  return std::move(res.report);
}

void fill_empty_external(LinkTrialReport& r, const MetricRegistry* metrics) {
  if (!metrics || !r.external.empty()) return;
  for (const auto& name : metrics->names()) r.external.emplace_back(name, std::nullopt);
}

}  // namespace

std::string to_string(Pipeline p) { return p == Pipeline::Semantic ? "semantic" : "baseline"; }

Pipeline parse_pipeline(std::string_view text) {
  if (text == "semantic") return Pipeline::Semantic;
  if (text == "baseline") return Pipeline::Baseline;
  throw ConfigError("unknown pipeline '" + std::string(text) + "'");
}

std::vector<double> default_snr_list() {
  std::vector<double> out;
  for (int i = 0; i <= 6; ++i) out.push_back(-5.0 + 2.5 * i);
  return out;
}

void SweepConfig::validate() const {
  if (snr_list.empty()) throw ConfigError("snr_list must not be empty");
  for (double s : snr_list) {
    if (!std::isfinite(s)) throw ConfigError("snr values must be finite");
  }
  if (trials_per_snr == 0) throw ConfigError("trials must be at least 1");
  if (pipelines.empty()) throw ConfigError("at least one pipeline is required");
  if (!(target_power > 0.0)) throw ConfigError("target power must be positive");
}

Dataset load_dataset(const std::optional<std::filesystem::path>& image_dir,
                     const std::optional<std::filesystem::path>& text_file) {
  namespace fs = std::filesystem;
  Dataset ds;
  if (image_dir) {
    std::error_code ec;
    if (!fs::is_directory(*image_dir, ec)) {
      ds.warnings.push_back("image directory '" + image_dir->string() + "' is not readable");
      ++ds.skipped;
    } else {
      std::map<std::string, std::string> captions;
      if (std::ifstream tsv(*image_dir / "captions.tsv"); tsv) {
        std::string line;
        while (std::getline(tsv, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          const auto tab = line.find('\t');
          if (tab == std::string::npos) continue;
          captions[line.substr(0, tab)] = line.substr(tab + 1);
        }
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(*image_dir, ec)) {
        if (entry.is_regular_file() && is_raster_name(entry.path())) files.push_back(entry.path());
      }
      std::ranges::sort(files);
      for (const auto& path : files) {
        DatasetItem item;
        item.id = path.filename().string();
        try {
          item.image = read_image(path);
        } catch (const Error& e) {
          ds.warnings.push_back(std::string("skipping unreadable input: ") + e.what());
          ++ds.skipped;
          continue;
        }
        if (auto it = captions.find(item.id); it != captions.end()) {
          item.caption = it->second;
        } else if (auto it2 = captions.find(path.stem().string()); it2 != captions.end()) {
          item.caption = it2->second;
        } else {
          item.caption = caption_from_stem(path.stem().string());
        }
        ds.items.push_back(std::move(item));
      }
    }
  }
  if (text_file) {
    std::ifstream in(*text_file);
    if (!in) {
      ds.warnings.push_back("text list '" + text_file->string() + "' is not readable");
      ++ds.skipped;
    } else {
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ds.items.push_back(DatasetItem{"text:" + std::to_string(lineno), std::nullopt, line});
      }
    }
  }
  return ds;
}

Dataset synthetic_dataset(std::size_t count, const ImageGeometry& geometry, std::uint64_t seed) {
  struct Colour {
    const char* name;
    std::array<double, 3> rgb;
  };
  static constexpr std::array<Colour, 8> kPalette{{
      {"red", {0.9, 0.1, 0.1}},
      {"green", {0.1, 0.75, 0.2}},
      {"blue", {0.15, 0.2, 0.9}},
      {"yellow", {0.95, 0.9, 0.1}},
      {"white", {0.97, 0.97, 0.97}},
      {"black", {0.05, 0.05, 0.05}},
      {"orange", {0.95, 0.55, 0.1}},
      {"purple", {0.55, 0.15, 0.7}},
  }};
  static constexpr std::array<const char*, 4> kShapes{"square", "circle", "triangle", "stripe"};
  constexpr std::uint64_t kStream = 0x53594e54ULL;

  if (geometry.values() == 0) throw GeometryError("synthetic images need a positive geometry");
  Dataset ds;
  const std::size_t plane = geometry.pixels();
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s = rng::combine(seed, i);
    const std::size_t bg = rng::draw(s, kStream, 0) % kPalette.size();
    std::size_t fg = rng::draw(s, kStream, 1) % (kPalette.size() - 1);
    if (fg >= bg) ++fg;
    const std::size_t shape = rng::draw(s, kStream, 2) % kShapes.size();
    const double cx = 0.3 + 0.4 * rng::uniform_open(rng::draw(s, kStream, 3));
    const double cy = 0.3 + 0.4 * rng::uniform_open(rng::draw(s, kStream, 4));
    const double radius = 0.15 + 0.15 * rng::uniform_open(rng::draw(s, kStream, 5));

    Image img{geometry, std::vector<double>(geometry.values())};
    for (std::size_t y = 0; y < geometry.height; ++y) {
      for (std::size_t x = 0; x < geometry.width; ++x) {
        const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(geometry.width) - cx;
        const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(geometry.height) - cy;
        bool inside = false;
        switch (shape) {
          case 0: inside = std::abs(u) < radius && std::abs(v) < radius; break;
          case 1: inside = u * u + v * v < radius * radius; break;
          case 2: inside = v < radius && v > -radius && std::abs(u) < (v + radius) / 2.0; break;
          default: inside = std::abs(u + v) < radius / 2.0; break;
        }
        const auto& rgb = kPalette[inside ? fg : bg].rgb;
        const std::size_t p = y * geometry.width + x;
        for (std::size_t c = 0; c < geometry.channels; ++c) {
          const double texture = 0.04 * (rng::uniform_open(rng::draw(s, kStream + 1, c * plane + p)) - 0.5);
          img.values[c * plane + p] = std::clamp(rgb[c % 3] + texture, 0.0, 1.0);
        }
      }
    }
    std::string caption = std::string("a ") + kPalette[fg].name + " " + kShapes[shape] + " on a " +
                          kPalette[bg].name + " background";
    ds.items.push_back(DatasetItem{"synthetic-" + std::to_string(i), std::move(img), std::move(caption)});
  }
  return ds;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t snr_index, std::size_t trial,
                          std::string_view input_id) {
  std::uint64_t s = rng::combine(base_seed, snr_index);
  s = rng::combine(s, trial);
  return rng::combine(s, rng::hash_string(input_id));
}

SweepResult run_sweep(const SweepConfig& cfg, const Dataset& inputs, const SweepHooks& hooks) {
  cfg.validate();
  SweepResult result;
  result.warnings = inputs.warnings;
  result.skipped_inputs = inputs.skipped;

  std::ofstream sink;
  if (!cfg.output.empty()) {
    sink.open(cfg.output, std::ios::binary | std::ios::trunc);
    if (!sink) throw ConfigError("cannot write output '" + cfg.output.string() + "'");
  }

  const bool want_semantic = std::ranges::find(cfg.pipelines, Pipeline::Semantic) != cfg.pipelines.end();
  const bool want_baseline = std::ranges::find(cfg.pipelines, Pipeline::Baseline) != cfg.pipelines.end();

  std::vector<PreparedItem> prepared(inputs.items.size());
  std::optional<CodecRouter> router;
  if (want_semantic) {
    router.emplace(cfg, hooks, inputs, result.warnings);
    for (std::size_t i = 0; i < inputs.items.size(); ++i) {
      const auto& item = inputs.items[i];
      if (!item.image) continue;
      PreparedItem& prep = prepared[i];
      prep.codec = router->for_image(item.image->geometry);
      if (!prep.codec) {
        result.warnings.push_back("no codec for input '" + item.id + "'");
        ++result.skipped_inputs;
        continue;
      }
      try {
        prep.frame = prep.codec->encode(*item.image);
        if (LabelBank* bank = router->bank()) bank->add(item.caption, *prep.frame);
      } catch (const Error& e) {
        prep.error = item.id + ": " + e.what();
      }
    }
  }

  const std::size_t n_snr = cfg.snr_list.size();
  const std::size_t n_trials = cfg.trials_per_snr;
  const std::size_t n_items = inputs.items.size();
  const std::size_t n_tasks = n_snr * n_trials * n_items;
  std::vector<std::optional<LinkTrialReport>> slots(2 * n_tasks);
  std::vector<std::string> errors(2 * n_tasks);

  const bool concurrent = !router || router->concurrent();
  const auto tasks = static_cast<std::ptrdiff_t>(n_tasks);
#pragma omp parallel for schedule(dynamic, 4) if (concurrent)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const auto task = static_cast<std::size_t>(t);
    const std::size_t item_idx = task % n_items;
    const std::size_t trial = (task / n_items) % n_trials;
    const std::size_t snr_idx = task / (n_items * n_trials);
    const DatasetItem& item = inputs.items[item_idx];

    ChannelConfig channel;
    channel.kind = cfg.channel;
    channel.csi = cfg.csi;
    channel.snr_db = cfg.snr_list[snr_idx];
    channel.seed = derive_seed(cfg.base_seed, cfg.paired_snr_seeds ? 0 : snr_idx, trial, item.id);

    auto run = [&](std::size_t slot, Pipeline pipeline, auto&& body) {
      LinkTrialReport r;
      try {
        r = body();
      } catch (const std::exception& e) {
        r = LinkTrialReport{};
        r.status = "failed";
        errors[slot] = item.id + " @ " + format_number(channel.snr_db) + " dB, trial " + std::to_string(trial) +
                       ": " + e.what();
      }
      r.pipeline = to_string(pipeline);
      r.snr_db = channel.snr_db;
      r.snr_index = snr_idx;
      r.trial = trial;
      r.input_id = item.id;
      r.seed = channel.seed;
      fill_empty_external(r, hooks.metrics);
      slots[slot] = std::move(r);
    };

    if (want_semantic && item.image) {
      run(2 * task, Pipeline::Semantic,
          [&] { return semantic_trial(item, prepared[item_idx], cfg, channel, hooks.metrics); });
    }
    if (want_baseline && !item.caption.empty()) {
      run(2 * task + 1, Pipeline::Baseline, [&] { return baseline_trial(item, channel, hooks.metrics); });
    }
  }

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) continue;
    if (slots[i]->status == "failed") {
      ++result.failed_trials;
      result.warnings.push_back(errors[i]);
    }
    result.rows.push_back(std::move(*slots[i]));
  }

  const std::vector<std::string> ext_names = hooks.metrics ? hooks.metrics->names() : std::vector<std::string>{};
  result.csv = render_csv(result.rows, ext_names);
  result.summary = render_summary(result.rows);
  if (sink.is_open()) {
    sink << result.csv;
    sink.flush();
    if (!sink) throw ConfigError("failed writing output '" + cfg.output.string() + "'");
  }
  return result;
}

std::string render_csv(const std::vector<LinkTrialReport>& rows, const std::vector<std::string>& external_names) {
  std::ostringstream out;
  out << "schema,pipeline,snr_db,trial,input,seed";
  for (const auto& m : kCoreMetrics) out << ',' << m.name;
  out << ",erasures,status";
  for (const auto& name : external_names) out << ',' << csv_field(name);
  out << '\n';
  for (const auto& r : rows) {
    out << kCsvSchemaVersion << ',' << r.pipeline << ',' << format_number(r.snr_db) << ',' << r.trial << ','
        << csv_field(r.input_id) << ',' << r.seed;
    for (const auto& m : kCoreMetrics) out << ',' << optional_field(r.*(m.field));
    out << ',' << r.erasures << ',' << r.status;
    for (const auto& name : external_names) {
      std::optional<double> v;
      for (const auto& [n, value] : r.external) {
        if (n == name) v = value;
      }
      out << ',' << optional_field(v);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_summary(const std::vector<LinkTrialReport>& rows) {
  // (pipeline, snr_index) -> metric -> moments, keeping the SNR value alongside.
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::map<std::string, Moments>>> groups;
  for (const auto& r : rows) {
    auto& [snr, metrics] = groups[{r.pipeline, r.snr_index}];
    snr = r.snr_db;
    for (const auto& m : kCoreMetrics) {
      if (const auto& v = r.*(m.field)) metrics[m.name].add(*v);
    }
    for (const auto& [name, v] : r.external) {
      if (v) metrics[name].add(*v);
    }
  }
  std::ostringstream out;
  out << "pipeline  snr_db  metric  mean  stderr  n\n";
  char buf[160];
  for (const auto& [key, group] : groups) {
    for (const auto& [metric, mom] : group.second) {
      std::snprintf(buf, sizeof buf, "%-9s %7.2f  %-15s %.6f +/- %.6f  (n=%zu)\n", key.first.c_str(), group.first,
                    metric.c_str(), mom.mean(), mom.stderr_(), mom.n);
      out << buf;
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv_path,
                                              const std::filesystem::path& out_dir) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + csv_path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DataError("CSV '" + csv_path.string() + "' is empty");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "schema") throw VersionError("CSV has no schema column");

  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw VersionError("CSV lacks column '" + std::string(name) + "'");
  };
  const std::size_t pipeline_col = column("pipeline");
  const std::size_t snr_col = column("snr_db");
  static const std::array<std::string_view, 7> kNonMetric{"schema", "pipeline", "snr_db", "trial",
                                                          "input",  "seed",     "status"};
  std::vector<std::size_t> metric_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::ranges::find(kNonMetric, header[i]) == kNonMetric.end()) metric_cols.push_back(i);
  }

  // (pipeline, metric) -> snr -> moments; std::map keeps the SNR axis sorted.
  std::map<std::pair<std::string, std::string>, std::map<double, Moments>> series;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw DataError("CSV row has " + std::to_string(fields.size()) + " fields");
    if (fields[0] != kCsvSchemaVersion) throw VersionError("CSV schema version '" + fields[0] + "' is not supported");
    ++data_rows;
    const double snr = std::stod(fields[snr_col]);
    for (std::size_t c : metric_cols) {
      if (fields[c].empty()) continue;
      series[{fields[pipeline_col], header[c]}][snr].add(std::stod(fields[c]));
    }
  }
  if (data_rows == 0) throw DataError("CSV '" + csv_path.string() + "' has no data rows");

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [key, points] : series) {
    const auto path = out_dir / (key.first + "." + key.second + ".dat");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << "# snr_db mean stderr n\n";
    for (const auto& [snr, mom] : points) {
      out << format_number(snr) << ' ' << format_number(mom.mean()) << ' ' << format_number(mom.stderr_()) << ' '
          << mom.n << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace vlfsim
