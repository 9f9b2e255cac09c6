#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "vlfsim/errors.hpp"
#include "vlfsim/harness.hpp"
#include "vlfsim/image_io.hpp"
#include "vlfsim/rng.hpp"

using namespace vlfsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vlfsim_harness_" + std::to_string(rng::draw(::getpid(), 0, counter()++)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static std::uint64_t& counter() {
    static std::uint64_t c = 0;
    return c;
  }
};

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.snr_list = {-5.0, 0.0, 10.0};
  cfg.trials_per_snr = 3;
  cfg.base_seed = 5;
  cfg.features = {4, 16};
  cfg.text_dim = 8;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> header_of(const std::string& csv) {
  std::vector<std::string> cols;
  std::istringstream line(csv.substr(0, csv.find('\n')));
  std::string c;
  while (std::getline(line, c, ',')) cols.push_back(c);
  return cols;
}

}  // namespace

TEST_CASE("default SNR grid") {
  CHECK(default_snr_list() == std::vector<double>{-5.0, -2.5, 0.0, 2.5, 5.0, 7.5, 10.0});
  CHECK(SweepConfig{}.trials_per_snr == 200);
}

TEST_CASE("config validation") {
  SweepConfig cfg = small_config();
  cfg.snr_list.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.trials_per_snr = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.pipelines.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_pipeline("semantic") == Pipeline::Semantic);
  CHECK_THROWS_AS(parse_pipeline("analog"), ConfigError);
}

TEST_CASE("seed derivation") {
  const auto s = derive_seed(1, 0, 0, "img.ppm");
  CHECK(s == derive_seed(1, 0, 0, "img.ppm"));
  std::set<std::uint64_t> distinct{s, derive_seed(2, 0, 0, "img.ppm"), derive_seed(1, 1, 0, "img.ppm"),
                                   derive_seed(1, 0, 1, "img.ppm"), derive_seed(1, 0, 0, "img2.ppm")};
  CHECK(distinct.size() == 5);
}

TEST_CASE("sweep rows, pairing and replay") {
  const Dataset ds = synthetic_dataset(3, {3, 8, 8}, 4);
  const SweepConfig cfg = small_config();
  const SweepResult a = run_sweep(cfg, ds);
  CHECK(a.ok());
  CHECK(a.rows.size() == 2 * 3 * 3 * 3);

  SUBCASE("replay is byte-identical") {
    CHECK(run_sweep(cfg, ds).csv == a.csv);
  }

  SUBCASE("semantic and baseline rows share the channel seed") {
    for (std::size_t i = 0; i + 1 < a.rows.size(); i += 2) {
      CHECK(a.rows[i].pipeline == "semantic");
      CHECK(a.rows[i + 1].pipeline == "baseline");
      CHECK(a.rows[i].seed == a.rows[i + 1].seed);
      CHECK(a.rows[i].seed == derive_seed(cfg.base_seed, a.rows[i].snr_index, a.rows[i].trial, a.rows[i].input_id));
    }
  }

  SUBCASE("paired seeds reuse draws across SNR points") {
    SweepConfig paired = cfg;
    paired.paired_snr_seeds = true;
    const SweepResult p = run_sweep(paired, ds);
    for (const auto& r : p.rows) CHECK(r.seed == derive_seed(cfg.base_seed, 0, r.trial, r.input_id));
  }

  SUBCASE("metrics populate by pipeline") {
    for (const auto& r : a.rows) {
      CHECK(r.status == "ok");
      if (r.pipeline == "semantic") {
        CHECK(r.feature_cosine.has_value());
        CHECK(r.psnr_db.has_value());
        CHECK(r.label_correct.has_value());
        CHECK_FALSE(r.ber_pre_fec.has_value());
      } else {
        CHECK(r.ber_post_fec.has_value());
        CHECK(r.bleu.has_value());
        CHECK_FALSE(r.feature_mse.has_value());
      }
    }
  }

  SUBCASE("summary mentions each pipeline") {
    CHECK(a.summary.find("semantic") != std::string::npos);
    CHECK(a.summary.find("baseline") != std::string::npos);
  }
}

TEST_CASE("CSV columns with and without external scorers") {
  const Dataset ds = synthetic_dataset(1, {3, 8, 8}, 1);
  SweepConfig cfg = small_config();
  cfg.snr_list = {0.0};
  cfg.trials_per_snr = 1;
  const std::vector<std::string> core{"schema", "pipeline", "snr_db", "trial", "input", "seed",
                                      "feature_mse", "feature_cosine", "image_mse", "psnr_db",
                                      "label_correct", "confidence", "bleu", "ber_pre_fec",
                                      "ber_post_fec", "cer", "erasures", "status"};
  CHECK(header_of(run_sweep(cfg, ds).csv) == core);

  MetricRegistry reg;
  reg.register_metric("clip_score", [](const TrialArtifacts& a) {
    if (a.pipeline != "semantic") throw std::runtime_error("not applicable");
    return 0.5;
  });
  const SweepResult r = run_sweep(cfg, ds, {&reg, nullptr});
  auto with = core;
  with.push_back("clip_score");
  CHECK(header_of(r.csv) == with);
  for (const auto& row : r.rows) {
    REQUIRE(row.external.size() == 1);
    if (row.pipeline == "semantic") {
      CHECK(*row.external[0].second == 0.5);
    } else {
      CHECK(row.status == "metric_failed");
    }
  }
  CHECK(r.ok());  // a failed metric does not fail the trial
}

TEST_CASE("unreadable inputs are skipped with a warning") {
  TempDir dir;
  write_ppm(dir.path / "good.ppm", synthetic_dataset(1, {3, 8, 8}, 2).items[0].image.value());
  std::ofstream(dir.path / "broken.ppm") << "P6\n8 8\n255\nxx";
  const Dataset ds = load_dataset(dir.path, std::nullopt);
  CHECK(ds.items.size() == 1);
  CHECK(ds.skipped == 1);
  REQUIRE(ds.warnings.size() == 1);
  CHECK(ds.warnings[0].find("broken.ppm") != std::string::npos);

  SweepConfig cfg = small_config();
  cfg.trials_per_snr = 1;
  const SweepResult r = run_sweep(cfg, ds);
  CHECK_FALSE(r.ok());
  CHECK(r.skipped_inputs == 1);
  CHECK(r.rows.size() == 2 * 3);
}

TEST_CASE("captions and text lists") {
  TempDir dir;
  write_ppm(dir.path / "red_circle.ppm", synthetic_dataset(1, {3, 8, 8}, 2).items[0].image.value());
  write_ppm(dir.path / "b.ppm", synthetic_dataset(1, {3, 8, 8}, 3).items[0].image.value());
  std::ofstream(dir.path / "captions.tsv") << "b.ppm\ta blue thing\n";
  std::ofstream(dir.path / "texts.txt") << "first line\n\n  \nsecond line\n";
  const Dataset ds = load_dataset(dir.path, dir.path / "texts.txt");
  REQUIRE(ds.items.size() == 4);
  CHECK(ds.items[0].caption == "a blue thing");
  CHECK(ds.items[1].caption == "red circle");
  CHECK(ds.items[2].caption == "first line");
  CHECK_FALSE(ds.items[2].image.has_value());
  CHECK(ds.items[3].caption == "second line");
}

TEST_CASE("unwritable output fails before any work") {
  const Dataset ds = synthetic_dataset(1, {3, 8, 8}, 1);
  SweepConfig cfg = small_config();
  cfg.output = "/nonexistent-dir/for/sure/out.csv";
  CHECK_THROWS_AS(run_sweep(cfg, ds), ConfigError);
}

TEST_CASE("plot data emission") {
  TempDir dir;
  const Dataset ds = synthetic_dataset(2, {3, 8, 8}, 1);
  SweepConfig cfg = small_config();
  cfg.output = dir.path / "sweep.csv";
  run_sweep(cfg, ds);

  SUBCASE("one file per pipeline and metric") {
    const auto files = emit_plots(cfg.output, dir.path / "plots");
    std::set<std::string> names;
    for (const auto& f : files) names.insert(f.filename().string());
    CHECK(names.contains("semantic.feature_cosine.dat"));
    CHECK(names.contains("baseline.ber_post_fec.dat"));
    CHECK_FALSE(names.contains("semantic.ber_post_fec.dat"));
    const std::string body = slurp(dir.path / "plots" / "semantic.psnr_db.dat");
    std::istringstream lines(body);
    std::string line;
    int data_lines = 0;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      ++data_lines;
      std::istringstream fields(line);
      double snr, mean, se;
      std::size_t n;
      REQUIRE(static_cast<bool>(fields >> snr >> mean >> se >> n));
      CHECK(n == 2 * cfg.trials_per_snr);
    }
    CHECK(data_lines == 3);
  }

  SUBCASE("empty CSV") {
    std::ofstream(dir.path / "empty.csv").close();
    CHECK_THROWS_AS(emit_plots(dir.path / "empty.csv", dir.path / "p1"), DataError);
    CHECK_FALSE(fs::exists(dir.path / "p1"));
  }

  SUBCASE("schema mismatch") {
    std::string body = slurp(cfg.output);
    const auto second = body.find('\n') + 1;
    body.replace(second, 1, "2");
    std::ofstream(dir.path / "v2.csv") << body;
    CHECK_THROWS_AS(emit_plots(dir.path / "v2.csv", dir.path / "p2"), VersionError);
    CHECK_FALSE(fs::exists(dir.path / "p2"));

    std::ofstream(dir.path / "noschema.csv") << "pipeline,snr_db\nsemantic,0\n";
    CHECK_THROWS_AS(emit_plots(dir.path / "noschema.csv", dir.path / "p3"), VersionError);
  }
}
