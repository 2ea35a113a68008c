#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "dda/align.hpp"
#include "dda/dataset.hpp"
#include "dda/error.hpp"
#include "dda/image_io.hpp"
#include "dda/metrics.hpp"
#include "support/fixtures.hpp"

namespace dda::metrics {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected dda::Error";
  return ErrorCode::kIo;
}

TEST(Mse, ClosedForms) {
  const ImageBuffer a = fixtures::noise_image(9, 7, 3, 1);
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(ImageBuffer(4, 4, 3, 0.0), ImageBuffer(4, 4, 3, 10.0)), 100.0);
  EXPECT_EQ(code_of([&] { mse(a, ImageBuffer(9, 7, 1)); }), ErrorCode::kShapeMismatch);
}

TEST(Mse, SymmetricAndQuadraticInScale) {
  const ImageBuffer a = fixtures::noise_image(12, 10, 3, 2);
  const ImageBuffer b = fixtures::noise_image(12, 10, 3, 3);
  EXPECT_EQ(mse(a, b), mse(b, a));
  for (double alpha : {0.5, 2.0, -3.0}) {
    ImageBuffer sa = a, sb = b;
    for (double& v : sa.samples()) v *= alpha;
    for (double& v : sb.samples()) v *= alpha;
    EXPECT_NEAR(mse(sa, sb), alpha * alpha * mse(a, b), 1e-9 * alpha * alpha * mse(a, b));
  }
}

TEST(Mse, MixupLaw) {
  const ImageBuffer a = fixtures::noise_image(16, 16, 3, 4);
  const ImageBuffer b = fixtures::noise_image(16, 16, 3, 5);
  for (double r : {0.25, 0.5, 0.75}) {
    EXPECT_NEAR(mse(align::pixel_mixup_float(a, b, r), a), (1 - r) * (1 - r) * mse(b, a), 1e-9 * mse(b, a));
  }
}

TEST(PairReport, IdenticalVariantIsZero) {
  const ImageBuffer real = fixtures::scene_image(32, 40, 6);
  const std::vector<LabeledImage> v = {{"same", real}};
  const auto rows = pair_report("p", real, v);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mse, 0.0);
  EXPECT_EQ(rows[0].low_rel_err, 0.0);
  EXPECT_EQ(rows[0].high_rel_err, 0.0);
  EXPECT_EQ(rows[0].hf_grid_real.values, rows[0].hf_grid_syn.values);
}

TEST(PairReport, EmptyVariants) {
  EXPECT_TRUE(pair_report("p", ImageBuffer(8, 8, 3), {}).empty());
}

TEST(PairReport, AlignedBeatsRawInHighBand) {
  const ImageBuffer source = fixtures::scene_image(64, 64, 7);
  const ImageBuffer real = jpeg::decode_jpeg(jpeg::encode_jpeg(source, 80), jpeg::DecodeColor::kNative);
  const ImageBuffer recon = fixtures::stand_in_recon(source, 8);
  const std::vector<LabeledImage> v = {{kVariantRawRecon, recon}, {kVariantFreqAligned, align::frequency_align(recon, 80)}};
  const auto rows = pair_report("p", real, v);
  EXPECT_LT(rows[1].high_rel_err, rows[0].high_rel_err);
}

TEST(PairReport, ShapeMismatch) {
  const std::vector<LabeledImage> v = {{"x", ImageBuffer(8, 16, 3)}};
  EXPECT_EQ(code_of([&] { pair_report("p", ImageBuffer(8, 8, 3), v); }), ErrorCode::kShapeMismatch);
}

TEST(PairReport, NormalizedMse) {
  ReportOptions o;
  o.normalize_mse = true;
  const std::vector<LabeledImage> v = {{"x", ImageBuffer(8, 8, 3, 255.0)}};
  EXPECT_DOUBLE_EQ(pair_report("p", ImageBuffer(8, 8, 3, 0.0), v, o)[0].mse, 1.0);
}

TEST(PairReport, OptionDomain) {
  const std::vector<LabeledImage> v = {{"x", ImageBuffer(8, 8, 3)}};
  for (double cutoff : {0.0, 1.0, -0.5, 1.5, std::nan("")}) {
    ReportOptions o;
    o.cutoff = cutoff;
    EXPECT_EQ(code_of([&] { pair_report("p", ImageBuffer(8, 8, 3), v, o); }), ErrorCode::kOutOfRange) << cutoff;
    EXPECT_EQ(code_of([&] { corpus_report(Manifest{}, ".", o); }), ErrorCode::kOutOfRange) << cutoff;
  }
}

TEST(Summary, PopulationStatistics) {
  const Summary s = summarize({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(summarize({5, 1, 3}).median, 3.0);
  EXPECT_EQ(summarize({}).mean, 0.0);
}

std::vector<PairReport> fake_rows() {
  std::vector<PairReport> rows;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "p" + std::to_string(i);
    rows.push_back({id, kVariantRawRecon, 10.0 + i, 0.1, 0.5 + i * 0.01, {}, {}, {}});
    rows.push_back({id, kVariantFreqAligned, 8.0 + i, 0.1, i == 3 ? 0.9 : 0.2, {}, {}, {}});
  }
  return rows;
}

TEST(Aggregate, OrderIndependent) {
  auto rows = fake_rows();
  const CorpusReport a = aggregate(rows, 0.5, 7);
  std::mt19937 shuffle(3);
  std::shuffle(rows.begin(), rows.end(), shuffle);
  const CorpusReport b = aggregate(rows, 0.5, 7);
  EXPECT_EQ(report_to_json(a), report_to_json(b));
  EXPECT_EQ(report_to_csv(a), report_to_csv(b));
  EXPECT_EQ(a.n_pairs, 6u);
  ASSERT_TRUE(a.fraction_high_improved);
  EXPECT_DOUBLE_EQ(*a.fraction_high_improved, 5.0 / 6.0);
  ASSERT_EQ(a.variants.size(), 2u);
  EXPECT_EQ(a.variants[0].variant, kVariantFreqAligned);
  EXPECT_EQ(a.variants[0].count, 6u);
}

TEST(Aggregate, Serialization) {
  auto rows = fake_rows();
  rows[0].high_rel_err = std::numeric_limits<double>::infinity();
  rows[0].qf_estimate = jpeg::QualityEstimate{85, 0, true};
  const CorpusReport r = aggregate(rows, 0.5, 11);
  const std::string csv = report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "pair_id,variant,mse,low_rel_err,high_rel_err,qf_estimate,qf_exact");
  EXPECT_NE(csv.find("p0,raw-recon,10,0.1,inf,85,true"), std::string::npos);
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["config"]["cutoff"], 0.5);
  EXPECT_EQ(j["config"]["seed"], 11);
  EXPECT_EQ(j["config"]["toolkit_version"], std::string(kToolkitVersion));
  EXPECT_EQ(j["rows"].size(), 12u);
}

TEST(CorpusReport, IdenticalPairsAreZero) {
  const fs::path root = fixtures::scratch_dir("metrics_identical");
  std::vector<dataset::InputPair> pairs;
  for (int i = 0; i < 4; ++i) {
    const ImageBuffer img = fixtures::scene_image(40, 48, 20 + i);
    const std::string id = "s" + std::to_string(i);
    save_png(root / "real" / (id + ".png"), img);
    save_png(root / "recon" / (id + ".png"), img);
    pairs.push_back({id, root / "real" / (id + ".png"), root / "recon" / (id + ".png")});
  }
  dataset::BuildOptions o;
  o.config.p_freq = 0;
  o.config.p_pixel = 0;
  o.config.freq_fallback_mode = align::FreqFallbackMode::kSkip;
  const Manifest m = dataset::build_dataset(pairs, o, root / "out");
  const CorpusReport r = corpus_report(m, root / "out");
  EXPECT_EQ(r.n_pairs, 4u);
  EXPECT_EQ(r.skipped, 0u);
  for (const auto& v : r.variants) {
    EXPECT_EQ(v.mse.mean, 0.0) << v.variant;
    EXPECT_EQ(v.low_rel_err.mean, 0.0);
    EXPECT_EQ(v.high_rel_err.mean, 0.0);
    EXPECT_GE(v.mse.std, 0.0);
  }
}

TEST(CorpusReport, MissingFileIsSkipped) {
  const fs::path root = fixtures::scratch_dir("metrics_missing");
  const auto corpus = fixtures::write_corpus(root, 5, 9);
  std::vector<dataset::InputPair> pairs;
  for (const auto& c : corpus) pairs.push_back({c.id, c.real, c.recon});
  const Manifest m = dataset::build_dataset(pairs, {}, root / "out");
  fs::remove(root / "out" / "syn" / "img002.png");
  const CorpusReport r = corpus_report(m, root / "out");
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.n_pairs, 4u);
  ASSERT_EQ(r.skip_messages.size(), 1u);
  EXPECT_EQ(r.skip_messages[0].rfind("img002", 0), 0u);
}

TEST(CorpusReport, FrequencyAlignmentImprovesHighBand) {
  const fs::path root = fixtures::scratch_dir("metrics_direction");
  std::vector<dataset::InputPair> pairs;
  for (int i = 0; i < 6; ++i) {
    const ImageBuffer source = fixtures::scene_image(64, 72, 40 + i);
    const std::string id = "d" + std::to_string(i);
    write_file(root / "real" / (id + ".jpg"), jpeg::encode_jpeg(source, 75 + 3 * i));
    save_png(root / "recon" / (id + ".png"), fixtures::stand_in_recon(source, 50 + i));
    pairs.push_back({id, root / "real" / (id + ".jpg"), root / "recon" / (id + ".png")});
  }
  const Manifest m = dataset::build_dataset(pairs, {}, root / "out");
  const CorpusReport r = corpus_report(m, root / "out");
  ASSERT_TRUE(r.fraction_high_improved);
  EXPECT_EQ(*r.fraction_high_improved, 1.0);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.qf_estimate);
    EXPECT_TRUE(row.qf_estimate->exact);
  }
}

}  // namespace
}  // namespace dda::metrics
