#include "crosscooc/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "crosscooc/models.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ccooc;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "ccooc_harness_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

// Small dataset tree with deterministic image content.
fs::path make_dataset(const std::string& leaf, int per_class, int size) {
  const fs::path root = fresh_dir(leaf);
  SynthConfig cfg;
  cfg.per_class = per_class;
  cfg.size = size;
  cfg.seed = 11;
  generate_synthetic_dataset(root.string(), cfg);
  return root;
}

// Constant-output scorer: zero weights so the sigmoid sees only the bias.
// bias > 0 classifies everything as gan, bias < 0 as real.
Network<float> bias_net(int planes, float bias) {
  NetworkSpec spec;
  spec.input_planes = planes;
  spec.input_size = kCoocBins;
  spec.layers = {{LayerKind::kFlatten}, {LayerKind::kDense, 0, 0, 1},
                 {LayerKind::kSigmoid}};
  Network<float> net(spec);
  for (TensorT<float>* p : net.parameters())
    std::fill(p->data.begin(), p->data.end(), 0.0f);
  net.parameters().back()->data[0] = bias;
  return net;
}

FeatureTensor flat_tensor(int planes, float fill) {
  FeatureTensor t;
  t.plane_count = planes;
  t.data.assign(std::size_t(planes) * kCoocCells, fill);
  return t;
}

}  // namespace

TEST(Ingest, SortsEntriesAndSkipsNonImages) {
  const fs::path root = fresh_dir("ingest_sorted");
  fs::create_directories(root / "real");
  fs::create_directories(root / "gan");
  const RgbImage img(4, 4);
  save_image(img, (root / "real" / "b.png").string(), ImageFormat::kPng);
  save_image(img, (root / "real" / "a.ppm").string(), ImageFormat::kPpm);
  save_image(img, (root / "gan" / "z.png").string(), ImageFormat::kPng);
  write_text(root / "real" / "notes.txt", "not an image");

  const DatasetManifest m = ingest(root.string());
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].path, "gan/z.png");
  EXPECT_EQ(m.entries[0].label, kLabelGan);
  EXPECT_EQ(m.entries[1].path, "real/a.ppm");
  EXPECT_EQ(m.entries[1].label, kLabelReal);
  EXPECT_EQ(m.entries[2].path, "real/b.png");
  EXPECT_EQ(m.count(kLabelReal), 2);
  EXPECT_EQ(m.count(kLabelGan), 1);
  EXPECT_EQ(m.full_path(0), (root / "gan" / "z.png").string());
}

TEST(Ingest, MissingClassDirectoryFaults) {
  const fs::path root = fresh_dir("ingest_missing");
  fs::create_directories(root / "real");
  save_image(RgbImage(4, 4), (root / "real" / "a.png").string(),
             ImageFormat::kPng);
  try {
    ingest(root.string());
    FAIL() << "expected a fault for the absent gan/ directory";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMissingClassDir);
  }
}

TEST(Ingest, ClassWithNoImagesFaults) {
  const fs::path root = fresh_dir("ingest_empty");
  fs::create_directories(root / "real");
  fs::create_directories(root / "gan");
  save_image(RgbImage(4, 4), (root / "real" / "a.png").string(),
             ImageFormat::kPng);
  write_text(root / "gan" / "readme.md", "empty on purpose");
  try {
    ingest(root.string());
    FAIL() << "expected a fault for a class with no usable images";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyClass);
  }
}

TEST(Split, StratifiedCountsAndDisjointness) {
  DatasetManifest m;
  m.root = "unused";
  for (int i = 0; i < 10; ++i)
    m.entries.push_back({"real/r" + std::to_string(i), kLabelReal});
  for (int i = 0; i < 10; ++i)
    m.entries.push_back({"gan/g" + std::to_string(i), kLabelGan});

  SplitSpec spec;  // 0.6 / 0.2 / 0.2
  spec.seed = 3;
  const SplitResult r = split(m, spec);
  EXPECT_EQ(r.train.count(kLabelReal), 6);
  EXPECT_EQ(r.train.count(kLabelGan), 6);
  EXPECT_EQ(r.val.count(kLabelReal), 2);
  EXPECT_EQ(r.val.count(kLabelGan), 2);
  EXPECT_EQ(r.test.count(kLabelReal), 2);
  EXPECT_EQ(r.test.count(kLabelGan), 2);

  std::set<std::string> seen;
  for (const DatasetManifest* part : {&r.train, &r.val, &r.test}) {
    EXPECT_TRUE(std::is_sorted(part->entries.begin(), part->entries.end(),
                               [](const DatasetEntry& a, const DatasetEntry& b) {
                                 return a.path < b.path;
                               }));
    for (const auto& e : part->entries) EXPECT_TRUE(seen.insert(e.path).second);
  }
  EXPECT_EQ(seen.size(), m.entries.size());
}

TEST(Split, SeedControlsMembershipDeterministically) {
  DatasetManifest m;
  for (int i = 0; i < 20; ++i)
    m.entries.push_back({"real/r" + std::to_string(i), kLabelReal});
  for (int i = 0; i < 20; ++i)
    m.entries.push_back({"gan/g" + std::to_string(i), kLabelGan});

  auto train_paths = [&](std::uint64_t seed) {
    SplitSpec spec;
    spec.seed = seed;
    std::vector<std::string> out;
    for (const auto& e : split(m, spec).train.entries) out.push_back(e.path);
    return out;
  };
  EXPECT_EQ(train_paths(5), train_paths(5));
  EXPECT_NE(train_paths(5), train_paths(6));
}

TEST(Split, RemainderGoesToTest) {
  DatasetManifest m;
  for (int i = 0; i < 7; ++i)
    m.entries.push_back({"real/r" + std::to_string(i), kLabelReal});
  for (int i = 0; i < 7; ++i)
    m.entries.push_back({"gan/g" + std::to_string(i), kLabelGan});
  SplitSpec spec;  // floor(0.6*7)=4 train, floor(0.2*7)=1 val, rest=2 test
  const SplitResult r = split(m, spec);
  EXPECT_EQ(r.train.count(kLabelReal), 4);
  EXPECT_EQ(r.val.count(kLabelReal), 1);
  EXPECT_EQ(r.test.count(kLabelReal), 2);
}

TEST(Split, RejectsInfeasibleFractions) {
  DatasetManifest m;
  m.entries.push_back({"real/a", kLabelReal});
  m.entries.push_back({"gan/b", kLabelGan});
  SplitSpec bad;
  bad.train = 0.9;
  bad.val = 0.2;
  EXPECT_THROW(split(m, bad), Error);
  SplitSpec neg;
  neg.val = -0.1;
  neg.test = 0.5;
  EXPECT_THROW(split(m, neg), Error);
}

TEST(Corpus, ExtractWritesIndexAndMirrorsClasses) {
  const fs::path root = make_dataset("extract_ok", 2, 24);
  const fs::path out = fresh_dir("extract_ok_out");
  const DatasetManifest m = ingest(root.string());

  ExtractConfig cfg;
  cfg.jobs = 2;
  const ExtractResult r = extract_corpus(m, cfg, out.string());
  EXPECT_EQ(r.written, 4);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_TRUE(fs::exists(out / "real" / "r00000.cbco"));
  EXPECT_TRUE(fs::exists(out / "gan" / "g00001.cbco"));

  std::ifstream index(out / "index.tsv");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(index, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "gan/g00000.cbco\t1");
  EXPECT_EQ(lines[2], "real/r00000.cbco\t0");
}

TEST(Corpus, ExtractRecordsPerImageFailures) {
  const fs::path root = make_dataset("extract_bad", 2, 24);
  write_text(root / "real" / "broken.png", "\x89PNG\r\n\x1a\nnope");
  const fs::path out = fresh_dir("extract_bad_out");
  const DatasetManifest m = ingest(root.string());
  ASSERT_EQ(m.entries.size(), 5u);

  const ExtractResult r = extract_corpus(m, ExtractConfig{}, out.string());
  EXPECT_EQ(r.written, 4);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].path, "real/broken.png");
  EXPECT_FALSE(r.failures[0].message.empty());
  // The index lists only successful extractions.
  std::ifstream index(out / "index.tsv");
  int n = 0;
  std::string line;
  while (std::getline(index, line)) ++n;
  EXPECT_EQ(n, 4);
}

TEST(Corpus, LoadRoundTripsTensorsBitExactly) {
  const fs::path root = make_dataset("load_exact", 2, 24);
  const fs::path out = fresh_dir("load_exact_out");
  const DatasetManifest m = ingest(root.string());
  ExtractConfig cfg;
  cfg.planes = 6;
  extract_corpus(m, cfg, out.string());

  const FeatureCorpus corpus = load_corpus(out.string());
  ASSERT_EQ(corpus.size(), 4u);
  EXPECT_EQ(corpus.plane_count, 6);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t mi = std::size_t(
        std::find_if(m.entries.begin(), m.entries.end(),
                     [&](const DatasetEntry& e) {
                       return fs::path(e.path).stem() ==
                              fs::path(corpus.names[i]).stem();
                     }) -
        m.entries.begin());
    ASSERT_LT(mi, m.entries.size());
    EXPECT_EQ(corpus.labels[i], m.entries[mi].label);
    const FeatureTensor want = assemble_crossconet(
        load_image(m.full_path(mi)), cfg.tau, cfg.tau_prime);
    EXPECT_EQ(corpus.tensors[i].data, want.data);
  }
}

TEST(Corpus, ForcePlanesKeepsSpatialPrefix) {
  const fs::path root = make_dataset("force_planes", 1, 24);
  const fs::path out = fresh_dir("force_planes_out");
  const DatasetManifest m = ingest(root.string());
  ExtractConfig cfg;
  cfg.planes = 6;
  extract_corpus(m, cfg, out.string());

  const FeatureCorpus spatial = load_corpus(out.string(), 3);
  ASSERT_EQ(spatial.size(), 2u);
  EXPECT_EQ(spatial.plane_count, 3);
  EXPECT_EQ(spatial.tensors[0].data.size(), std::size_t(3) * kCoocCells);
  // The first three planes of the 6-plane tensor are the per-channel ones,
  // so forcing down to 3 must agree with a direct 3-plane extraction.
  const std::size_t gan_index =
      m.entries[0].label == kLabelGan ? 0 : 1;  // names sort gan first
  const FeatureTensor want =
      assemble_conet(load_image(m.full_path(gan_index)), cfg.tau);
  EXPECT_EQ(spatial.tensors[0].data, want.data);
}

TEST(Corpus, ForcingMorePlanesThanStoredFaults) {
  const fs::path root = make_dataset("force_up", 1, 24);
  const fs::path out = fresh_dir("force_up_out");
  ExtractConfig cfg;
  cfg.planes = 3;
  extract_corpus(ingest(root.string()), cfg, out.string());
  try {
    load_corpus(out.string(), 6);
    FAIL() << "expected a plane-count fault";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPlaneCountMismatch);
  }
}

TEST(Corpus, MissingIndexFaults) {
  const fs::path out = fresh_dir("no_index");
  try {
    load_corpus(out.string());
    FAIL() << "expected a missing-index fault";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFileNotFound);
  }
}

TEST(Evaluate, ThresholdAndRecallsFromHandCounts) {
  FeatureCorpus corpus;
  corpus.plane_count = 3;
  for (int i = 0; i < 2; ++i) {
    corpus.tensors.push_back(flat_tensor(3, 0.001f));
    corpus.labels.push_back(kLabelReal);
    corpus.names.push_back("real" + std::to_string(i));
  }
  for (int i = 0; i < 3; ++i) {
    corpus.tensors.push_back(flat_tensor(3, 0.002f));
    corpus.labels.push_back(kLabelGan);
    corpus.names.push_back("gan" + std::to_string(i));
  }

  Network<float> says_gan = bias_net(3, 1.0f);
  EvalResult r = evaluate(says_gan, corpus);
  EXPECT_EQ(r.total, 5);
  EXPECT_EQ(r.correct, 3);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(r.recall_real, 0.0);
  EXPECT_DOUBLE_EQ(r.recall_gan, 1.0);

  Network<float> says_real = bias_net(3, -1.0f);
  r = evaluate(says_real, corpus);
  EXPECT_EQ(r.correct, 2);
  EXPECT_DOUBLE_EQ(r.recall_real, 1.0);
  EXPECT_DOUBLE_EQ(r.recall_gan, 0.0);

  // sigmoid(0) = 0.5 exactly; the >= rule sends the tie to gan.
  Network<float> on_the_fence = bias_net(3, 0.0f);
  r = evaluate(on_the_fence, corpus);
  EXPECT_DOUBLE_EQ(r.recall_gan, 1.0);
  EXPECT_DOUBLE_EQ(r.recall_real, 0.0);
}

TEST(Train, TinyRunIsDeterministicAndLearns) {
  FeatureCorpus corpus;
  corpus.plane_count = 6;
  for (int i = 0; i < 4; ++i) {
    const bool gan = i % 2;
    corpus.tensors.push_back(
        assemble_crossconet(synthesize_image(21, std::uint64_t(i), 32, gan),
                            Offset{1, 1}, Offset{1, 1}));
    corpus.labels.push_back(gan ? kLabelGan : kLabelReal);
    corpus.names.push_back("t" + std::to_string(i));
  }

  TrainConfig cfg;
  cfg.batch = 2;
  cfg.epochs = 2;
  cfg.width_factor = 0.05;
  cfg.seed = 9;
  const TrainResult a = train(corpus, nullptr, cfg);
  ASSERT_EQ(a.log.size(), 2u);
  for (const EpochLog& e : a.log) {
    EXPECT_TRUE(std::isfinite(e.mean_loss));
    EXPECT_GT(e.mean_loss, 0.0);
    EXPECT_EQ(e.val_accuracy, -1.0);
  }

  const TrainResult b = train(corpus, nullptr, cfg);
  const auto pa = const_cast<Network<float>&>(a.net).parameters();
  const auto pb = const_cast<Network<float>&>(b.net).parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    EXPECT_EQ(pa[i]->data, pb[i]->data) << "parameter tensor " << i;
}

TEST(Train, ValidationTracksBestEpochAndEarlyStopCutsLog) {
  FeatureCorpus corpus;
  corpus.plane_count = 6;
  for (int i = 0; i < 4; ++i) {
    const bool gan = i % 2;
    corpus.tensors.push_back(
        assemble_crossconet(synthesize_image(22, std::uint64_t(i), 32, gan),
                            Offset{1, 1}, Offset{1, 1}));
    corpus.labels.push_back(gan ? kLabelGan : kLabelReal);
    corpus.names.push_back("t" + std::to_string(i));
  }

  TrainConfig cfg;
  cfg.batch = 2;
  cfg.epochs = 3;
  cfg.width_factor = 0.05;
  cfg.seed = 10;
  const TrainResult with_val = train(corpus, &corpus, cfg);
  ASSERT_EQ(with_val.log.size(), 3u);
  for (const EpochLog& e : with_val.log) {
    EXPECT_GE(e.val_accuracy, 0.0);
    EXPECT_LE(e.val_accuracy, 1.0);
  }
  EXPECT_GE(with_val.best_epoch, 0);
  EXPECT_LT(with_val.best_epoch, 3);

  cfg.early_stop_loss = 1e6;  // any first-epoch loss satisfies this
  const TrainResult stopped = train(corpus, nullptr, cfg);
  EXPECT_EQ(stopped.log.size(), 1u);
}

TEST(Train, RejectsDegenerateInputs) {
  FeatureCorpus corpus;
  corpus.plane_count = 6;
  TrainConfig cfg;
  cfg.batch = 1;
  cfg.epochs = 1;
  cfg.width_factor = 0.05;
  EXPECT_THROW(train(corpus, nullptr, cfg), Error);  // empty

  corpus.tensors.push_back(flat_tensor(6, 0.001f));
  corpus.labels.push_back(kLabelReal);
  corpus.names.push_back("only");
  EXPECT_THROW(train(corpus, nullptr, cfg), Error);  // one class only

  corpus.tensors.push_back(flat_tensor(6, 0.002f));
  corpus.labels.push_back(kLabelGan);
  corpus.names.push_back("other");
  cfg.batch = 3;  // larger than the corpus
  EXPECT_THROW(train(corpus, nullptr, cfg), Error);

  cfg.batch = 2;
  cfg.net_kind = "mystery";
  EXPECT_THROW(train(corpus, nullptr, cfg), Error);

  cfg.net_kind = "crossconet";
  FeatureCorpus spatial;
  spatial.plane_count = 3;
  spatial.tensors = {flat_tensor(3, 0.001f), flat_tensor(3, 0.002f)};
  spatial.labels = {kLabelReal, kLabelGan};
  spatial.names = {"a", "b"};
  EXPECT_THROW(train(spatial, nullptr, cfg), Error);  // needs 6 planes
}

TEST(PlanesForNet, MapsKindsAndRejectsUnknown) {
  EXPECT_EQ(planes_for_net("conet"), 3);
  EXPECT_EQ(planes_for_net("crossconet"), 6);
  EXPECT_THROW(planes_for_net("resnet"), Error);
}

TEST(Report, CsvLayoutAndRounding) {
  Report rep;
  rep.rows.push_back({"Gaussian noise", "2", "StyleGAN", "net-a", 0.9625});
  rep.rows.push_back({"AHE", "-", "StyleGAN", "net-b", 1.0});
  rep.rows.push_back({"Resizing", "0.9", "PGGAN", "net-a", 0.5});
  const fs::path path = fresh_dir("report_csv") / "rows.csv";
  emit_report(rep, "csv", path.string());

  std::ifstream in(path, std::ios::binary);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  EXPECT_EQ(body,
            "operation,parameter,dataset,network,accuracy\n"
            "Gaussian noise,2,StyleGAN,net-a,96.25\n"
            "AHE,-,StyleGAN,net-b,100.00\n"
            "Resizing,0.9,PGGAN,net-a,50.00\n");
}

TEST(Report, JsonMirrorsRows) {
  Report rep;
  rep.rows.push_back({"Rotation", "45", "ds", "net", 0.8617});
  const fs::path path = fresh_dir("report_json") / "rows.json";
  emit_report(rep, "json", path.string());

  std::ifstream in(path);
  const nlohmann::json j = nlohmann::json::parse(in);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["operation"], "Rotation");
  EXPECT_EQ(j[0]["parameter"], "45");
  EXPECT_EQ(j[0]["dataset"], "ds");
  EXPECT_EQ(j[0]["network"], "net");
  EXPECT_EQ(j[0]["accuracy"], "86.17");
}

TEST(Report, RejectsUnknownFormat) {
  Report rep;
  const fs::path path = fresh_dir("report_bad") / "rows.xml";
  EXPECT_THROW(emit_report(rep, "xml", path.string()), Error);
}

TEST(Grids, PostProcessingSuiteHasTwentyTwoRowsInOrder) {
  const std::vector<AttackSpec> attacks = table2_attacks();
  ASSERT_EQ(attacks.size(), 22u);
  const std::vector<std::pair<std::string, std::string>> want = {
      {"Median filter", "3 x 3"},
      {"Median filter", "5 x 5"},
      {"Gaussian noise", "0.5"},
      {"Gaussian noise", "0.8"},
      {"Gaussian noise", "2"},
      {"AHE", "-"},
      {"Gamma correction", "0.9"},
      {"Gamma correction", "0.8"},
      {"Gamma correction", "1.2"},
      {"Average blurring", "3 x 3"},
      {"Average blurring", "5 x 5"},
      {"Resizing", "0.9"},
      {"Resizing", "0.8"},
      {"Resizing", "0.5"},
      {"Zooming", "1.1"},
      {"Zooming", "1.2"},
      {"Zooming", "1.9"},
      {"Rotation", "5"},
      {"Rotation", "10"},
      {"Rotation", "45"},
      {"Cropping", "-"},
      {"Blurring followed by sharpening", "-"}};
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(attacks[i].operation_label(), want[i].first) << "row " << i;
    EXPECT_EQ(attacks[i].parameter_label(), want[i].second) << "row " << i;
  }
}

TEST(Grids, CompressionQualityGrids) {
  EXPECT_EQ(table3_eval_qualities(),
            (std::vector<int>{73, 75, 77, 80, 83, 85, 87, 90, 93, 95, 97}));
  EXPECT_EQ(jpeg_aware_train_qualities(),
            (std::vector<int>{75, 80, 85, 90, 95}));
}

TEST(Grids, CompressionRobustnessAttackShortlist) {
  const std::vector<AttackSpec> attacks = table45_attacks();
  ASSERT_EQ(attacks.size(), 5u);
  const char* ops[] = {"Median filter", "Resizing", "Gaussian noise",
                       "Zooming", "AHE"};
  const char* params[] = {"5 x 5", "0.8", "2", "1.9", "-"};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(attacks[i].operation_label(), ops[i]);
    EXPECT_EQ(attacks[i].parameter_label(), params[i]);
  }
}

TEST(Robustness, OneRowPerAttackWithLabels) {
  const fs::path root = make_dataset("robust_rows", 2, 24);
  const DatasetManifest m = ingest(root.string());
  Network<float> net = bias_net(3, 1.0f);  // everything scored gan

  RobustnessConfig cfg;
  cfg.dataset_label = "synthetic";
  cfg.network_label = "scorer";
  const Report rep =
      robustness_eval(net, m, parse_attack_list("gamma:0.9,median:3"), cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].operation, "Gamma correction");
  EXPECT_EQ(rep.rows[0].parameter, "0.9");
  EXPECT_EQ(rep.rows[1].operation, "Median filter");
  EXPECT_EQ(rep.rows[1].dataset, "synthetic");
  EXPECT_EQ(rep.rows[1].network, "scorer");
  // Half the images are gan, and the scorer flags everything as gan.
  EXPECT_DOUBLE_EQ(rep.rows[0].accuracy, 0.5);
  EXPECT_DOUBLE_EQ(rep.rows[1].accuracy, 0.5);
}

TEST(Robustness, CompressionAfterAttackExpandsRowsPerQuality) {
  const fs::path root = make_dataset("robust_qf", 1, 24);
  const DatasetManifest m = ingest(root.string());
  Network<float> net = bias_net(3, -1.0f);  // everything scored real

  RobustnessConfig cfg;
  cfg.jpeg_qfs = {75, 95};
  const Report rep =
      robustness_eval(net, m, parse_attack_list("gamma:1.2"), cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].operation, "Gamma correction");
  EXPECT_EQ(rep.rows[0].parameter, "1.2 @ qf=75");
  EXPECT_EQ(rep.rows[1].parameter, "1.2 @ qf=95");
  EXPECT_DOUBLE_EQ(rep.rows[0].accuracy, 0.5);
}

TEST(Robustness, CompressionSweepMakesOneRowPerQuality) {
  const fs::path root = make_dataset("jpeg_rows", 1, 24);
  const DatasetManifest m = ingest(root.string());
  Network<float> net = bias_net(3, 1.0f);

  RobustnessConfig cfg;
  const Report rep = jpeg_eval(net, m, {80, 90}, cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].operation, "JPEG compression");
  EXPECT_EQ(rep.rows[0].parameter, "80");
  EXPECT_EQ(rep.rows[1].parameter, "90");
}

TEST(JpegAwareTrain, BuildsUnionCorpusAcrossQualities) {
  const fs::path root = make_dataset("jaware", 2, 24);
  const DatasetManifest m = ingest(root.string());

  JpegAwareConfig jcfg;
  jcfg.train_qfs = {85, 95};
  jcfg.per_qf_count = 1;  // one image per class per quality -> 4 samples
  TrainConfig tcfg;
  tcfg.batch = 4;
  tcfg.epochs = 1;
  tcfg.width_factor = 0.05;
  const TrainResult r = jpeg_aware_train(m, nullptr, jcfg, tcfg);
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_TRUE(std::isfinite(r.log[0].mean_loss));

  JpegAwareConfig bad;
  bad.train_qfs = {0};
  EXPECT_THROW(jpeg_aware_train(m, nullptr, bad, tcfg), Error);
}

TEST(Synthetic, GeneratorLaysOutClassesDeterministically) {
  const fs::path a = fresh_dir("synth_a");
  const fs::path b = fresh_dir("synth_b");
  SynthConfig cfg;
  cfg.per_class = 2;
  cfg.size = 32;
  cfg.seed = 5;
  generate_synthetic_dataset(a.string(), cfg);
  generate_synthetic_dataset(b.string(), cfg);

  for (const char* rel : {"real/r00000.png", "real/r00001.png",
                          "gan/g00000.png", "gan/g00001.png"}) {
    ASSERT_TRUE(fs::exists(a / rel)) << rel;
    const RgbImage ia = load_image((a / rel).string());
    const RgbImage ib = load_image((b / rel).string());
    EXPECT_EQ(ia.width, 32);
    EXPECT_EQ(ia.height, 32);
    EXPECT_EQ(ia.data, ib.data) << rel;
  }
  // Per-band remapping must actually change the picture.
  EXPECT_NE(load_image((a / "real/r00000.png").string()).data,
            load_image((a / "gan/g00000.png").string()).data);
}

TEST(Synthetic, ImagesAreSeedAndIndexAddressable) {
  const RgbImage x = synthesize_image(5, 0, 32, false);
  const RgbImage y = synthesize_image(5, 0, 32, false);
  const RgbImage z = synthesize_image(5, 1, 32, false);
  EXPECT_EQ(x.data, y.data);
  EXPECT_NE(x.data, z.data);
  EXPECT_NE(synthesize_image(6, 0, 32, false).data, x.data);
}

TEST(Synthetic, RejectsDegenerateShape) {
  SynthConfig cfg;
  cfg.per_class = 0;
  EXPECT_THROW(generate_synthetic_dataset(
                   (fs::temp_directory_path() / "ccooc_bad_synth").string(),
                   cfg),
               Error);
  cfg.per_class = 1;
  cfg.size = 4;
  EXPECT_THROW(generate_synthetic_dataset(
                   (fs::temp_directory_path() / "ccooc_bad_synth").string(),
                   cfg),
               Error);
}
