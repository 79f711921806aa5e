#include "crosscooc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "crosscooc/models.hpp"
#include "crosscooc/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace ccooc {
namespace {

bool supported_image(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".png" || ext == ".ppm";
}

// Runs fn(0..n-1) on up to `jobs` threads; the first exception wins and is
// rethrown after everything joins. fn must only touch its own slot.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(jobs, 1), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Tensor to_input(const FeatureTensor& f, int planes) {
  if (planes > f.plane_count)
    fail(Errc::kPlaneCountMismatch,
         "need " + std::to_string(planes) + " planes, corpus has " +
             std::to_string(f.plane_count));
  Tensor t({planes, kCoocBins, kCoocBins});
  std::transform(f.data.data(), f.data.data() + t.size(), t.data.begin(),
                 [](float v) { return v * kInputScale; });
  return t;
}

FeatureTensor features_for(const RgbImage& img, const ExtractConfig& cfg) {
  if (cfg.planes == 3) return assemble_conet(img, cfg.tau);
  return assemble_crossconet(img, cfg.tau, cfg.tau_prime);
}

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

double corpus_accuracy(Network<float>& net,
                       const std::vector<Tensor>& inputs,
                       const std::vector<int>& labels) {
  int correct = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const int predicted = net.forward(inputs[i]) >= 0.5f ? kLabelGan : kLabelReal;
    correct += predicted == labels[i];
  }
  return inputs.empty() ? 0.0 : double(correct) / double(inputs.size());
}

}  // namespace

int DatasetManifest::count(int label) const {
  int n = 0;
  for (const auto& e : entries) n += e.label == label;
  return n;
}

std::string DatasetManifest::full_path(std::size_t i) const {
  return (fs::path(root) / entries[i].path).string();
}

DatasetManifest ingest(const std::string& root) {
  static const std::pair<const char*, int> kClasses[] = {{"real", kLabelReal},
                                                         {"gan", kLabelGan}};
  DatasetManifest manifest;
  manifest.root = root;
  for (const auto& [sub, label] : kClasses) {
    const fs::path dir = fs::path(root) / sub;
    if (!fs::is_directory(dir))
      fail(Errc::kMissingClassDir, dir.string());
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && supported_image(entry.path()))
        files.push_back((fs::path(sub) / entry.path().filename()).generic_string());
    }
    if (files.empty()) fail(Errc::kEmptyClass, dir.string());
    std::sort(files.begin(), files.end());
    for (auto& f : files) manifest.entries.push_back({std::move(f), label});
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) {
              return a.path < b.path;
            });
  return manifest;
}

SplitResult split(const DatasetManifest& manifest, const SplitSpec& spec) {
  if (spec.train < 0 || spec.val < 0 || spec.test < 0 ||
      spec.train + spec.val + spec.test > 1.0 + 1e-9)
    fail(Errc::kInfeasibleSplit, "fractions must be nonnegative and sum <= 1");
  SplitResult out;
  out.train.root = out.val.root = out.test.root = manifest.root;
  for (int label : {kLabelReal, kLabelGan}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
      if (manifest.entries[i].label == label) idx.push_back(i);
    rng::CounterRng gen(spec.seed, 0x5917ull + std::uint64_t(label));
    gen.shuffle(idx);
    const std::size_t n = idx.size();
    const std::size_t n_train = std::size_t(spec.train * double(n));
    const std::size_t n_val = std::size_t(spec.val * double(n));
    if (n_train + n_val > n)
      fail(Errc::kInfeasibleSplit, "per-class counts exceed class size");
    for (std::size_t i = 0; i < n; ++i) {
      const DatasetEntry& e = manifest.entries[idx[i]];
      if (i < n_train)
        out.train.entries.push_back(e);
      else if (i < n_train + n_val)
        out.val.entries.push_back(e);
      else
        out.test.entries.push_back(e);
    }
  }
  for (DatasetManifest* m : {&out.train, &out.val, &out.test})
    std::sort(m->entries.begin(), m->entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) {
                return a.path < b.path;
              });
  return out;
}

ExtractResult extract_corpus(const DatasetManifest& manifest,
                             const ExtractConfig& config,
                             const std::string& out_dir) {
  fs::create_directories(out_dir);
  struct Item {
    std::string rel_out;
    std::string error;
  };
  std::vector<Item> items(manifest.entries.size());

  parallel_for(manifest.entries.size(), config.jobs, [&](std::size_t i) {
    const DatasetEntry& entry = manifest.entries[i];
    Item& item = items[i];
    try {
      const RgbImage img = load_image(manifest.full_path(i));
      const FeatureTensor feat = features_for(img, config);
      fs::path rel(entry.path);
      rel.replace_extension(".cbco");
      item.rel_out = rel.generic_string();
      const fs::path dest = fs::path(out_dir) / rel;
      fs::create_directories(dest.parent_path());
      write_feature_file(feat, dest.string());
    } catch (const Error& e) {
      item.error = e.what();
    }
  });

  ExtractResult result;
  std::ofstream index(fs::path(out_dir) / "index.tsv",
                      std::ios::binary | std::ios::trunc);
  if (!index) fail(Errc::kIoError, "cannot write corpus index in " + out_dir);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].error.empty()) {
      result.failures.push_back({manifest.entries[i].path, items[i].error});
      continue;
    }
    index << items[i].rel_out << '\t' << manifest.entries[i].label << '\n';
    ++result.written;
  }
  if (!index) fail(Errc::kIoError, "corpus index write failed in " + out_dir);
  return result;
}

FeatureCorpus load_corpus(const std::string& dir, int force_planes) {
  std::ifstream index(fs::path(dir) / "index.tsv");
  if (!index)
    fail(Errc::kFileNotFound, (fs::path(dir) / "index.tsv").string());
  FeatureCorpus corpus;
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      fail(Errc::kCorruptStream, "corpus index line without tab: " + line);
    const std::string rel = line.substr(0, tab);
    const int label = std::stoi(line.substr(tab + 1));
    FeatureTensor feat = read_feature_file((fs::path(dir) / rel).string());
    if (force_planes > 0 && feat.plane_count != force_planes) {
      if (feat.plane_count < force_planes)
        fail(Errc::kPlaneCountMismatch,
             rel + " has " + std::to_string(feat.plane_count) + " planes");
      feat.data.resize(std::size_t(force_planes) * kCoocCells);
      feat.plane_count = force_planes;
    }
    if (corpus.plane_count == 0)
      corpus.plane_count = feat.plane_count;
    else if (corpus.plane_count != feat.plane_count)
      fail(Errc::kPlaneCountMismatch, "mixed plane counts in " + dir);
    corpus.names.push_back(rel);
    corpus.labels.push_back(label);
    corpus.tensors.push_back(std::move(feat));
  }
  return corpus;
}

int planes_for_net(const std::string& net_kind) {
  if (net_kind == "conet") return 3;
  if (net_kind == "crossconet") return 6;
  fail(Errc::kBadParameter, "unknown net kind '" + net_kind + "'");
}

TrainResult train(const FeatureCorpus& train_set, const FeatureCorpus* val_set,
                  const TrainConfig& config) {
  if (train_set.size() == 0) fail(Errc::kEmptyClass, "empty training corpus");
  const bool has_real = std::count(train_set.labels.begin(),
                                   train_set.labels.end(), kLabelReal) > 0;
  const bool has_gan = std::count(train_set.labels.begin(),
                                  train_set.labels.end(), kLabelGan) > 0;
  if (!has_real || !has_gan)
    fail(Errc::kEmptyClass, "training corpus must contain both classes");
  if (config.batch < 1 || std::size_t(config.batch) > train_set.size())
    fail(Errc::kBadParameter, "batch size out of range");
  if (config.epochs < 1 || !(config.lr > 0.0) || config.momentum < 0.0)
    fail(Errc::kBadParameter, "bad training hyperparameters");

  const int planes = planes_for_net(config.net_kind);
  if (planes > train_set.plane_count)
    fail(Errc::kPlaneCountMismatch,
         config.net_kind + " needs " + std::to_string(planes) +
             " planes, corpus has " + std::to_string(train_set.plane_count));

  NetworkSpec spec = planes == 3 ? build_conet(config.seed, kCoocBins)
                                 : build_crossconet(config.seed, kCoocBins);
  spec = width_scale(spec, config.width_factor);
  Network<float> net(spec);
  Optimizer opt;
  opt.lr = config.lr;
  opt.momentum = config.momentum;

  std::vector<Tensor> val_inputs;
  if (val_set)
    for (const auto& f : val_set->tensors)
      val_inputs.push_back(to_input(f, planes));

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t(0));

  TrainResult result{net, net, {}, 0};
  double best_val = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng::CounterRng gen(config.seed, 0x9e3779b9u + std::uint64_t(epoch));
    gen.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += std::size_t(config.batch)) {
      const std::size_t stop =
          std::min(order.size(), start + std::size_t(config.batch));
      std::vector<Tensor> batch;
      std::vector<const Tensor*> xs;
      std::vector<int> ys;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(to_input(train_set.tensors[order[i]], planes));
        ys.push_back(train_set.labels[order[i]]);
      }
      for (const Tensor& t : batch) xs.push_back(&t);
      try {
        loss_sum += train_batch(net, xs, ys, opt) * double(stop - start);
      } catch (const Error& e) {
        if (e.code() == Errc::kNonFiniteFault)
          fail(Errc::kNonFiniteFault,
               std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                   ", batch " + std::to_string(start / config.batch) + ")");
        throw;
      }
    }
    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = loss_sum / double(order.size());
    if (val_set) {
      log.val_accuracy = corpus_accuracy(net, val_inputs, val_set->labels);
      if (log.val_accuracy > best_val) {
        best_val = log.val_accuracy;
        net.clear_caches();
        result.best_net = net;
        result.best_epoch = epoch;
      }
    }
    result.log.push_back(log);
    if (config.early_stop_loss >= 0.0 &&
        log.mean_loss < config.early_stop_loss)
      break;
  }
  net.clear_caches();
  if (!val_set) {
    result.best_net = net;
    result.best_epoch = result.log.empty() ? 0 : result.log.back().epoch;
  }
  result.net = std::move(net);
  return result;
}

EvalResult evaluate(Network<float>& net, const FeatureCorpus& corpus) {
  if (net.spec().input_planes != corpus.plane_count)
    fail(Errc::kPlaneCountMismatch,
         "model expects " + std::to_string(net.spec().input_planes) +
             " planes, corpus has " + std::to_string(corpus.plane_count));
  EvalResult r;
  int correct_real = 0, correct_gan = 0, n_real = 0, n_gan = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Tensor x = to_input(corpus.tensors[i], corpus.plane_count);
    const int predicted = net.forward(x) >= 0.5f ? kLabelGan : kLabelReal;
    const int label = corpus.labels[i];
    (label == kLabelReal ? n_real : n_gan)++;
    if (predicted == label)
      (label == kLabelReal ? correct_real : correct_gan)++;
  }
  r.total = int(corpus.size());
  r.correct = correct_real + correct_gan;
  r.accuracy = r.total ? double(r.correct) / r.total : 0.0;
  r.recall_real = n_real ? double(correct_real) / n_real : 0.0;
  r.recall_gan = n_gan ? double(correct_gan) / n_gan : 0.0;
  return r;
}

void emit_report(const Report& report, const std::string& format,
                 const std::string& path) {
  std::string body;
  if (format == "csv") {
    body = "operation,parameter,dataset,network,accuracy\n";
    for (const ReportRow& row : report.rows)
      body += row.operation + "," + row.parameter + "," + row.dataset + "," +
              row.network + "," + format_pct(row.accuracy) + "\n";
  } else if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& row : report.rows)
      rows.push_back({{"operation", row.operation},
                      {"parameter", row.parameter},
                      {"dataset", row.dataset},
                      {"network", row.network},
                      {"accuracy", format_pct(row.accuracy)}});
    body = rows.dump(2);
    body += '\n';
  } else {
    fail(Errc::kBadParameter, "report format must be csv or json");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIoError, "cannot open " + path + " for writing");
  out << body;
  if (!out) fail(Errc::kIoError, "write failed: " + path);
}

std::vector<AttackSpec> table2_attacks() {
  return parse_attack_list(
      "median:3,median:5,"
      "noise:0.5,noise:0.8,noise:2,"
      "ahe,"
      "gamma:0.9,gamma:0.8,gamma:1.2,"
      "blur:3,blur:5,"
      "resize:0.9,resize:0.8,resize:0.5,"
      "zoom:1.1,zoom:1.2,zoom:1.9,"
      "rotate:5,rotate:10,rotate:45,"
      "crop:880x880,"
      "blursharpen");
}

std::vector<int> table3_eval_qualities() {
  return {73, 75, 77, 80, 83, 85, 87, 90, 93, 95, 97};
}

std::vector<int> jpeg_aware_train_qualities() { return {75, 80, 85, 90, 95}; }

std::vector<AttackSpec> table45_attacks() {
  return parse_attack_list("median:5,resize:0.8,noise:2,zoom:1.9,ahe");
}

namespace {

// Applies `transform` to every manifest image, extracts features, and scores
// the model; transform receives (image, index).
template <typename Transform>
double transformed_accuracy(Network<float>& net,
                            const DatasetManifest& images,
                            const ExtractConfig& feat, Transform&& transform) {
  const int planes = net.spec().input_planes;
  ExtractConfig cfg = feat;
  cfg.planes = planes;
  std::vector<int> outcomes(images.entries.size(), 0);
  parallel_for(images.entries.size(), 1, [&](std::size_t i) {
    const RgbImage img = load_image(images.full_path(i));
    const RgbImage attacked = transform(img, i);
    const Tensor x = to_input(features_for(attacked, cfg), planes);
    const int predicted = net.forward(x) >= 0.5f ? kLabelGan : kLabelReal;
    outcomes[i] = predicted == images.entries[i].label;
  });
  int correct = 0;
  for (int v : outcomes) correct += v;
  return images.entries.empty()
             ? 0.0
             : double(correct) / double(images.entries.size());
}

}  // namespace

Report robustness_eval(Network<float>& net, const DatasetManifest& test_images,
                       const std::vector<AttackSpec>& attacks,
                       const RobustnessConfig& config) {
  Report report;
  for (const AttackSpec& attack : attacks) {
    AttackSpec spec = attack;
    if (spec.kind == AttackKind::kGaussianNoise && spec.seed == 0)
      spec.seed = config.noise_seed;
    if (config.jpeg_qfs.empty()) {
      const double acc = transformed_accuracy(
          net, test_images, config.features,
          [&](const RgbImage& img, std::size_t i) {
            return apply(spec, img, std::uint64_t(i));
          });
      report.rows.push_back({spec.operation_label(), spec.parameter_label(),
                             config.dataset_label, config.network_label, acc});
    } else {
      for (int qf : config.jpeg_qfs) {
        const double acc = transformed_accuracy(
            net, test_images, config.features,
            [&](const RgbImage& img, std::size_t i) {
              return jpeg_roundtrip(apply(spec, img, std::uint64_t(i)),
                                    QualityFactor{qf}, config.chroma);
            });
        report.rows.push_back({spec.operation_label(),
                               spec.parameter_label() + " @ qf=" +
                                   std::to_string(qf),
                               config.dataset_label, config.network_label,
                               acc});
      }
    }
  }
  return report;
}

Report jpeg_eval(Network<float>& net, const DatasetManifest& test_images,
                 const std::vector<int>& qualities,
                 const RobustnessConfig& config) {
  Report report;
  for (int qf : qualities) {
    const double acc = transformed_accuracy(
        net, test_images, config.features,
        [&](const RgbImage& img, std::size_t) {
          return jpeg_roundtrip(img, QualityFactor{qf}, config.chroma);
        });
    report.rows.push_back({"JPEG compression", std::to_string(qf),
                           config.dataset_label, config.network_label, acc});
  }
  return report;
}

namespace {

FeatureCorpus compressed_corpus(const DatasetManifest& images,
                                const JpegAwareConfig& jpeg_config,
                                const ExtractConfig& feat) {
  FeatureCorpus corpus;
  corpus.plane_count = feat.planes;
  for (int qf : jpeg_config.train_qfs) {
    int taken[2] = {0, 0};
    for (std::size_t i = 0; i < images.entries.size(); ++i) {
      const DatasetEntry& entry = images.entries[i];
      if (jpeg_config.per_qf_count > 0 &&
          taken[entry.label] >= jpeg_config.per_qf_count)
        continue;
      ++taken[entry.label];
      const RgbImage img = load_image(images.full_path(i));
      const RgbImage comp =
          jpeg_roundtrip(img, QualityFactor{qf}, jpeg_config.chroma);
      corpus.tensors.push_back(features_for(comp, feat));
      corpus.labels.push_back(entry.label);
      corpus.names.push_back("qf" + std::to_string(qf) + "/" + entry.path);
    }
  }
  return corpus;
}

}  // namespace

TrainResult jpeg_aware_train(const DatasetManifest& train_images,
                             const DatasetManifest* val_images,
                             const JpegAwareConfig& jpeg_config,
                             const TrainConfig& train_config) {
  for (int qf : jpeg_config.train_qfs)
    if (qf < 1 || qf > 100)
      fail(Errc::kBadParameter, "train QF out of [1,100]");
  ExtractConfig feat;
  feat.tau = train_config.tau;
  feat.tau_prime = train_config.tau_prime;
  feat.planes = planes_for_net(train_config.net_kind);
  const FeatureCorpus train_set =
      compressed_corpus(train_images, jpeg_config, feat);
  std::optional<FeatureCorpus> val_set;
  if (val_images)
    val_set = compressed_corpus(*val_images, jpeg_config, feat);
  return train(train_set, val_set ? &*val_set : nullptr, train_config);
}

// --- synthetic benchmark ---------------------------------------------------

namespace {

// Bilinearly upsampled uniform grid at resolution s x s (value noise).
struct ValueNoise {
  int cells;
  std::vector<double> grid;  // (cells+1)^2

  ValueNoise(rng::CounterRng& gen, int cells_) : cells(cells_) {
    grid.resize(std::size_t(cells + 1) * (cells + 1));
    for (auto& v : grid) v = gen.next_uniform();
  }

  double at(double u, double v) const {  // u,v in [0,1]
    const double gu = u * cells, gv = v * cells;
    const int iu = std::min(int(gu), cells - 1);
    const int iv = std::min(int(gv), cells - 1);
    const double fu = gu - iu, fv = gv - iv;
    const auto g = [&](int a, int b) {
      return grid[std::size_t(a) * (cells + 1) + b];
    };
    return (1 - fu) * ((1 - fv) * g(iu, iv) + fv * g(iu, iv + 1)) +
           fu * ((1 - fv) * g(iu + 1, iv) + fv * g(iu + 1, iv + 1));
  }
};

// Monotone piecewise-linear intensity remap on [0,1] with 8 segments. The
// knot spacing is resampled until it deviates from identity by at least 0.1
// somewhere, so the remap never degenerates to (near-)identity.
struct IntensityRemap {
  static constexpr int kKnots = 8;
  double y[kKnots + 1];

  explicit IntensityRemap(rng::CounterRng& gen) {
    for (;;) {
      double inc[kKnots], total = 0.0;
      for (double& d : inc) {
        d = 0.15 + gen.next_uniform();
        total += d;
      }
      y[0] = 0.0;
      for (int i = 0; i < kKnots; ++i) y[i + 1] = y[i] + inc[i] / total;
      y[kKnots] = 1.0;
      double dev = 0.0;
      for (int i = 1; i < kKnots; ++i)
        dev = std::max(dev, std::abs(y[i] - double(i) / kKnots));
      if (dev >= 0.1) return;
    }
  }

  double operator()(double v) const {
    v = std::clamp(v, 0.0, 1.0);
    const double g = v * kKnots;
    const int i = std::min(int(g), kKnots - 1);
    return y[i] + (g - i) * (y[i + 1] - y[i]);
  }
};

}  // namespace

RgbImage synthesize_image(std::uint64_t seed, std::uint64_t index, int size,
                          bool decorrelate) {
  rng::CounterRng gen(seed, index);

  // Shared luminance: multi-scale value noise, coarse scales dominant.
  static constexpr int kScales[] = {2, 4, 8, 16, 32};
  static constexpr double kWeights[] = {1.0, 0.55, 0.3, 0.16, 0.09};
  std::vector<ValueNoise> octaves;
  octaves.reserve(std::size(kScales));
  for (int s : kScales) octaves.emplace_back(gen, s);

  std::vector<double> lum(std::size_t(size) * size);
  double weight_sum = 0.0;
  for (double w : kWeights) weight_sum += w;
  double lo = 1e9, hi = -1e9;
  for (int r = 0; r < size; ++r) {
    const double v = (r + 0.5) / size;
    for (int c = 0; c < size; ++c) {
      const double u = (c + 0.5) / size;
      double acc = 0.0;
      for (std::size_t o = 0; o < octaves.size(); ++o)
        acc += kWeights[o] * octaves[o].at(v, u);
      acc /= weight_sum;
      lum[std::size_t(r) * size + c] = acc;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;

  // Small per-band smooth perturbation keeps the bands strongly but not
  // perfectly correlated.
  std::vector<ValueNoise> band_noise;
  for (int b = 0; b < 3; ++b) band_noise.emplace_back(gen, 8);
  std::optional<IntensityRemap> remap[3];
  if (decorrelate)
    for (int b = 0; b < 3; ++b) remap[b].emplace(gen);

  RgbImage img(size, size);
  for (int r = 0; r < size; ++r) {
    const double v = (r + 0.5) / size;
    for (int c = 0; c < size; ++c) {
      const double u = (c + 0.5) / size;
      const double base =
          0.08 + 0.84 * (lum[std::size_t(r) * size + c] - lo) / span;
      for (int b = 0; b < 3; ++b) {
        double val = base + 0.035 * (band_noise[b].at(v, u) - 0.5);
        if (remap[b]) val = (*remap[b])(val);
        img.at(r, c, b) = clamp_u8(255.0 * val);
      }
    }
  }
  return img;
}

void generate_synthetic_dataset(const std::string& root,
                                const SynthConfig& config) {
  if (config.per_class < 1 || config.size < 8)
    fail(Errc::kBadParameter, "synthetic dataset needs per_class >= 1, size >= 8");
  fs::create_directories(fs::path(root) / "real");
  fs::create_directories(fs::path(root) / "gan");
  char name[32];
  for (int i = 0; i < config.per_class; ++i) {
    std::snprintf(name, sizeof(name), "r%05d.png", i);
    save_image(synthesize_image(config.seed, std::uint64_t(i), config.size,
                                /*decorrelate=*/false),
               (fs::path(root) / "real" / name).string(), ImageFormat::kPng);
    std::snprintf(name, sizeof(name), "g%05d.png", i);
    save_image(synthesize_image(config.seed, (1ull << 32) + std::uint64_t(i),
                                config.size, /*decorrelate=*/true),
               (fs::path(root) / "gan" / name).string(), ImageFormat::kPng);
  }
}

}  // namespace ccooc
