#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crosscooc/attacks.hpp"
#include "crosscooc/features.hpp"
#include "crosscooc/jpegcodec.hpp"
#include "crosscooc/nn.hpp"

namespace ccooc {

inline constexpr int kLabelReal = 0;
inline constexpr int kLabelGan = 1;

// Feature files store probability-normalized planes (each sums to 1), which
// keeps them independent of image size but leaves typical cell values around
// 1e-5 — far too small to drive the network at the fixed optimizer settings.
// Every training and evaluation path therefore feeds the network
// cell * kInputScale. One bin-count (256) puts typical cell values and the
// initial logits near O(0.1..1); much larger factors (>= ~4096) saturate the
// float sigmoid at initialization, which zeroes its backward signal and
// freezes training, while the raw stored values leave it too weak to move.
inline constexpr float kInputScale = float(kCoocBins);

struct DatasetEntry {
  std::string path;  // relative to the manifest root
  int label = kLabelReal;
};

struct DatasetManifest {
  std::string root;
  std::vector<DatasetEntry> entries;

  int count(int label) const;
  std::string full_path(std::size_t i) const;
};

// Expects root/real/ and root/gan/ with .png or .ppm files; entries are
// ordered lexicographically by relative path so reruns are identical.
DatasetManifest ingest(const std::string& root);

struct SplitSpec {
  double train = 0.6, val = 0.2, test = 0.2;  // per-class fractions
  std::uint64_t seed = 0;
};

struct SplitResult {
  DatasetManifest train, val, test;
};

// Stratified seeded split; floors train/val counts per class, remainder
// goes to test.
SplitResult split(const DatasetManifest& manifest, const SplitSpec& spec);

struct ExtractConfig {
  Offset tau{1, 1};        // spatial offset
  Offset tau_prime{1, 1};  // cross-band offset
  int planes = 6;          // 6 = spatial + cross-band, 3 = spatial only
  int jobs = 1;
};

struct ExtractFailure {
  std::string path;
  std::string message;
};

struct ExtractResult {
  int written = 0;
  std::vector<ExtractFailure> failures;
};

// One .cbco per image (class subdirectories mirrored) plus index.tsv with
// `relative-path<TAB>label` lines. Bad items are recorded, not fatal.
ExtractResult extract_corpus(const DatasetManifest& manifest,
                             const ExtractConfig& config,
                             const std::string& out_dir);

struct FeatureCorpus {
  int plane_count = 0;
  std::vector<std::string> names;
  std::vector<int> labels;
  std::vector<FeatureTensor> tensors;

  std::size_t size() const { return tensors.size(); }
};

// Reads a corpus directory written by extract_corpus. force_planes = 3 keeps
// only the spatial planes of 6-plane files (the 3-plane tensor is a prefix
// of the 6-plane one); 0 keeps the stored plane count.
FeatureCorpus load_corpus(const std::string& dir, int force_planes = 0);

struct TrainConfig {
  double lr = 0.01;
  double momentum = 0.9;
  int batch = 40;
  int epochs = 40;
  Offset tau{1, 1};
  Offset tau_prime{1, 1};
  std::string net_kind = "crossconet";  // "conet" or "crossconet"
  double width_factor = 1.0;
  std::uint64_t seed = 0;
  double early_stop_loss = -1.0;  // stop once epoch mean loss < this, if >= 0
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double val_accuracy = -1.0;  // -1 when no validation corpus
};

struct TrainResult {
  Network<float> net;       // final parameters
  Network<float> best_net;  // best validation accuracy (== net without val)
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

int planes_for_net(const std::string& net_kind);

TrainResult train(const FeatureCorpus& train_set, const FeatureCorpus* val_set,
                  const TrainConfig& config);

struct EvalResult {
  double accuracy = 0.0;
  double recall_real = 0.0;
  double recall_gan = 0.0;
  int correct = 0;
  int total = 0;
};

// Threshold rule: prediction >= 0.5 classifies as gan.
EvalResult evaluate(Network<float>& net, const FeatureCorpus& corpus);

struct ReportRow {
  std::string operation;
  std::string parameter;
  std::string dataset;
  std::string network;
  double accuracy = 0.0;  // fraction in [0,1]
};

struct Report {
  std::vector<ReportRow> rows;
};

// CSV columns `operation,parameter,dataset,network,accuracy`; accuracy as a
// percentage with two decimals (e.g. 96.25). JSON mirrors the rows.
void emit_report(const Report& report, const std::string& format,
                 const std::string& path);

// Fixed parameter grids (row order matches the published tables).
std::vector<AttackSpec> table2_attacks();
std::vector<int> table3_eval_qualities();   // 73..97 incl. mismatched QFs
std::vector<int> jpeg_aware_train_qualities();  // 75,80,85,90,95
std::vector<AttackSpec> table45_attacks();  // median 5, resize .8, noise 2, zoom 1.9, AHE

struct RobustnessConfig {
  ExtractConfig features;
  std::string dataset_label = "dataset";
  std::string network_label = "network";
  std::uint64_t noise_seed = 0;  // stream is the image index
  // When set, images are JPEG-compressed at each QF after the attack
  // (JPEG-aware protocol, table 4/5 shape).
  std::vector<int> jpeg_qfs;
  ChromaMode chroma = ChromaMode::k444;
};

// Applies each attack to every test image, re-extracts features, evaluates.
// One row per attack (or per attack x QF when jpeg_qfs is set).
Report robustness_eval(Network<float>& net, const DatasetManifest& test_images,
                       const std::vector<AttackSpec>& attacks,
                       const RobustnessConfig& config);

// Per-QF evaluation of a model on JPEG-compressed inputs (table 3 shape).
Report jpeg_eval(Network<float>& net, const DatasetManifest& test_images,
                 const std::vector<int>& qualities,
                 const RobustnessConfig& config);

struct JpegAwareConfig {
  std::vector<int> train_qfs = {75, 80, 85, 90, 95};
  int per_qf_count = 0;  // images per QF per class; 0 = all at every QF
  ChromaMode chroma = ChromaMode::k444;
};

// Builds the training corpus as the union over train QFs of
// compressed-then-featurized images, then trains as usual.
TrainResult jpeg_aware_train(const DatasetManifest& train_images,
                             const DatasetManifest* val_images,
                             const JpegAwareConfig& jpeg_config,
                             const TrainConfig& train_config);

// Synthetic desk-scale benchmark: "real" images are smooth multi-scale
// value-noise with strongly correlated bands; "gan" images additionally run
// each band through an independent monotone intensity remap, which
// decorrelates the cross-band co-occurrence structure.
struct SynthConfig {
  int per_class = 300;
  int size = 256;
  std::uint64_t seed = 7;
};

void generate_synthetic_dataset(const std::string& root,
                                const SynthConfig& config);

RgbImage synthesize_image(std::uint64_t seed, std::uint64_t index, int size,
                          bool decorrelate);

}  // namespace ccooc
