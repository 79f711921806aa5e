// Command-line front end for the co-occurrence forensics pipeline:
// feature extraction, post-processing attacks, a baseline JPEG codec,
// training, evaluation, and robustness sweeps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "crosscooc/harness.hpp"
#include "crosscooc/models.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ccooc;

namespace {

std::uint64_t resolve_seed(std::int64_t flag_seed, bool seed_given) {
  if (seed_given) return std::uint64_t(flag_seed);
  if (const char* env = std::getenv("CROSSCOOC_SEED")) {
    try {
      return std::uint64_t(std::stoull(env));
    } catch (const std::exception&) {
      fail(Errc::kBadParameter,
           std::string("CROSSCOOC_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

ImageFormat format_for(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".png") return ImageFormat::kPng;
  if (ext == ".ppm") return ImageFormat::kPpm;
  fail(Errc::kUnsupportedFormat, "cannot infer image format for " + path);
}

ChromaMode chroma_for(const std::string& text) {
  if (text == "444") return ChromaMode::k444;
  if (text == "420") return ChromaMode::k420;
  fail(Errc::kBadParameter, "chroma must be 444 or 420");
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::vector<AttackSpec> resolve_attacks(const std::string& text) {
  if (text == "table2") return table2_attacks();
  if (text == "table45") return table45_attacks();
  return parse_attack_list(text);
}

std::string default_network_label(int planes) {
  return planes == 6 ? "Cross-Co-Net" : "Co-Net";
}

void write_sidecar(const std::string& model_path, const TrainConfig& config,
                   int planes) {
  nlohmann::json j{
      {"format", "ccnw-1"},
      {"net", config.net_kind},
      {"input_planes", planes},
      {"width_factor", config.width_factor},
      {"seed", config.seed},
      {"tau", to_string(config.tau)},
      {"tau_prime", to_string(config.tau_prime)},
      {"normalization", "per-plane-sum-1"},
      {"lr", config.lr},
      {"momentum", config.momentum},
      {"batch", config.batch},
      {"epochs", config.epochs},
  };
  std::ofstream out(model_path + ".json", std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIoError, "cannot write " + model_path + ".json");
  out << j.dump(2) << '\n';
}

void print_train_log(const TrainResult& result) {
  for (const EpochLog& log : result.log) {
    std::cout << "epoch " << log.epoch << " loss " << log.mean_loss;
    if (log.val_accuracy >= 0.0) std::cout << " val-acc " << log.val_accuracy;
    std::cout << "\n";
  }
}

Report read_report(const std::string& path) {
  Report report;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kFileNotFound, path);
  if (fs::path(path).extension() == ".json") {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array())
      fail(Errc::kCorruptStream, "not a JSON report: " + path);
    for (const auto& row : j)
      report.rows.push_back({row.at("operation"), row.at("parameter"),
                             row.at("dataset"), row.at("network"),
                             std::stod(row.at("accuracy").get<std::string>()) /
                                 100.0});
    return report;
  }
  std::string line;
  if (!std::getline(in, line) ||
      line != "operation,parameter,dataset,network,accuracy")
    fail(Errc::kCorruptStream, "not a report CSV: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    ReportRow row;
    std::string acc;
    if (!std::getline(ss, row.operation, ',') ||
        !std::getline(ss, row.parameter, ',') ||
        !std::getline(ss, row.dataset, ',') ||
        !std::getline(ss, row.network, ',') || !std::getline(ss, acc))
      fail(Errc::kCorruptStream, "bad report row: " + line);
    row.accuracy = std::stod(acc) / 100.0;
    report.rows.push_back(row);
  }
  return report;
}

struct GlobalFlags {
  std::int64_t seed = 0;
  bool seed_given = false;
  std::string tau = "1,1";
  std::string tau_prime = "1,1";
  int jobs = int(std::thread::hardware_concurrency());
};

void announce(const std::string& subcommand, const GlobalFlags& g,
              std::uint64_t seed, const std::string& extra) {
  std::cout << "config " << subcommand << ": seed=" << seed << " tau=" << g.tau
            << " tau-prime=" << g.tau_prime << " jobs=" << g.jobs
            << " normalization=per-plane-sum-1"
            << (extra.empty() ? "" : " " + extra) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAN-image forensics from pixel co-occurrence tensors"};
  app.require_subcommand(1);

  GlobalFlags g;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", g.seed, "RNG seed (fallback: CROSSCOOC_SEED)")
        ->each([&](const std::string&) { g.seed_given = true; });
    cmd->add_option("--tau", g.tau, "spatial co-occurrence offset dr,dc");
    cmd->add_option("--tau-prime", g.tau_prime,
                    "cross-band co-occurrence offset dr,dc");
    cmd->add_option("--jobs", g.jobs, "worker threads (1 = fully serial)");
  };

  // extract
  auto* c_extract = app.add_subcommand(
      "extract", "Extract co-occurrence feature tensors for a dataset");
  std::string in_dir, out_path, net_kind = "crossconet";
  c_extract->add_option("--in", in_dir, "dataset root with real/ and gan/")
      ->required();
  c_extract->add_option("--out", out_path, "output corpus directory")
      ->required();
  c_extract->add_option("--net", net_kind, "conet (3 planes) or crossconet (6)")
      ->check(CLI::IsMember({"conet", "crossconet"}));
  add_common(c_extract);

  // attack
  auto* c_attack =
      app.add_subcommand("attack", "Apply a post-processing attack to an image");
  std::string attack_spec, attack_in, attack_out;
  std::uint64_t attack_stream = 0;
  c_attack->add_option("--spec", attack_spec, "attack spec, e.g. resize:0.8")
      ->required();
  c_attack->add_option("--in", attack_in, "input image (png/ppm)")->required();
  c_attack->add_option("--out", attack_out, "output image (png/ppm)")
      ->required();
  c_attack->add_option("--stream", attack_stream,
                       "noise stream index (e.g. image index)");
  add_common(c_attack);

  // jpeg
  auto* c_jpeg = app.add_subcommand(
      "jpeg", "Baseline JPEG: encode to .jpg, decode from .jpg, or round-trip");
  std::string jpeg_in, jpeg_out, chroma_text = "444";
  int qf = 95;
  c_jpeg->add_option("--in", jpeg_in, "input image (png/ppm/jpg)")->required();
  c_jpeg->add_option("--out", jpeg_out, "output image (png/ppm/jpg)")
      ->required();
  c_jpeg->add_option("--qf", qf, "quality factor in [1,100]")
      ->check(CLI::Range(1, 100));
  c_jpeg->add_option("--chroma", chroma_text, "chroma sampling: 444 or 420");
  add_common(c_jpeg);

  // train
  auto* c_train = app.add_subcommand("train", "Train a detector on a corpus");
  std::string corpus_dir, val_corpus_dir, model_out, log_out;
  TrainConfig tc;
  double early_stop = -1.0;
  c_train->add_option("--corpus", corpus_dir, "feature corpus directory")
      ->required();
  c_train->add_option("--val-corpus", val_corpus_dir,
                      "validation corpus directory");
  c_train->add_option("--out", model_out, "checkpoint output path")->required();
  c_train->add_option("--net", net_kind, "conet or crossconet")
      ->check(CLI::IsMember({"conet", "crossconet"}));
  c_train->add_option("--width-factor", tc.width_factor,
                      "filter/dense width multiplier in (0,1]");
  c_train->add_option("--lr", tc.lr, "learning rate");
  c_train->add_option("--momentum", tc.momentum, "momentum");
  c_train->add_option("--batch", tc.batch, "batch size");
  c_train->add_option("--epochs", tc.epochs, "training epochs");
  c_train->add_option("--early-stop-loss", early_stop,
                      "stop once epoch mean loss drops below this");
  c_train->add_option("--log", log_out, "write epoch log CSV here");
  add_common(c_train);

  // train-jpeg-aware
  auto* c_jtrain = app.add_subcommand(
      "train-jpeg-aware",
      "Train on JPEG-compressed images across a set of quality factors");
  std::string jt_in, jt_val_in, qf_train_text = "75,80,85,90,95";
  int per_qf = 0;
  c_jtrain->add_option("--in", jt_in, "image dataset root")->required();
  c_jtrain->add_option("--val-in", jt_val_in, "validation image dataset root");
  c_jtrain->add_option("--out", model_out, "checkpoint output path")
      ->required();
  c_jtrain->add_option("--qf-train", qf_train_text, "training quality factors");
  c_jtrain->add_option("--per-qf", per_qf,
                       "images per QF per class (0 = all at every QF)");
  c_jtrain->add_option("--chroma", chroma_text, "chroma sampling: 444 or 420");
  c_jtrain->add_option("--net", net_kind, "conet or crossconet")
      ->check(CLI::IsMember({"conet", "crossconet"}));
  c_jtrain->add_option("--width-factor", tc.width_factor, "width multiplier");
  c_jtrain->add_option("--lr", tc.lr, "learning rate");
  c_jtrain->add_option("--momentum", tc.momentum, "momentum");
  c_jtrain->add_option("--batch", tc.batch, "batch size");
  c_jtrain->add_option("--epochs", tc.epochs, "training epochs");
  add_common(c_jtrain);

  // eval
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus");
  std::string model_path, dataset_label = "dataset", network_label, fmt = "csv";
  c_eval->add_option("--model", model_path, "checkpoint path")->required();
  c_eval->add_option("--corpus", corpus_dir, "feature corpus directory")
      ->required();
  c_eval->add_option("--dataset-label", dataset_label, "report dataset column");
  c_eval->add_option("--network-label", network_label, "report network column");
  c_eval->add_option("--out", out_path, "report output path");
  c_eval->add_option("--format", fmt, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(c_eval);

  // robustness
  auto* c_rob = app.add_subcommand(
      "robustness", "Accuracy under post-processing attacks and/or JPEG");
  std::string attacks_text = "table2", qf_eval_text, mode = "attacks";
  std::uint64_t noise_seed = 0;
  c_rob->add_option("--model", model_path, "checkpoint path")->required();
  c_rob->add_option("--in", in_dir, "test image dataset root")->required();
  c_rob->add_option("--attacks", attacks_text,
                    "attack list, or table2 / table45");
  c_rob->add_option("--mode", mode,
                    "attacks | jpeg (QF sweep) | jpeg-attacks (attack then "
                    "compress at each QF)")
      ->check(CLI::IsMember({"attacks", "jpeg", "jpeg-attacks"}));
  c_rob->add_option("--qf-eval", qf_eval_text,
                    "quality factors for jpeg modes (default: table 3 list)");
  c_rob->add_option("--chroma", chroma_text, "chroma sampling: 444 or 420");
  c_rob->add_option("--noise-seed", noise_seed,
                    "seed for noise attacks without an explicit seed=");
  c_rob->add_option("--dataset-label", dataset_label, "report dataset column");
  c_rob->add_option("--network-label", network_label, "report network column");
  c_rob->add_option("--out", out_path, "report output path")->required();
  c_rob->add_option("--format", fmt, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(c_rob);

  // report
  auto* c_report = app.add_subcommand(
      "report", "Merge and convert report files (csv or json)");
  std::vector<std::string> report_inputs;
  c_report->add_option("--in", report_inputs, "input report files")->required();
  c_report->add_option("--out", out_path, "output path")->required();
  c_report->add_option("--format", fmt, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(c_report);

  // heatmap
  auto* c_heat = app.add_subcommand(
      "heatmap", "Render one co-occurrence matrix as a log-scaled PGM");
  std::string plane_text = "r";
  c_heat->add_option("--in", in_dir, "input image")->required();
  c_heat->add_option("--out", out_path, "output .pgm path")->required();
  c_heat->add_option("--plane", plane_text, "r|g|b|rg|rb|gb")
      ->check(CLI::IsMember({"r", "g", "b", "rg", "rb", "gb"}));
  add_common(c_heat);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const std::uint64_t seed = resolve_seed(g.seed, g.seed_given);
    const Offset tau = parse_offset(g.tau);
    const Offset tau_prime = parse_offset(g.tau_prime);
    if (g.jobs < 1) g.jobs = 1;

    if (c_extract->parsed()) {
      announce("extract", g, seed, "net=" + net_kind + " in=" + in_dir);
      ExtractConfig cfg;
      cfg.tau = tau;
      cfg.tau_prime = tau_prime;
      cfg.planes = planes_for_net(net_kind);
      cfg.jobs = g.jobs;
      const DatasetManifest manifest = ingest(in_dir);
      const ExtractResult result = extract_corpus(manifest, cfg, out_path);
      for (const ExtractFailure& f : result.failures)
        std::cerr << "warning: " << f.path << ": " << f.message << "\n";
      std::cout << "extracted " << result.written << " of "
                << manifest.entries.size() << " images\n";
      if (result.written == 0) fail(Errc::kEmptyClass, "no image extracted");
    } else if (c_attack->parsed()) {
      announce("attack", g, seed, "spec=" + attack_spec);
      AttackSpec spec = parse_attack(attack_spec);
      if (spec.kind == AttackKind::kGaussianNoise && spec.seed == 0)
        spec.seed = seed;
      const RgbImage img = load_image(attack_in);
      save_image(apply(spec, img, attack_stream), attack_out,
                 format_for(attack_out));
      std::cout << "wrote " << attack_out << "\n";
    } else if (c_jpeg->parsed()) {
      announce("jpeg", g, seed,
               "qf=" + std::to_string(qf) + " chroma=" + chroma_text);
      const ChromaMode chroma = chroma_for(chroma_text);
      const std::string in_ext = fs::path(jpeg_in).extension().string();
      const std::string out_ext = fs::path(jpeg_out).extension().string();
      const bool in_jpg = in_ext == ".jpg" || in_ext == ".jpeg";
      const bool out_jpg = out_ext == ".jpg" || out_ext == ".jpeg";
      if (in_jpg && out_jpg)
        fail(Errc::kBadParameter, "jpg-to-jpg transcode is not supported");
      if (out_jpg) {
        write_binary_file(jpeg_out, jpeg_encode(load_image(jpeg_in),
                                                QualityFactor{qf}, chroma));
      } else if (in_jpg) {
        save_image(jpeg_decode(read_binary_file(jpeg_in)), jpeg_out,
                   format_for(jpeg_out));
      } else {
        save_image(jpeg_roundtrip(load_image(jpeg_in), QualityFactor{qf},
                                  chroma),
                   jpeg_out, format_for(jpeg_out));
      }
      std::cout << "wrote " << jpeg_out << "\n";
    } else if (c_train->parsed()) {
      announce("train", g, seed,
               "net=" + net_kind + " corpus=" + corpus_dir);
      tc.net_kind = net_kind;
      tc.seed = seed;
      tc.tau = tau;
      tc.tau_prime = tau_prime;
      tc.early_stop_loss = early_stop;
      const int planes = planes_for_net(net_kind);
      const FeatureCorpus train_set = load_corpus(corpus_dir, planes);
      FeatureCorpus val_set;
      if (!val_corpus_dir.empty()) val_set = load_corpus(val_corpus_dir, planes);
      TrainResult result =
          train(train_set, val_corpus_dir.empty() ? nullptr : &val_set, tc);
      print_train_log(result);
      save_checkpoint(result.net, model_out);
      write_sidecar(model_out, tc, planes);
      if (!val_corpus_dir.empty()) {
        save_checkpoint(result.best_net, model_out + ".best");
        write_sidecar(model_out + ".best", tc, planes);
        std::cout << "best epoch " << result.best_epoch << "\n";
      }
      std::cout << "wrote " << model_out << "\n";
      if (!log_out.empty()) {
        std::ofstream log(log_out, std::ios::binary | std::ios::trunc);
        log << "epoch,mean_loss,val_accuracy\n";
        for (const EpochLog& l : result.log)
          log << l.epoch << ',' << l.mean_loss << ',' << l.val_accuracy
              << '\n';
      }
    } else if (c_jtrain->parsed()) {
      announce("train-jpeg-aware", g, seed,
               "net=" + net_kind + " qf-train=" + qf_train_text);
      tc.net_kind = net_kind;
      tc.seed = seed;
      tc.tau = tau;
      tc.tau_prime = tau_prime;
      JpegAwareConfig jcfg;
      jcfg.train_qfs = parse_int_list(qf_train_text);
      jcfg.per_qf_count = per_qf;
      jcfg.chroma = chroma_for(chroma_text);
      const DatasetManifest train_images = ingest(jt_in);
      DatasetManifest val_images;
      if (!jt_val_in.empty()) val_images = ingest(jt_val_in);
      TrainResult result = jpeg_aware_train(
          train_images, jt_val_in.empty() ? nullptr : &val_images, jcfg, tc);
      print_train_log(result);
      save_checkpoint(result.net, model_out);
      write_sidecar(model_out, tc, planes_for_net(net_kind));
      std::cout << "wrote " << model_out << "\n";
    } else if (c_eval->parsed()) {
      announce("eval", g, seed, "model=" + model_path);
      Network<float> net = load_checkpoint(model_path);
      if (network_label.empty())
        network_label = default_network_label(net.spec().input_planes);
      const FeatureCorpus corpus =
          load_corpus(corpus_dir, net.spec().input_planes);
      const EvalResult r = evaluate(net, corpus);
      std::cout << "accuracy " << r.accuracy << " recall-real "
                << r.recall_real << " recall-gan " << r.recall_gan << " ("
                << r.correct << "/" << r.total << ")\n";
      if (!out_path.empty()) {
        Report report;
        report.rows.push_back(
            {"Clean", "-", dataset_label, network_label, r.accuracy});
        emit_report(report, fmt, out_path);
        std::cout << "wrote " << out_path << "\n";
      }
    } else if (c_rob->parsed()) {
      announce("robustness", g, seed,
               "mode=" + mode + " attacks=" + attacks_text);
      Network<float> net = load_checkpoint(model_path);
      if (network_label.empty())
        network_label = default_network_label(net.spec().input_planes);
      const DatasetManifest test_images = ingest(in_dir);
      RobustnessConfig cfg;
      cfg.features.tau = tau;
      cfg.features.tau_prime = tau_prime;
      cfg.features.planes = net.spec().input_planes;
      cfg.dataset_label = dataset_label;
      cfg.network_label = network_label;
      cfg.noise_seed = noise_seed != 0 ? noise_seed : seed;
      cfg.chroma = chroma_for(chroma_text);
      const std::vector<int> qfs = qf_eval_text.empty()
                                       ? table3_eval_qualities()
                                       : parse_int_list(qf_eval_text);
      Report report;
      if (mode == "jpeg") {
        report = jpeg_eval(net, test_images, qfs, cfg);
      } else {
        if (mode == "jpeg-attacks") cfg.jpeg_qfs = qfs;
        report =
            robustness_eval(net, test_images, resolve_attacks(attacks_text), cfg);
      }
      emit_report(report, fmt, out_path);
      std::cout << "wrote " << out_path << " (" << report.rows.size()
                << " rows)\n";
    } else if (c_report->parsed()) {
      announce("report", g, seed, "");
      Report merged;
      for (const std::string& item : report_inputs) {
        const Report part = read_report(item);
        merged.rows.insert(merged.rows.end(), part.rows.begin(),
                           part.rows.end());
      }
      emit_report(merged, fmt, out_path);
      std::cout << "wrote " << out_path << " (" << merged.rows.size()
                << " rows)\n";
    } else if (c_heat->parsed()) {
      announce("heatmap", g, seed, "plane=" + plane_text);
      const RgbImage img = load_image(in_dir);
      CoocMatrix m = [&] {
        if (plane_text == "r") return spatial_cooc(channel(img, 1), tau);
        if (plane_text == "g") return spatial_cooc(channel(img, 2), tau);
        if (plane_text == "b") return spatial_cooc(channel(img, 3), tau);
        if (plane_text == "rg") return cross_cooc(img, CoocSource::kRG, tau_prime);
        if (plane_text == "rb") return cross_cooc(img, CoocSource::kRB, tau_prime);
        return cross_cooc(img, CoocSource::kGB, tau_prime);
      }();
      emit_heatmap(m, out_path);
      std::cout << "wrote " << out_path << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_numeric_fault() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
