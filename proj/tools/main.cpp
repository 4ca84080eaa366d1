// pupilload: pupil-diameter cognitive-load feature pipeline.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "experiments.hpp"

using namespace pupilload;

int main(int argc, char** argv) {
  CLI::App app{"Pupil-diameter cognitive-load features, classifiers, and experiment tables"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file with key=value lines (sections per subcommand)");

  cli::CommonOptions opt;
  std::string manifest, recording, out, methods, windows, hidden;
  int n_per_class = 40;
  double duration_s = 60.0, rate_hz = 240.0;
  int nn_epochs = kDefaultNnEpochs;
  double nn_lr = kDefaultNnLearningRate;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Random seed")->envname("PUPILLOAD_SEED")
        ->capture_default_str();
  };
  auto add_fit_options = [&](CLI::App* cmd) {
    cmd->add_option("--bins", opt.bins, "Histogram bins over [0,1]")->capture_default_str();
    cmd->add_option("--min-samples", opt.min_samples, "Minimum samples per segment")
        ->capture_default_str();
    cmd->add_option("--confidence", opt.confidence, "Confidence filter threshold")
        ->capture_default_str();
  };

  auto* est = app.add_subcommand("estimate-splits",
                                 "Estimate the segment count on a manifest of recordings");
  est->add_option("manifest", manifest, "Manifest CSV")->required();
  est->add_option("--subset-fraction", opt.subset_fraction,
                  "Fraction of recordings sampled for the estimate")
      ->capture_default_str();
  est->add_option("--k-min", opt.k_min, "Smallest segment count tried")->capture_default_str();
  est->add_option("--k-max", opt.k_max, "Largest segment count tried")->capture_default_str();
  add_fit_options(est);
  add_seed(est);

  auto* ext = app.add_subcommand("extract", "Write the feature matrix of a manifest to CSV");
  ext->add_option("manifest", manifest, "Manifest CSV")->required();
  ext->add_option("--k", opt.k, "Segment count (0 = estimate first)")->capture_default_str();
  ext->add_option("--out", out, "Output CSV path")->required();
  ext->add_option("--subset-fraction", opt.subset_fraction, "Subset fraction when estimating k")
      ->capture_default_str();
  ext->add_option("--k-max", opt.k_max, "Largest segment count tried when estimating")
      ->capture_default_str();
  add_fit_options(ext);
  add_seed(ext);

  auto* t1 = app.add_subcommand("table1", "Whole-recording classification experiment");
  t1->add_option("manifest", manifest, "Manifest CSV")->required();
  t1->add_option("--k", opt.k, "Segment count (0 = estimate on the training split)")
      ->capture_default_str();
  t1->add_option("--methods", methods, "Comma list of RF,GNB,LR,SVM,KNN,DA")
      ->default_val("RF,GNB,LR,SVM,KNN,DA");
  t1->add_option("--train-fraction", opt.train_fraction, "Training fraction")
      ->capture_default_str();
  t1->add_option("--subset-fraction", opt.subset_fraction, "Subset fraction when estimating k")
      ->capture_default_str();
  t1->add_option("--k-max", opt.k_max, "Largest segment count tried when estimating")
      ->capture_default_str();
  t1->add_option("--out-csv", out, "Machine-readable results CSV")->default_val("table1.csv");
  add_fit_options(t1);
  add_seed(t1);

  auto* t2 = app.add_subcommand("table2", "Sliding-window (online) classification experiment");
  t2->add_option("manifest", manifest, "Manifest CSV")->required();
  t2->add_option("--windows", windows, "Comma list of window sizes in seconds")
      ->default_val("10,15,20,25,30");
  t2->add_option("--methods", methods, "Comma list of methods")->default_val("RF,SVM");
  t2->add_option("--train-fraction", opt.train_fraction, "Training fraction")
      ->capture_default_str();
  t2->add_option("--subset-fraction", opt.subset_fraction, "Subset fraction when estimating k")
      ->capture_default_str();
  t2->add_option("--k-max", opt.k_max, "Largest segment count tried when estimating")
      ->capture_default_str();
  t2->add_option("--out-csv", out, "Machine-readable results CSV")->default_val("table2.csv");
  add_fit_options(t2);
  add_seed(t2);

  auto* t3 = app.add_subcommand("table3", "Mean-TLX regression experiment");
  t3->add_option("manifest", manifest, "Manifest CSV")->required();
  t3->add_option("--hidden", hidden, "Comma list of hidden-layer sizes")->default_val("5,10,20");
  t3->add_option("--k", opt.k, "Segment count (0 = estimate on the training split)")
      ->capture_default_str();
  t3->add_option("--train-fraction", opt.train_fraction, "Training fraction")
      ->capture_default_str();
  t3->add_option("--subset-fraction", opt.subset_fraction, "Subset fraction when estimating k")
      ->capture_default_str();
  t3->add_option("--k-max", opt.k_max, "Largest segment count tried when estimating")
      ->capture_default_str();
  t3->add_option("--epochs", nn_epochs, "Training epochs")->capture_default_str();
  t3->add_option("--lr", nn_lr, "Learning rate")->capture_default_str();
  t3->add_option("--out-csv", out, "Machine-readable results CSV")->default_val("table3.csv");
  add_fit_options(t3);
  add_seed(t3);

  auto* plot = app.add_subcommand("plot-fits", "Export per-segment histogram and fitted curves");
  plot->add_option("recording", recording, "Recording CSV")->required();
  plot->add_option("--k", opt.k, "Segment count")->required();
  plot->add_option("--out", out, "Output directory")->default_val("fits");
  add_fit_options(plot);
  add_seed(plot);

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  synth->add_option("--out", out, "Output directory")->default_val("synth-data");
  synth->add_option("--n-per-class", n_per_class, "Recordings per class")->capture_default_str();
  synth->add_option("--duration", duration_s, "Recording length in seconds")
      ->capture_default_str();
  synth->add_option("--rate", rate_hz, "Sampling rate in Hz")->capture_default_str();
  add_seed(synth);

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cli::cmd_estimate_splits(manifest, opt);
    if (ext->parsed()) return cli::cmd_extract(manifest, opt, out);
    if (t1->parsed()) return cli::cmd_table1(manifest, opt, methods, out);
    if (t2->parsed()) return cli::cmd_table2(manifest, opt, methods, windows, out);
    if (t3->parsed()) return cli::cmd_table3(manifest, opt, hidden, nn_epochs, nn_lr, out);
    if (plot->parsed()) return cli::cmd_plot_fits(recording, opt, out);
    if (synth->parsed()) return cli::cmd_synth(out, n_per_class, duration_s, rate_hz, opt.seed);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
