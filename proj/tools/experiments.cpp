#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pupilload/synth.hpp"

namespace pupilload::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_on_comma(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    // trim spaces
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string percent(double v) { return fmt(100.0 * v, "%.2f"); }

void print_config_header(const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& kv) {
  std::printf("# %s", command.c_str());
  for (const auto& [key, value] : kv) std::printf(" %s=%s", key.c_str(), value.c_str());
  std::printf("\n");
}

int resolve_k(const std::vector<Recording>& train, const CommonOptions& opt) {
  if (opt.k > 0) return opt.k;
  const int k = estimate_splits(train, opt.subset_fraction, {opt.k_min, opt.k_max}, opt.bins,
                                opt.seed, opt.min_samples);
  std::printf("# estimated splits on the training set: %d\n", k);
  return k;
}

TrainedModel fit_method(ModelKind kind, const Matrix& x, const std::vector<int>& y,
                        std::uint64_t seed) {
  return fit_classifier(kind, x, y, {}, seed);
}

ClassificationMetrics evaluate(const TrainedModel& model, const Matrix& x,
                               const std::vector<int>& y) {
  const auto pred = model.predict(x);
  return classification_metrics(confusion_matrix(y, pred, 3));
}

std::vector<Recording> windows_as_recordings(const std::vector<Recording>& recs, double window_s) {
  std::vector<Recording> out;
  for (const auto& rec : recs)
    for (const auto& w : window_recording(rec, window_s, window_s / 2.0))
      out.push_back(w.as_recording());
  return out;
}

}  // namespace

std::vector<ModelKind> parse_methods(const std::string& csv) {
  std::vector<ModelKind> out;
  for (const auto& name : split_on_comma(csv)) out.push_back(kind_from_name(name));
  if (out.empty()) throw Error("no methods given");
  return out;
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_on_comma(csv)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size()) throw Error("bad number '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty number list");
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_number_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

LabeledFeatures proposed_features(const std::vector<Recording>& recs, int k) {
  LabeledFeatures out;
  std::vector<std::vector<double>> rows;
  for (const auto& rec : recs) {
    try {
      rows.push_back(extract_feature(rec, k).values);
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping '%s': %s\n", rec.id.c_str(), e.what());
      continue;
    }
    out.y.push_back(static_cast<int>(rec.label.cls));
    out.scores.push_back(rec.label.mean_score);
    out.ids.push_back(rec.id);
  }
  if (rows.empty()) throw Error("no recording survived feature extraction");
  out.x = Matrix::from_rows(rows);
  return out;
}

LabeledFeatures baseline_features(const std::vector<Recording>& recs) {
  LabeledFeatures out;
  std::vector<std::vector<double>> rows;
  for (const auto& rec : recs) {
    try {
      const auto s = baseline_pupil_stats(rec);
      rows.emplace_back(s.begin(), s.end());
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping '%s': %s\n", rec.id.c_str(), e.what());
      continue;
    }
    out.y.push_back(static_cast<int>(rec.label.cls));
    out.scores.push_back(rec.label.mean_score);
    out.ids.push_back(rec.id);
  }
  if (rows.empty()) throw Error("no recording survived feature extraction");
  out.x = Matrix::from_rows(rows);
  return out;
}

void print_metric_table(const std::vector<MetricRow>& rows) {
  const bool with_window =
      std::any_of(rows.begin(), rows.end(), [](const MetricRow& r) { return r.window_s.has_value(); });
  if (with_window)
    std::printf("%-10s %-8s %-12s %9s %10s %8s %8s\n", "feature", "method", "window(s)", "accuracy",
                "precision", "recall", "f1");
  else
    std::printf("%-10s %-8s %9s %10s %8s %8s\n", "feature", "method", "accuracy", "precision",
                "recall", "f1");
  for (const auto& r : rows) {
    if (with_window)
      std::printf("%-10s %-8s %-12s %9s %10s %8s %8s\n", r.feature.c_str(), r.method.c_str(),
                  r.window_s ? fmt(*r.window_s, "%g").c_str() : "-",
                  percent(r.metrics.accuracy).c_str(), percent(r.metrics.macro_precision).c_str(),
                  percent(r.metrics.macro_recall).c_str(), percent(r.metrics.macro_f1).c_str());
    else
      std::printf("%-10s %-8s %9s %10s %8s %8s\n", r.feature.c_str(), r.method.c_str(),
                  percent(r.metrics.accuracy).c_str(), percent(r.metrics.macro_precision).c_str(),
                  percent(r.metrics.macro_recall).c_str(), percent(r.metrics.macro_f1).c_str());
  }
}

void write_metric_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  const bool with_window =
      std::any_of(rows.begin(), rows.end(), [](const MetricRow& r) { return r.window_s.has_value(); });
  f << "feature,method" << (with_window ? ",window_s" : "")
    << ",accuracy,precision,recall,f1\n";
  for (const auto& r : rows) {
    f << r.feature << ',' << r.method;
    if (with_window) f << ',' << (r.window_s ? fmt(*r.window_s, "%g") : "");
    f << ',' << percent(r.metrics.accuracy) << ',' << percent(r.metrics.macro_precision) << ','
      << percent(r.metrics.macro_recall) << ',' << percent(r.metrics.macro_f1) << '\n';
  }
  std::printf("# wrote %s\n", path.string().c_str());
}

int cmd_estimate_splits(const fs::path& manifest, const CommonOptions& opt) {
  print_config_header("estimate-splits",
                      {{"manifest", manifest.string()},
                       {"subset_fraction", fmt(opt.subset_fraction, "%g")},
                       {"k_range", std::to_string(opt.k_min) + ".." + std::to_string(opt.k_max)},
                       {"bins", std::to_string(opt.bins)},
                       {"min_samples", std::to_string(opt.min_samples)},
                       {"seed", std::to_string(opt.seed)}});
  const auto dataset = load_dataset(manifest, {opt.confidence});
  const auto est = estimate_splits_detailed(dataset, opt.subset_fraction, {opt.k_min, opt.k_max},
                                            opt.bins, opt.seed, opt.min_samples);
  std::printf("%-28s %6s %12s\n", "recording", "k*", "cost");
  for (const auto& c : est.per_recording)
    std::printf("%-28s %6d %12s\n", c.recording_id.c_str(), c.best_k,
                fmt(c.best_cost, "%.6f").c_str());
  for (const auto& id : est.skipped)
    std::fprintf(stderr, "warning: '%s' infeasible for every k, skipped\n", id.c_str());
  std::printf("estimated splits: %d\n", est.splits);
  return 0;
}

int cmd_extract(const fs::path& manifest, const CommonOptions& opt, const fs::path& out_csv) {
  print_config_header("extract", {{"manifest", manifest.string()},
                                  {"k", std::to_string(opt.k)},
                                  {"bins", std::to_string(opt.bins)},
                                  {"seed", std::to_string(opt.seed)}});
  const auto dataset = load_dataset(manifest, {opt.confidence});
  const int k = resolve_k(dataset, opt);

  std::ofstream f(out_csv, std::ios::binary);
  if (!f) throw Error("cannot write " + out_csv.string());
  f << "id,subject,activity,mean_tlx,class";
  for (int i = 1; i <= k; ++i) f << ",sn_" << i << ",sb_" << i;
  f << '\n';
  std::size_t written = 0;
  for (const auto& rec : dataset) {
    FeatureVector fv;
    try {
      fv = extract_feature(rec, k);
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping '%s': %s\n", rec.id.c_str(), e.what());
      continue;
    }
    f << rec.id << ',' << rec.subject_id << ',' << rec.activity_id << ','
      << fmt(rec.label.mean_score) << ',' << class_name(rec.label.cls);
    for (double v : fv.values) f << ',' << fmt(v);
    f << '\n';
    ++written;
  }
  std::printf("wrote %zu feature rows (k=%d) to %s\n", written, k, out_csv.string().c_str());
  return 0;
}

int cmd_table1(const fs::path& manifest, const CommonOptions& opt, const std::string& methods,
               const fs::path& out_csv) {
  print_config_header("table1", {{"manifest", manifest.string()},
                                 {"k", std::to_string(opt.k)},
                                 {"bins", std::to_string(opt.bins)},
                                 {"methods", methods},
                                 {"train_fraction", fmt(opt.train_fraction, "%g")},
                                 {"seed", std::to_string(opt.seed)}});
  const auto kinds = parse_methods(methods);
  const auto dataset = load_dataset(manifest, {opt.confidence});
  auto [train, test] = split_train_test(dataset, opt.train_fraction, opt.seed);
  const int k = resolve_k(train, opt);

  const auto prop_train = proposed_features(train, k);
  const auto prop_test = proposed_features(test, k);
  const auto base_train = baseline_features(train);
  const auto base_test = baseline_features(test);

  std::vector<MetricRow> rows;
  for (ModelKind kind : kinds) {
    const auto base_model = fit_method(kind, base_train.x, base_train.y, opt.seed);
    rows.push_back({"baseline", kind_name(kind), std::nullopt,
                    evaluate(base_model, base_test.x, base_test.y)});
  }
  for (ModelKind kind : kinds) {
    const auto prop_model = fit_method(kind, prop_train.x, prop_train.y, opt.seed);
    rows.push_back({"proposed", kind_name(kind), std::nullopt,
                    evaluate(prop_model, prop_test.x, prop_test.y)});
  }
  print_metric_table(rows);
  write_metric_csv(out_csv, rows);
  return 0;
}

int cmd_table2(const fs::path& manifest, const CommonOptions& opt, const std::string& methods,
               const std::string& windows, const fs::path& out_csv) {
  print_config_header("table2", {{"manifest", manifest.string()},
                                 {"windows", windows},
                                 {"methods", methods},
                                 {"bins", std::to_string(opt.bins)},
                                 {"train_fraction", fmt(opt.train_fraction, "%g")},
                                 {"seed", std::to_string(opt.seed)}});
  const auto kinds = parse_methods(methods);
  const auto window_sizes = parse_number_list(windows);
  const auto dataset = load_dataset(manifest, {opt.confidence});

  std::vector<MetricRow> rows;
  for (double window_s : window_sizes) {
    // Split at recording granularity first, then window each side.
    auto [train, test] = split_train_test(dataset, opt.train_fraction, opt.seed);
    const auto train_windows = windows_as_recordings(train, window_s);
    const auto test_windows = windows_as_recordings(test, window_s);
    if (train_windows.empty() || test_windows.empty()) {
      std::fprintf(stderr, "warning: window %gs leaves no data after the exclusion rule\n",
                   window_s);
      continue;
    }
    int k;
    try {
      k = estimate_splits(train_windows, opt.subset_fraction, {opt.k_min, opt.k_max}, opt.bins,
                          opt.seed, opt.min_samples);
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: window %gs: %s\n", window_s, e.what());
      continue;
    }
    std::printf("# window %gs: %zu train / %zu test windows, k*=%d\n", window_s,
                train_windows.size(), test_windows.size(), k);

    try {
      const auto prop_train = proposed_features(train_windows, k);
      const auto prop_test = proposed_features(test_windows, k);
      const auto base_train = baseline_features(train_windows);
      const auto base_test = baseline_features(test_windows);
      for (ModelKind kind : kinds) {
        const auto base_model = fit_method(kind, base_train.x, base_train.y, opt.seed);
        rows.push_back({"baseline", kind_name(kind), window_s,
                        evaluate(base_model, base_test.x, base_test.y)});
        const auto prop_model = fit_method(kind, prop_train.x, prop_train.y, opt.seed);
        rows.push_back({"proposed", kind_name(kind), window_s,
                        evaluate(prop_model, prop_test.x, prop_test.y)});
      }
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: window %gs failed: %s\n", window_s, e.what());
    }
  }
  if (rows.empty()) throw Error("no window size produced results");
  print_metric_table(rows);
  write_metric_csv(out_csv, rows);
  return 0;
}

int cmd_table3(const fs::path& manifest, const CommonOptions& opt, const std::string& hidden_sizes,
               int epochs, double learning_rate, const fs::path& out_csv) {
  print_config_header("table3", {{"manifest", manifest.string()},
                                 {"hidden", hidden_sizes},
                                 {"k", std::to_string(opt.k)},
                                 {"epochs", std::to_string(epochs)},
                                 {"lr", fmt(learning_rate, "%g")},
                                 {"seed", std::to_string(opt.seed)}});
  const auto hidden = parse_int_list(hidden_sizes);
  const auto dataset = load_dataset(manifest, {opt.confidence});
  auto [train, test] = split_train_test(dataset, opt.train_fraction, opt.seed);
  const int k = resolve_k(train, opt);

  const auto prop_train = proposed_features(train, k);
  const auto prop_test = proposed_features(test, k);
  const auto base_train = baseline_features(train);
  const auto base_test = baseline_features(test);

  std::vector<RegressionRow> rows;
  for (int h : hidden) {
    const auto base_model =
        fit_regressor_nn(base_train.x, base_train.scores, h, opt.seed, epochs, learning_rate);
    rows.push_back({"baseline", h, mae(base_test.scores, base_model.predict_reg(base_test.x))});
  }
  for (int h : hidden) {
    const auto prop_model =
        fit_regressor_nn(prop_train.x, prop_train.scores, h, opt.seed, epochs, learning_rate);
    rows.push_back({"proposed", h, mae(prop_test.scores, prop_model.predict_reg(prop_test.x))});
  }

  std::printf("%-10s %-8s %10s\n", "feature", "method", "mae");
  for (const auto& r : rows)
    std::printf("%-10s NN-%-5d %10s\n", r.feature.c_str(), r.hidden, fmt(r.mae, "%.2f").c_str());
  if (!out_csv.empty()) {
    std::ofstream f(out_csv, std::ios::binary);
    if (!f) throw Error("cannot write " + out_csv.string());
    f << "feature,method,mae\n";
    for (const auto& r : rows)
      f << r.feature << ",NN-" << r.hidden << ',' << fmt(r.mae, "%.2f") << '\n';
    std::printf("# wrote %s\n", out_csv.string().c_str());
  }
  return 0;
}

namespace {

void write_segment_csv(const fs::path& path, const Histogram& hist, const SegmentFit& fit) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << "bin_center,hist_mass,normal_pdf,beta_pdf\n";
  for (int j = 0; j < hist.bins(); ++j) {
    const double center =
        0.5 * (hist.edges[static_cast<std::size_t>(j)] + hist.edges[static_cast<std::size_t>(j) + 1]);
    const double npdf = fit.degenerate ? 0.0 : normal_pdf(fit.normal, center);
    const double bpdf = fit.degenerate ? 0.0 : beta_pdf(fit.beta, center);
    f << fmt(center) << ',' << fmt(hist.masses[static_cast<std::size_t>(j)]) << ',' << fmt(npdf)
      << ',' << fmt(bpdf) << '\n';
  }
}

void write_segment_svg(const fs::path& path, const Histogram& hist, const SegmentFit& fit,
                       int segment_index) {
  // One overlay per segment: histogram bars on the density scale, the
  // fitted Normal over the extended range [-0.4, 1.2], the Beta over (0,1).
  const double width = 640.0, height = 400.0, margin = 45.0;
  const double x_lo = -0.4, x_hi = 1.2;

  const int bins = hist.bins();
  double y_max = 0.0;
  for (double m : hist.masses) y_max = std::max(y_max, m * bins);
  const int curve_points = 240;
  std::vector<std::pair<double, double>> normal_curve, beta_curve;
  if (!fit.degenerate) {
    for (int i = 0; i <= curve_points; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / curve_points;
      const double y = normal_pdf(fit.normal, x);
      normal_curve.emplace_back(x, y);
      y_max = std::max(y_max, y);
    }
    for (int i = 1; i < curve_points; ++i) {
      const double x = static_cast<double>(i) / curve_points;
      const double y = beta_pdf(fit.beta, x);
      beta_curve.emplace_back(x, y);
      y_max = std::max(y_max, y);
    }
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  auto sx = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
  auto sy = [&](double y) { return height - margin - y / y_max * (height - 2 * margin); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width, "%g") + "\" height=\"" +
         fmt(height, "%g") + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(width / 2, "%g") + "\" y=\"20\" text-anchor=\"middle\">segment " +
         std::to_string(segment_index) + "</text>\n";

  for (int j = 0; j < bins; ++j) {
    const double e0 = hist.edges[static_cast<std::size_t>(j)];
    const double e1 = hist.edges[static_cast<std::size_t>(j) + 1];
    const double density = hist.masses[static_cast<std::size_t>(j)] * bins;
    svg += "<rect x=\"" + fmt(sx(e0)) + "\" y=\"" + fmt(sy(density)) + "\" width=\"" +
           fmt(sx(e1) - sx(e0)) + "\" height=\"" + fmt(sy(0.0) - sy(density)) +
           "\" fill=\"#4878cf\" fill-opacity=\"0.7\"/>\n";
  }

  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color) {
    if (pts.empty()) return;
    std::string s = "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) s += fmt(sx(x)) + "," + fmt(sy(y)) + " ";
    s += "\"/>\n";
    svg += s;
  };
  polyline(normal_curve, "#d62728");
  polyline(beta_curve, "#2ca02c");

  // Axis line and the x tick labels.
  svg += "<line x1=\"" + fmt(sx(x_lo)) + "\" y1=\"" + fmt(sy(0.0)) + "\" x2=\"" + fmt(sx(x_hi)) +
         "\" y2=\"" + fmt(sy(0.0)) + "\" stroke=\"black\"/>\n";
  for (double tick : {-0.4, 0.0, 0.5, 1.0, 1.2})
    svg += "<text x=\"" + fmt(sx(tick)) + "\" y=\"" + fmt(height - margin + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + fmt(tick, "%g") + "</text>\n";
  svg += "<text x=\"" + fmt(width - margin) + "\" y=\"34\" font-size=\"11\" text-anchor=\"end\" "
         "fill=\"#d62728\">normal</text>\n";
  svg += "<text x=\"" + fmt(width - margin) + "\" y=\"48\" font-size=\"11\" text-anchor=\"end\" "
         "fill=\"#2ca02c\">beta</text>\n";
  svg += "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << svg;
}

}  // namespace

int cmd_plot_fits(const fs::path& recording, const CommonOptions& opt, const fs::path& out_dir) {
  print_config_header("plot-fits", {{"recording", recording.string()},
                                    {"k", std::to_string(opt.k)},
                                    {"bins", std::to_string(opt.bins)},
                                    {"out", out_dir.string()}});
  if (opt.k < 1) throw Error("plot-fits requires --k >= 1");
  Recording rec = load_recording(recording);
  if (opt.confidence > 0.0) rec = filter_confidence(rec, opt.confidence);

  fs::create_directories(out_dir);
  const auto segments = uniform_segments(rec, opt.k);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const SegmentFit fit = fit_segment(segments[s]);
    const Histogram hist = histogram(fit.normalized, opt.bins);
    char name[32];
    std::snprintf(name, sizeof(name), "segment_%02zu", s + 1);
    write_segment_csv(out_dir / (std::string(name) + ".csv"), hist, fit);
    write_segment_svg(out_dir / (std::string(name) + ".svg"), hist, fit, static_cast<int>(s + 1));
  }
  std::printf("wrote %zu segment CSV/SVG pairs to %s\n", segments.size(),
              out_dir.string().c_str());
  return 0;
}

int cmd_synth(const fs::path& out_dir, int n_per_class, double duration_s, double rate_hz,
              std::uint64_t seed) {
  print_config_header("synth", {{"out", out_dir.string()},
                                {"n_per_class", std::to_string(n_per_class)},
                                {"duration_s", fmt(duration_s, "%g")},
                                {"rate_hz", fmt(rate_hz, "%g")},
                                {"seed", std::to_string(seed)}});
  SynthSpec profile;
  profile.duration_s = duration_s;
  profile.rate_hz = rate_hz;
  const auto dataset = generate_dataset(n_per_class, profile, seed);

  fs::create_directories(out_dir / "recordings");
  std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary);
  if (!manifest) throw Error("cannot write " + (out_dir / "manifest.csv").string());
  manifest << "path,subject,activity,mental,physical,temporal,performance,effort,frustration\n";
  for (const auto& rec : dataset) {
    const std::string rel = "recordings/" + rec.id + ".csv";
    write_recording(out_dir / rel, rec);
    manifest << rel << ',' << rec.subject_id << ',' << rec.activity_id;
    for (double s : rec.label.subscores) manifest << ',' << fmt(s);
    manifest << '\n';
  }
  std::printf("wrote %zu recordings and manifest.csv to %s\n", dataset.size(),
              out_dir.string().c_str());
  return 0;
}

}  // namespace pupilload::cli
