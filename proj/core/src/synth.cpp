#include "pupilload/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "pupilload/rng.hpp"

namespace pupilload {

namespace {

constexpr int kActivityBlocks = 4;

// Per-class order of block shapes (true = sweep block, false = flat block).
// Every class carries the same multiset of shapes; only the temporal order
// differs, so whole-recording statistics cannot tell the classes apart while
// per-segment features can.
constexpr std::array<std::array<bool, kActivityBlocks>, 3> kBlockPattern{{
    {false, false, true, true},  // C1
    {false, true, false, true},  // C2
    {true, true, false, false},  // C3
}};

TlxLabel class_label(CloadClass cls) {
  const double score = representative_score(cls);
  return TlxLabel::from_subscores({score, score, score, score, score, score});
}

}  // namespace

SynthSpec default_profile(CloadClass cls, std::uint64_t seed) {
  SynthSpec spec;
  spec.cls = cls;
  spec.seed = seed;
  spec.dilation_std = 0.08 * (1.0 + 0.5 * static_cast<double>(static_cast<int>(cls)));
  return spec;
}

double representative_score(CloadClass cls) {
  switch (cls) {
    case CloadClass::C1: return 15.0;
    case CloadClass::C2: return 40.0;
    case CloadClass::C3: return 70.0;
  }
  return 0.0;
}

Recording generate_recording(const SynthSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0x5e9d));

  const auto& pattern = kBlockPattern[static_cast<std::size_t>(spec.cls)];
  const double block_len = spec.duration_s / kActivityBlocks;

  // Each block sits on its own base level so that segmentations coarser than
  // the block grid see strongly multi-modal data. Sweep blocks drift linearly
  // through the block (a flat, box-shaped value distribution); flat blocks
  // get their noise scaled to the same variance, which keeps whole-recording
  // moments independent of the shape order.
  const double level_step = 1.5 * spec.drift_amplitude * std::exp(rng.uniform(-0.2, 0.2));
  std::array<double, kActivityBlocks> sweep_mag{}, sweep_sign{};
  for (int b = 0; b < kActivityBlocks; ++b) {
    sweep_mag[static_cast<std::size_t>(b)] =
        spec.drift_amplitude * std::exp(rng.uniform(-0.2, 0.2));
    sweep_sign[static_cast<std::size_t>(b)] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.rate_hz));
  Recording rec;
  char id_buf[64];
  std::snprintf(id_buf, sizeof(id_buf), "synth-%s-%08llx", class_name(spec.cls),
                static_cast<unsigned long long>(spec.seed & 0xffffffffULL));
  rec.id = id_buf;
  rec.subject_id = "synthetic";
  rec.activity_id = class_name(spec.cls);
  rec.nominal_rate = spec.rate_hz;
  rec.label = class_label(spec.cls);
  rec.samples.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.rate_hz;
    auto b = static_cast<int>(t / block_len);
    if (b >= kActivityBlocks) b = kActivityBlocks - 1;
    const auto bu = static_cast<std::size_t>(b);
    const double local = (t - b * block_len) / block_len;  // [0, 1) within the block

    const double level = spec.base_diameter + level_step * b;
    double value;
    if (pattern[bu]) {
      value = level + sweep_sign[bu] * sweep_mag[bu] * (local - 0.5) +
              rng.normal(0.0, spec.dilation_std);
    } else {
      const double flat_std = std::sqrt(sweep_mag[bu] * sweep_mag[bu] / 12.0 +
                                        spec.dilation_std * spec.dilation_std);
      value = level + rng.normal(0.0, flat_std);
    }
    value += rng.normal(0.0, spec.noise_std);

    PupilSample s;
    s.t = t;
    s.diameter = std::max(0.5, value);
    s.confidence = 1.0;
    rec.samples.push_back(s);
  }
  return rec;
}

std::vector<Recording> generate_dataset(int n_per_class, const SynthSpec& profile,
                                        std::uint64_t seed) {
  if (n_per_class < 1) throw Error("generate_dataset: n_per_class must be >= 1");
  std::vector<Recording> dataset;
  dataset.reserve(static_cast<std::size_t>(n_per_class) * 3);
  std::uint64_t stream = 0;
  for (CloadClass cls : {CloadClass::C1, CloadClass::C2, CloadClass::C3}) {
    for (int i = 0; i < n_per_class; ++i) {
      SynthSpec spec = profile;
      spec.cls = cls;
      spec.dilation_std =
          profile.dilation_std * (1.0 + 0.5 * static_cast<double>(static_cast<int>(cls)));
      spec.seed = derive_seed(seed, stream++);
      Recording rec = generate_recording(spec);
      rec.id += "-" + std::to_string(i);
      dataset.push_back(std::move(rec));
    }
  }
  return dataset;
}

Recording generate_piecewise_recording(const std::string& id, int blocks, double sigma_hi,
                                       double sigma_lo, double base_diameter, double duration_s,
                                       double rate_hz, std::uint64_t seed) {
  if (blocks < 1) throw Error("generate_piecewise_recording: blocks must be >= 1");
  Rng rng(derive_seed(seed, 0xb10c));

  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const double block_len = duration_s / blocks;

  Recording rec;
  rec.id = id;
  rec.subject_id = "synthetic";
  rec.activity_id = "piecewise";
  rec.nominal_rate = rate_hz;
  rec.label = class_label(CloadClass::C2);
  rec.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    auto b = static_cast<int>(t / block_len);
    if (b >= blocks) b = blocks - 1;
    const double sigma = (b % 2 == 0) ? sigma_hi : sigma_lo;
    PupilSample s;
    s.t = t;
    s.diameter = std::max(0.5, base_diameter + rng.normal(0.0, sigma));
    s.confidence = 1.0;
    rec.samples.push_back(s);
  }
  return rec;
}

}  // namespace pupilload
