#pragma once

// Synthetic print and scan channel: parameterized degradations, the
// scan-and-reprint duplication experiment, and robustness sweeps.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrpods/raster.hpp"

namespace mrpods {

struct DegradationProfile {
  double gaussian_noise_sigma = 0;  // 8-bit grey levels
  double blur_radius_px = 0;        // Gaussian sigma in pixels
  double rotation_deg = 0;          // clockwise on screen
  double scale_factor = 1.0;
  // Ink spread. Every ink edge moves outward by gain/100 * kDotGainReferencePx.
  double dot_gain_percent = 0;
  double salt_pepper_rate = 0;  // fraction of pixels forced to black or white
  std::uint64_t seed = 0;

  // "k=v,k=v" with keys sigma, blur, rotation, scale, gain, salt, seed, or a
  // preset name (identity, office-scan, mild, harsh). Throws ConfigInvalid.
  static DegradationProfile parse(const std::string& text);
  std::string to_string() const;
  bool operator==(const DegradationProfile&) const = default;
};

inline constexpr double kDotGainReferencePx = 3.0;

// Throws ConfigInvalid naming the offending field.
void validate(const DegradationProfile& profile);

DegradationProfile preset_profile(const std::string& name);
std::vector<std::string> preset_names();

// Dot gain, blur, rotate then scale onto an enlarged white canvas, Gaussian
// noise, salt and pepper. Noise uses the Marsaglia polar method over
// std::mt19937_64 seeded with `seed`; impulse draws come from a second
// generator seeded with seed ^ kImpulseSeedMix.
RasterImage degrade(const RasterImage& img, const DegradationProfile& profile);

inline constexpr std::uint64_t kImpulseSeedMix = 0x9E37'79B9'7F4A'7C15ull;

struct RescanOptions {
  SheetConfig config;  // dots_per_inch and dot size used when reprinting
  int render_dpi = 600;
};

struct RescanStep {
  int generation = 0;  // 0 = the original print, scanned once
  double ber = 0;
  bool decode_ok = false;
  bool grid_found = false;
  int corrected_symbols = 0;
};

// Generation 0 degrades and decodes the original. Each later generation
// reprints what the previous scan read, cell for cell, when the grid was
// found, or photocopies the previous scan otherwise, then degrades it again
// with seed + generation. BER is measured against the cells of `original`.
std::vector<RescanStep> rescan_attack(const RasterImage& original, int generations, const DegradationProfile& profile,
                                      const RescanOptions& options);

struct SweepConfig {
  SheetConfig sheet;
  int render_dpi = 600;
  std::string label() const;
};

struct SweepTrial {
  std::size_t config_index = 0;
  std::size_t profile_index = 0;
  std::uint64_t seed = 0;
  double ber = 0;
  int corrected_symbols = 0;
  bool payload_recovered = false;
};

struct SweepSummary {
  std::size_t config_index = 0;
  std::size_t profile_index = 0;
  int trials = 0;
  int recovered = 0;
  double mean_ber = 0;
  double recovery_rate() const { return trials ? static_cast<double>(recovered) / trials : 0.0; }
};

struct SweepTable {
  std::vector<SweepConfig> configs;
  std::vector<DegradationProfile> profiles;
  std::vector<SweepTrial> trials;
  std::vector<SweepSummary> summary;  // one row per (config, profile)

  // Columns: config columns, profile columns, seed, ber, corrected_symbols,
  // payload_recovered.
  std::string trials_csv() const;
  std::string summary_csv() const;
};

// One trial fills page 0 of each config with random octets, renders,
// degrades with the profile reseeded to `seed`, and decodes. Seeds are
// first_seed .. first_seed + seeds - 1.
SweepTable robustness_sweep(const std::vector<SweepConfig>& configs, const std::vector<DegradationProfile>& profiles,
                            int seeds, std::uint64_t first_seed = 1);

// A single sweep trial, exposed for targeted experiments.
SweepTrial run_trial(const SweepConfig& config, const DegradationProfile& profile, std::uint64_t seed);

// Small-page configuration tuned so that originals decode and reprints do
// not: high dot density, small dots, low redundancy.
SweepConfig duplication_hostile_config();

}  // namespace mrpods
