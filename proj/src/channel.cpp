#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "mrpods/channel.hpp"
#include "mrpods/error.hpp"
#include "mrpods/parallel.hpp"

namespace mrpods {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, message);
}

// 3x3 minimum (take_min) or maximum filter.
RasterImage morph3(const RasterImage& in, bool take_min) {
  auto pick = [take_min](std::uint8_t a, std::uint8_t b) { return take_min ? std::min(a, b) : std::max(a, b); };
  const int w = in.width, h = in.height;
  RasterImage tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = in.pixels.data() + static_cast<std::size_t>(y) * w;
    std::uint8_t* dst = tmp.pixels.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = src[x];
      if (x > 0) v = pick(v, src[x - 1]);
      if (x + 1 < w) v = pick(v, src[x + 1]);
      dst[x] = v;
    }
  }
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* mid = tmp.pixels.data() + static_cast<std::size_t>(y) * w;
    const std::uint8_t* up = y > 0 ? mid - w : mid;
    const std::uint8_t* down = y + 1 < h ? mid + w : mid;
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) dst[x] = pick(pick(mid[x], up[x]), down[x]);
  }
  return out;
}

// Moves ink edges by `spread` pixels: outward when positive, inward when
// negative. Fractional spreads blend the two nearest whole-pixel results.
RasterImage spread_ink(const RasterImage& in, double spread) {
  const bool grow = spread > 0;
  const double amount = std::abs(spread);
  const int whole = static_cast<int>(std::floor(amount));
  const double frac = amount - whole;
  RasterImage lower = in;
  for (int i = 0; i < whole; ++i) lower = morph3(lower, grow);
  if (frac <= 0) return lower;
  const RasterImage upper = morph3(lower, grow);
  RasterImage out(in.width, in.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = static_cast<std::uint8_t>(std::lround((1 - frac) * lower.pixels[i] + frac * upper.pixels[i]));
  }
  return out;
}

RasterImage gaussian_blur(const RasterImage& in, double sigma) {
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) sum += std::exp(-0.5 * i * i / (sigma * sigma));
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)) / sum);
  }

  const int w = in.width, h = in.height;
  std::vector<float> tmp(static_cast<std::size_t>(w) * h);
  std::vector<float> line(w + 2 * radius);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = in.pixels.data() + static_cast<std::size_t>(y) * w;
    for (int x = -radius; x < w + radius; ++x) line[x + radius] = src[std::clamp(x, 0, w - 1)];
    float* dst = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      float acc = 0;
      for (int i = 0; i <= 2 * radius; ++i) acc += kernel[i] * line[x + i];
      dst[x] = acc;
    }
  }
  RasterImage out(w, h);
  std::vector<float> acc(w);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    for (int i = -radius; i <= radius; ++i) {
      const float k = kernel[i + radius];
      const float* src = tmp.data() + static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w;
      for (int x = 0; x < w; ++x) acc[x] += k * src[x];
    }
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) dst[x] = static_cast<std::uint8_t>(std::clamp(acc[x] + 0.5f, 0.0f, 255.0f));
  }
  return out;
}

RasterImage rotate_scale(const RasterImage& in, double rotation_deg, double scale) {
  const double th = rotation_deg * kPi / 180;
  const double c = std::cos(th), s = std::sin(th);
  const int w = static_cast<int>(std::ceil((in.width * std::abs(c) + in.height * std::abs(s)) * scale - 1e-9));
  const int h = static_cast<int>(std::ceil((in.width * std::abs(s) + in.height * std::abs(c)) * scale - 1e-9));
  RasterImage out(std::max(w, 1), std::max(h, 1));
  const double icx = in.width / 2.0, icy = in.height / 2.0;
  const double ocx = out.width / 2.0, ocy = out.height / 2.0;
  const int iw = in.width, ih = in.height;
  for (int y = 0; y < out.height; ++y) {
    const double dy = (y + 0.5 - ocy) / scale;
    const double dx0 = (0.5 - ocx) / scale;
    // Inverse of the clockwise rotation (x, y) -> (x c - y s, x s + y c),
    // shifted by half a pixel to address pixel centres.
    double fx = dx0 * c + dy * s + icx - 0.5;
    double fy = -dx0 * s + dy * c + icy - 0.5;
    const double step_x = c / scale, step_y = -s / scale;
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * out.width;
    for (int x = 0; x < out.width; ++x, fx += step_x, fy += step_y) {
      const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
      double v;
      if (x0 >= 0 && y0 >= 0 && x0 + 1 < iw && y0 + 1 < ih) {
        const double ax = fx - x0, ay = fy - y0;
        const std::uint8_t* p = in.pixels.data() + static_cast<std::size_t>(y0) * iw + x0;
        const double top = p[0] + ax * (p[1] - p[0]);
        const double bot = p[iw] + ax * (p[iw + 1] - p[iw]);
        v = top + ay * (bot - top);
      } else if (x0 < -1 || y0 < -1 || x0 >= iw || y0 >= ih) {
        v = 255;
      } else {
        v = in.sample(fx + 0.5, fy + 0.5);
      }
      dst[x] = static_cast<std::uint8_t>(v + 0.5);
    }
  }
  return out;
}

void add_gaussian_noise(RasterImage& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0; };
  std::uint8_t* px = img.pixels.data();
  std::size_t i = 0;
  const std::size_t n = img.pixels.size();
  while (i < n) {
    // Marsaglia polar method: two normal deviates per accepted pair.
    double u, v, r2;
    do {
      u = uniform();
      v = uniform();
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = sigma * std::sqrt(-2.0 * std::log(r2) / r2);
    px[i] = static_cast<std::uint8_t>(std::fmin(std::fmax(px[i] + u * f + 0.5, 0.0), 255.0));
    if (++i < n) {
      px[i] = static_cast<std::uint8_t>(std::fmin(std::fmax(px[i] + v * f + 0.5, 0.0), 255.0));
      ++i;
    }
  }
}

void add_salt_pepper(RasterImage& img, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kImpulseSeedMix);
  const std::uint64_t cut = static_cast<std::uint64_t>(rate * 18446744073709551616.0);
  for (auto& p : img.pixels) {
    const std::uint64_t draw = rng();
    if (draw < cut) p = (draw & 1) ? 255 : 0;
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

void validate(const DegradationProfile& p) {
  require(std::isfinite(p.gaussian_noise_sigma) && p.gaussian_noise_sigma >= 0, "sigma must be >= 0");
  require(std::isfinite(p.blur_radius_px) && p.blur_radius_px >= 0, "blur must be >= 0");
  require(std::isfinite(p.rotation_deg) && std::abs(p.rotation_deg) <= 45, "rotation must be within +-45 degrees");
  require(std::isfinite(p.scale_factor) && p.scale_factor > 0 && p.scale_factor <= 8, "scale must be in (0, 8]");
  require(p.dot_gain_percent >= -20 && p.dot_gain_percent <= 40, "gain must be within -20..+40 percent");
  require(p.salt_pepper_rate >= 0 && p.salt_pepper_rate <= 1, "salt must be within 0..1");
}

DegradationProfile preset_profile(const std::string& name) {
  DegradationProfile p;
  if (name == "identity") return p;
  if (name == "mild") {
    p.gaussian_noise_sigma = 6;
    p.blur_radius_px = 0.5;
    p.rotation_deg = 0.3;
    p.dot_gain_percent = 3;
    return p;
  }
  if (name == "office-scan") {
    p.gaussian_noise_sigma = 12;
    p.blur_radius_px = 0.7;
    p.rotation_deg = 0.6;
    p.dot_gain_percent = 8;
    p.salt_pepper_rate = 0.001;
    return p;
  }
  if (name == "harsh") {
    p.gaussian_noise_sigma = 40;
    p.blur_radius_px = 1.2;
    p.rotation_deg = 1.5;
    p.dot_gain_percent = 20;
    p.salt_pepper_rate = 0.01;
    return p;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown profile preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"identity", "mild", "office-scan", "harsh"}; }

DegradationProfile DegradationProfile::parse(const std::string& text) {
  DegradationProfile p;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      const std::uint64_t seed = p.seed;
      p = preset_profile(item);
      p.seed = seed;
      continue;
    }
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "seed") {
        p.seed = std::stoull(value, &used);
      } else {
        const double v = std::stod(value, &used);
        if (key == "sigma") p.gaussian_noise_sigma = v;
        else if (key == "blur") p.blur_radius_px = v;
        else if (key == "rotation") p.rotation_deg = v;
        else if (key == "scale") p.scale_factor = v;
        else if (key == "gain") p.dot_gain_percent = v;
        else if (key == "salt") p.salt_pepper_rate = v;
        else throw Error(ErrorCode::ConfigInvalid, "unknown profile key '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ConfigInvalid, "bad value for profile key '" + key + "': " + value);
    }
  }
  validate(p);
  return p;
}

std::string DegradationProfile::to_string() const {
  return "sigma=" + fmt(gaussian_noise_sigma) + ",blur=" + fmt(blur_radius_px) + ",rotation=" + fmt(rotation_deg) +
         ",scale=" + fmt(scale_factor) + ",gain=" + fmt(dot_gain_percent) + ",salt=" + fmt(salt_pepper_rate) +
         ",seed=" + std::to_string(seed);
}

RasterImage degrade(const RasterImage& img, const DegradationProfile& profile) {
  validate(profile);
  RasterImage out = img;
  if (profile.dot_gain_percent != 0) out = spread_ink(out, profile.dot_gain_percent / 100 * kDotGainReferencePx);
  if (profile.blur_radius_px > 0) out = gaussian_blur(out, profile.blur_radius_px);
  if (profile.rotation_deg != 0 || profile.scale_factor != 1.0) {
    out = rotate_scale(out, profile.rotation_deg, profile.scale_factor);
  }
  if (profile.gaussian_noise_sigma > 0) add_gaussian_noise(out, profile.gaussian_noise_sigma, profile.seed);
  if (profile.salt_pepper_rate > 0) add_salt_pepper(out, profile.salt_pepper_rate, profile.seed);
  return out;
}

std::vector<RescanStep> rescan_attack(const RasterImage& original, int generations, const DegradationProfile& profile,
                                      const RescanOptions& options) {
  if (generations < 1) throw Error(ErrorCode::ConfigInvalid, "generations must be >= 1");
  const GridGeometry truth_geom = locate_grid(original);
  const CellSample truth_sample = sample_cells(original, truth_geom);
  const CellGrid truth{truth_sample.cols, truth_sample.rows, truth_sample.bits};
  const SheetDecode reference = decode_cells(truth_sample, truth_geom);

  std::vector<RescanStep> steps;
  RasterImage print = original;
  for (int g = 0; g <= generations; ++g) {
    DegradationProfile p = profile;
    p.seed = profile.seed + static_cast<std::uint64_t>(g);
    const RasterImage scan = degrade(print, p);
    RescanStep step;
    step.generation = g;
    step.ber = 0.5;
    std::optional<CellSample> cells;
    try {
      const GridGeometry geom = locate_grid(scan);
      cells = sample_cells(scan, geom);
      step.grid_found = true;
      step.ber = bit_error_rate(*cells, truth);
      const SheetDecode dec = decode_cells(*cells, geom);
      step.corrected_symbols = dec.report.corrected_symbols;
      step.decode_ok = dec.report.complete() && dec.page == reference.page;
    } catch (const Error&) {
      step.decode_ok = false;
    }
    steps.push_back(step);
    if (cells) {
      print = render_cells(CellGrid{cells->cols, cells->rows, cells->bits}, options.config, options.render_dpi);
    } else {
      print = scan;
    }
  }
  return steps;
}

std::string SweepConfig::label() const {
  return std::to_string(sheet.dots_per_inch) + "dpi/" + std::to_string(sheet.dot_size_percent) + "%/" +
         sheet.redundancy.to_string() + "@" + std::to_string(render_dpi);
}

SweepTrial run_trial(const SweepConfig& config, const DegradationProfile& profile, std::uint64_t seed) {
  const SheetLayout layout = layout_for(config.sheet);
  std::mt19937_64 rng(seed);
  ByteStream payload{Bytes(layout.data_bytes_per_page()), Stage::Compressed};
  for (auto& b : payload.bytes) b = static_cast<std::uint8_t>(rng());
  const Page page = paginate(payload, config.sheet).front();
  const CellGrid truth = page_cells(page, layout);
  const RasterImage img = render_cells(truth, config.sheet, config.render_dpi);

  DegradationProfile p = profile;
  p.seed = seed;
  const RasterImage scan = degrade(img, p);

  SweepTrial t;
  t.seed = seed;
  t.ber = 0.5;
  try {
    const GridGeometry geom = locate_grid(scan);
    const CellSample cells = sample_cells(scan, geom);
    t.ber = bit_error_rate(cells, truth);
    const SheetDecode dec = decode_cells(cells, geom);
    t.corrected_symbols = dec.report.corrected_symbols;
    t.payload_recovered = dec.report.complete() && dec.page == page;
  } catch (const Error&) {
    t.payload_recovered = false;
  }
  return t;
}

SweepTable robustness_sweep(const std::vector<SweepConfig>& configs, const std::vector<DegradationProfile>& profiles,
                            int seeds, std::uint64_t first_seed) {
  if (configs.empty() || profiles.empty() || seeds < 1) {
    throw Error(ErrorCode::ConfigInvalid, "sweep grids must be non-empty and seeds >= 1");
  }
  for (const auto& c : configs) validate(c.sheet);
  for (const auto& p : profiles) validate(p);

  SweepTable table;
  table.configs = configs;
  table.profiles = profiles;
  const std::size_t per_cell = static_cast<std::size_t>(seeds);
  table.trials.resize(configs.size() * profiles.size() * per_cell);
  parallel_for(table.trials.size(), [&](std::size_t i) {
    const std::size_t cell = i / per_cell;
    const std::size_t ci = cell / profiles.size(), pi = cell % profiles.size();
    SweepTrial t = run_trial(configs[ci], profiles[pi], first_seed + i % per_cell);
    t.config_index = ci;
    t.profile_index = pi;
    table.trials[i] = t;
  });
  for (std::size_t cell = 0; cell < configs.size() * profiles.size(); ++cell) {
    SweepSummary s;
    s.config_index = cell / profiles.size();
    s.profile_index = cell % profiles.size();
    for (std::size_t k = 0; k < per_cell; ++k) {
      const SweepTrial& t = table.trials[cell * per_cell + k];
      ++s.trials;
      s.recovered += t.payload_recovered;
      s.mean_ber += t.ber;
    }
    s.mean_ber /= s.trials;
    table.summary.push_back(s);
  }
  return table;
}

namespace {

std::string config_columns(const SweepConfig& c) {
  return std::to_string(c.sheet.dots_per_inch) + "," + std::to_string(c.sheet.dot_size_percent) + "," +
         c.sheet.redundancy.to_string() + "," + std::to_string(c.render_dpi);
}

std::string profile_columns(const DegradationProfile& p) {
  return fmt(p.gaussian_noise_sigma) + "," + fmt(p.blur_radius_px) + "," + fmt(p.rotation_deg) + "," +
         fmt(p.scale_factor) + "," + fmt(p.dot_gain_percent) + "," + fmt(p.salt_pepper_rate);
}

constexpr const char* kConfigHeader = "dpi,dot_size_percent,redundancy,render_dpi";
constexpr const char* kProfileHeader = "sigma,blur_px,rotation_deg,scale,dot_gain_percent,salt_pepper_rate";

}  // namespace

std::string SweepTable::trials_csv() const {
  std::ostringstream out;
  out << kConfigHeader << "," << kProfileHeader << ",seed,ber,corrected_symbols,payload_recovered\n";
  for (const SweepTrial& t : trials) {
    out << config_columns(configs[t.config_index]) << "," << profile_columns(profiles[t.profile_index]) << ","
        << t.seed << "," << fmt(t.ber) << "," << t.corrected_symbols << ","
        << (t.payload_recovered ? "true" : "false") << "\n";
  }
  return out.str();
}

std::string SweepTable::summary_csv() const {
  std::ostringstream out;
  out << kConfigHeader << "," << kProfileHeader << ",trials,mean_ber,recovery_rate\n";
  for (const SweepSummary& s : summary) {
    out << config_columns(configs[s.config_index]) << "," << profile_columns(profiles[s.profile_index]) << ","
        << s.trials << "," << fmt(s.mean_ber) << "," << fmt(s.recovery_rate()) << "\n";
  }
  return out.str();
}

SweepConfig duplication_hostile_config() {
  SweepConfig c;
  c.sheet.dots_per_inch = 220;
  c.sheet.dot_size_percent = 40;
  c.sheet.redundancy = RedundancyRatio{1, 10};
  c.sheet.page_width_in = 2.0;
  c.sheet.page_height_in = 2.0;
  c.sheet.margin_in = 0.1;
  c.render_dpi = 600;
  return c;
}

}  // namespace mrpods
