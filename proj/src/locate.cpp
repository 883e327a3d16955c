#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mrpods/error.hpp"
#include "mrpods/raster.hpp"

namespace mrpods {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxSkewDeg = 5.0;
constexpr int kMinDarkRun = 3;
constexpr double kMinContrast = 40.0;
constexpr int kScanLines = 600;
constexpr double kGoldenFraction = 0.6180339887498949;

struct Otsu {
  double threshold = 0;
  double dark_mean = 0;
  double light_mean = 0;
  double dark_fraction = 0;
};

Otsu otsu_from_histogram(const std::array<double, 256>& hist) {
  const double total = std::accumulate(hist.begin(), hist.end(), 0.0);
  Otsu o;
  if (total <= 0) return o;
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = 0, plateau_end = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 <= 0 || w1 <= 0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best * (1 + 1e-12)) {
      best = between;
      best_t = plateau_end = t;
    } else if (between >= best * (1 - 1e-12)) {
      plateau_end = t;
    }
  }
  // Empty bins between the classes leave a plateau; split it evenly.
  best_t = (best_t + plateau_end) / 2;
  double d = 0, dsum = 0;
  for (int i = 0; i <= best_t; ++i) {
    d += hist[i];
    dsum += i * hist[i];
  }
  o.threshold = best_t + 0.5;
  o.dark_fraction = d / total;
  o.dark_mean = d > 0 ? dsum / d : 0;
  o.light_mean = total - d > 0 ? (sum_all - dsum) / (total - d) : 255;
  return o;
}

struct Line {
  // Coordinate across the edge as a function of the coordinate along it.
  double a = 0;
  double b = 0;
  double at(double t) const { return a + b * t; }
};

// Least squares with iterative rejection of outliers by median absolute
// deviation.
Line robust_fit(const std::vector<PointF>& pts) {
  std::vector<PointF> keep = pts;
  Line line;
  for (int iter = 0; iter < 4; ++iter) {
    if (keep.size() < 8) throw Error(ErrorCode::GridNotFound, "too few frame edge points");
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (const auto& p : keep) {
      st += p.x;
      sv += p.y;
      stt += p.x * p.x;
      stv += p.x * p.y;
    }
    const double n = static_cast<double>(keep.size());
    const double den = n * stt - st * st;
    line.b = den != 0 ? (n * stv - st * sv) / den : 0;
    line.a = (sv - line.b * st) / n;
    std::vector<double> res;
    res.reserve(pts.size());
    for (const auto& p : keep) res.push_back(std::abs(p.y - line.at(p.x)));
    std::nth_element(res.begin(), res.begin() + res.size() / 2, res.end());
    const double limit = std::max(1.0, 3.0 * 1.4826 * res[res.size() / 2]);
    std::vector<PointF> next;
    for (const auto& p : pts) {
      if (std::abs(p.y - line.at(p.x)) <= limit) next.push_back(p);
    }
    if (next.size() == keep.size()) break;
    keep = std::move(next);
  }
  return line;
}

// Scanning from one side of the image towards the grid.
constexpr double kProfileStep = 0.5;
constexpr int kProfileSamples = 256;

struct EdgeScan {
  std::vector<PointF> points;  // (along, across)
  // Intensity against depth behind the detected edge, summed over scan lines.
  std::vector<double> depth_sum = std::vector<double>(kProfileSamples, 0.0);
  std::vector<int> depth_count = std::vector<int>(kProfileSamples, 0);
};

// Reads lines of pixels from the outside inwards. `across` positions are
// reported in image coordinates.
EdgeScan scan_side(const RasterImage& img, double threshold, int side) {
  const bool vertical_edge = side == 0 || side == 2;  // left or right
  const int along_len = vertical_edge ? img.height : img.width;
  const int across_len = vertical_edge ? img.width : img.height;
  const bool reverse = side == 2 || side == 3;  // right or bottom
  auto px = [&](int along, int k) -> double {
    const int across = reverse ? across_len - 1 - k : k;
    return vertical_edge ? img.at(across, along) : img.at(along, across);
  };

  EdgeScan out;
  const int lo = along_len / 5, hi = along_len - along_len / 5;
  const int lines = std::min(kScanLines, hi - lo);
  const int limit = across_len / 3;
  // Golden-ratio positions never lock onto the cell period.
  for (int i = 0; i < lines; ++i) {
    const int t = lo + static_cast<int>(std::fmod(i * kGoldenFraction, 1.0) * (hi - lo));
    int k = 0;
    int found = -1;
    while (k + kMinDarkRun <= limit) {
      int run = 0;
      while (run < kMinDarkRun && px(t, k + run) < threshold) ++run;
      if (run == kMinDarkRun) {
        found = k;
        break;
      }
      k += run + 1;
    }
    if (found < 0) continue;
    double edge = 0;
    if (found > 0) {
      const double prev = px(t, found - 1), cur = px(t, found);
      const double frac = prev > cur ? (prev - threshold) / (prev - cur) : 0.5;
      edge = found - 0.5 + std::clamp(frac, 0.0, 1.0);
    }
    for (int j = 0; j < kProfileSamples; ++j) {
      const double pos = std::max(edge + j * kProfileStep - 0.5, 0.0);
      const int k0 = static_cast<int>(std::floor(pos));
      if (k0 + 1 >= across_len) continue;
      const double f = pos - k0;
      out.depth_sum[j] += (1 - f) * px(t, k0) + f * px(t, k0 + 1);
      ++out.depth_count[j];
    }
    const double across = reverse ? across_len - edge : edge;
    out.points.push_back(PointF{t + 0.5, across});
  }
  return out;
}

PointF intersect(const Line& vertical, const Line& horizontal) {
  // x = av + bv*y, y = ah + bh*x
  const double y = (horizontal.a + horizontal.b * vertical.a) / (1.0 - horizontal.b * vertical.b);
  return PointF{vertical.at(y), y};
}

PointF lerp(PointF a, PointF b, double t) { return PointF{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }
double distance(PointF a, PointF b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct TimingFit {
  double offset = 0;  // position of the outer edge of cell 0 along the line
  double pitch = 0;
};

// Fits white-cell centres along a timing line. Cells with odd index are
// white; the line starts at the outer frame edge.
TimingFit fit_timing(const RasterImage& img, double threshold, PointF from, PointF to, PointF normal, double depth,
                     double pitch_guess) {
  const double len = distance(from, to);
  constexpr double kStep = 0.25;
  const PointF dir{(to.x - from.x) / len, (to.y - from.y) / len};
  // Average across the ring and smooth along it to suppress pixel noise.
  std::vector<double> raw;
  const double spread = 0.15 * pitch_guess;
  for (double s = 0; s <= len; s += kStep) {
    double v = 0;
    for (double d : {depth - spread, depth, depth + spread}) {
      v += img.sample(from.x + dir.x * s + normal.x * d, from.y + dir.y * s + normal.y * d);
    }
    raw.push_back(v / 3);
  }
  const int box = std::max(1, static_cast<int>(0.2 * pitch_guess / kStep));
  std::vector<double> profile(raw.size());
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    double v = 0;
    int m = 0;
    for (int k = std::max(0, i - box); k <= std::min(static_cast<int>(raw.size()) - 1, i + box); ++k, ++m) v += raw[k];
    profile[i] = v / m;
  }
  // Light cells stand out against a moving average spanning two periods.
  const int half = std::max(2, static_cast<int>(std::lround(2 * pitch_guess / kStep)));
  const int n = static_cast<int>(profile.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + profile[i];
  const int first = static_cast<int>(pitch_guess / kStep), last = n - first;
  std::vector<double> centres;
  int run_start = -1;
  for (int i = first; i < last; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n, i + half + 1);
    const double local = (prefix[hi] - prefix[lo]) / (hi - lo);
    const bool light = profile[i] > std::max(local, threshold * 0.5);
    if (light && run_start < 0) run_start = i;
    if (!light && run_start >= 0) {
      if ((i - run_start) * kStep >= 0.3 * pitch_guess) centres.push_back((run_start + i - 1) * kStep / 2);
      run_start = -1;
    }
  }
  if (centres.size() < 8) throw Error(ErrorCode::GridNotFound, "timing marks not found");

  std::vector<double> diffs;
  for (std::size_t i = 1; i < centres.size(); ++i) diffs.push_back(centres[i] - centres[i - 1]);
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
  const double pitch1 = diffs[diffs.size() / 2] / 2;
  if (pitch1 <= 0) throw Error(ErrorCode::GridNotFound, "timing marks not found");

  // Fit position = offset + pitch * (index + 0.5) over light cells (odd
  // indices). Indices come from the current fit, which is grown outwards
  // from the start of the line so that pitch errors never accumulate.
  TimingFit fit{0, pitch1};
  auto assign_and_fit = [&](double reach, bool sequential) {
    std::vector<std::pair<double, double>> pts;  // (index + 0.5, position)
    long idx = std::lround((centres[0] / pitch1 - 1.5) / 2) * 2 + 1;
    double prev = centres[0];
    for (std::size_t i = 0; i < centres.size() && centres[i] <= reach; ++i) {
      if (sequential) {
        if (i > 0) {
          const long steps = std::lround((centres[i] - prev) / (2 * pitch1));
          if (steps < 1) continue;
          idx += 2 * steps;
          prev = centres[i];
        }
      } else {
        idx = std::lround(((centres[i] - fit.offset) / fit.pitch - 1.5) / 2) * 2 + 1;
      }
      pts.emplace_back(idx + 0.5, centres[i]);
    }
    std::vector<std::pair<double, double>> keep = pts;
    for (int iter = 0; iter < 3; ++iter) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& [x, y] : keep) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(keep.size());
      const double den = n * sxx - sx * sx;
      if (n < 6 || den == 0) throw Error(ErrorCode::GridNotFound, "timing marks not found");
      fit.pitch = (n * sxy - sx * sy) / den;
      fit.offset = (sy - fit.pitch * sx) / n;
      std::vector<std::pair<double, double>> next;
      for (const auto& q : pts) {
        if (std::abs(q.second - (fit.offset + fit.pitch * q.first)) <= 0.3 * fit.pitch) next.push_back(q);
      }
      if (next.size() == keep.size()) break;
      keep = std::move(next);
    }
  };
  double reach = centres.front() + 24 * pitch1;
  assign_and_fit(reach, true);
  while (reach < centres.back()) {
    reach = centres.front() + 2 * (reach - centres.front());
    assign_and_fit(reach, false);
  }
  return fit;
}

}  // namespace

double otsu_threshold(const std::vector<double>& values) {
  std::array<double, 256> hist{};
  for (double v : values) hist[std::clamp(static_cast<int>(std::lround(v)), 0, 255)] += 1;
  return otsu_from_histogram(hist).threshold;
}

GridGeometry locate_grid(const RasterImage& img) {
  if (img.width < 16 || img.height < 16) throw Error(ErrorCode::GridNotFound, "image too small");
  std::array<double, 256> hist{};
  for (std::uint8_t p : img.pixels) hist[p] += 1;
  const Otsu otsu = otsu_from_histogram(hist);
  if (otsu.light_mean - otsu.dark_mean < kMinContrast || otsu.dark_fraction <= 0) {
    throw Error(ErrorCode::GridNotFound, "no ink contrast");
  }
  const double t = otsu.threshold;

  std::array<EdgeScan, 4> scans;  // left, top, right, bottom
  for (int side = 0; side < 4; ++side) scans[side] = scan_side(img, t, side);
  std::array<Line, 4> lines;
  for (int side = 0; side < 4; ++side) lines[side] = robust_fit(scans[side].points);

  const double rotation =
      (std::atan(lines[1].b) + std::atan(lines[3].b) - std::atan(lines[0].b) - std::atan(lines[2].b)) / 4;
  const double rotation_deg = rotation * 180 / kPi;
  if (std::abs(rotation_deg) > kMaxSkewDeg) {
    throw Error(ErrorCode::ExcessiveSkew, "page rotated by " + std::to_string(rotation_deg) + " degrees");
  }

  const PointF tl = intersect(lines[0], lines[1]);
  const PointF tr = intersect(lines[2], lines[1]);
  const PointF bl = intersect(lines[0], lines[3]);
  const PointF br = intersect(lines[2], lines[3]);

  // Frame thickness from the mean intensity profile behind the edges: the
  // crossing halfway between the solid frame and the mid-grey timing ring.
  std::vector<double> profile;
  for (int j = 0; j < kProfileSamples; ++j) {
    double sum = 0;
    int count = 0;
    for (const auto& s : scans) {
      sum += s.depth_sum[j];
      count += s.depth_count[j];
    }
    if (count == 0) break;
    profile.push_back(sum / count);
  }
  if (profile.size() < 4) throw Error(ErrorCode::GridNotFound, "frame not found");
  const auto darkest = std::min_element(profile.begin(), profile.end());
  const double ink = *darkest;
  auto crossing = [&](double level) {
    for (auto it = darkest + 1; it != profile.end(); ++it) {
      if (*it >= level) {
        const double prev = *(it - 1);
        return (static_cast<double>(it - profile.begin()) - 1 + (level - prev) / std::max(*it - prev, 1e-9)) *
               kProfileStep;
      }
    }
    throw Error(ErrorCode::GridNotFound, "frame edge not found");
  };
  double thickness = crossing(ink + 0.25 * (otsu.light_mean - ink));
  for (int iter = 0; iter < 2; ++iter) {
    const std::size_t from = static_cast<std::size_t>(thickness / kProfileStep);
    const std::size_t to = std::min(profile.size(), static_cast<std::size_t>(1.5 * thickness / kProfileStep) + 1);
    if (from >= to) break;
    const double ring = std::accumulate(profile.begin() + from, profile.begin() + to, 0.0) / (to - from);
    if (ring <= ink) break;
    thickness = crossing(ink + 0.5 * (ring - ink));
  }
  const double p0 = thickness / kFrameCells;
  if (p0 <= 1.0) throw Error(ErrorCode::GridNotFound, "frame too thin");

  // Timing ring centre lines, one per side.
  auto unit = [](PointF a, PointF b) {
    const double d = distance(a, b);
    return PointF{(b.x - a.x) / d, (b.y - a.y) / d};
  };
  const PointF u_top = unit(tl, tr), u_bottom = unit(bl, br), u_left = unit(tl, bl), u_right = unit(tr, br);
  const double depth = thickness + 0.4 * p0;
  const TimingFit top = fit_timing(img, t, tl, tr, PointF{-u_top.y, u_top.x}, depth, p0);
  const TimingFit bottom = fit_timing(img, t, bl, br, PointF{u_bottom.y, -u_bottom.x}, depth, p0);
  const TimingFit left = fit_timing(img, t, tl, bl, PointF{u_left.y, -u_left.x}, depth, p0);
  const TimingFit right = fit_timing(img, t, tr, br, PointF{-u_right.y, u_right.x}, depth, p0);

  const double len_x = (distance(tl, tr) + distance(bl, br)) / 2;
  const double len_y = (distance(tl, bl) + distance(tr, br)) / 2;
  const double pitch_x = (top.pitch + bottom.pitch) / 2;
  const double pitch_y = (left.pitch + right.pitch) / 2;
  if (pitch_x <= 2.0 || pitch_y <= 2.0) throw Error(ErrorCode::GridNotFound, "cell pitch below 2 pixels");

  const double gain_left = (top.offset + bottom.offset) / 2;
  const double gain_top = (left.offset + right.offset) / 2;
  const int cols = static_cast<int>(std::lround((len_x - 2 * gain_left) / pitch_x));
  const int rows = static_cast<int>(std::lround((len_y - 2 * gain_top) / pitch_y));
  if (cols < 2 * kBorderCells + kTileCells || rows < 2 * kBorderCells + kTileCells) {
    throw Error(ErrorCode::GridNotFound, "grid too small");
  }

  // Corners of the undistorted cell lattice along each measured edge.
  GridGeometry g;
  g.cols = cols;
  g.rows = rows;
  g.rotation_deg = rotation_deg;
  g.cell_pitch_px = (pitch_x + pitch_y) / 2;
  const PointF top_l = lerp(tl, tr, top.offset / distance(tl, tr));
  const PointF top_r = lerp(tl, tr, (top.offset + cols * top.pitch) / distance(tl, tr));
  const PointF bot_l = lerp(bl, br, bottom.offset / distance(bl, br));
  const PointF bot_r = lerp(bl, br, (bottom.offset + cols * bottom.pitch) / distance(bl, br));
  const double lt = left.offset, lb = left.offset + rows * left.pitch;
  const double rt = right.offset, rb = right.offset + rows * right.pitch;
  const double len_l = distance(tl, bl), len_r = distance(tr, br);
  // Shift the horizontal edge points vertically onto the lattice lines.
  g.corners[0] = PointF{top_l.x + u_left.x * lt, top_l.y + u_left.y * lt};
  g.corners[1] = PointF{top_r.x + u_right.x * rt, top_r.y + u_right.y * rt};
  g.corners[2] = PointF{bot_l.x - u_left.x * (len_l - lb), bot_l.y - u_left.y * (len_l - lb)};
  g.corners[3] = PointF{bot_r.x - u_right.x * (len_r - rb), bot_r.y - u_right.y * (len_r - rb)};
  g.origin_px = g.to_pixel(0.5, 0.5);
  return g;
}

}  // namespace mrpods
