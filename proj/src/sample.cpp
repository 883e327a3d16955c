#include <algorithm>
#include <cmath>

#include "mrpods/error.hpp"
#include "mrpods/raster.hpp"

namespace mrpods {
namespace {

constexpr double kMinSeparation = 40.0;
constexpr int kLocalRadius = 8;

struct ClassMeans {
  double dark = 0;
  double light = 0;
};

ClassMeans class_means(const std::vector<double>& values, double threshold) {
  double d = 0, dn = 0, l = 0, ln = 0;
  for (double v : values) {
    if (v < threshold) {
      d += v;
      ++dn;
    } else {
      l += v;
      ++ln;
    }
  }
  return {dn > 0 ? d / dn : threshold, ln > 0 ? l / ln : threshold};
}

// Sliding-window minimum or maximum over a cols x rows grid with a square
// window of the given radius, done separably.
std::vector<double> window_extreme(const std::vector<double>& in, int cols, int rows, int radius, bool take_max) {
  auto pick = [take_max](double a, double b) { return take_max ? std::max(a, b) : std::min(a, b); };
  std::vector<double> tmp(in.size()), out(in.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double v = in[static_cast<std::size_t>(r) * cols + c];
      for (int k = std::max(0, c - radius); k <= std::min(cols - 1, c + radius); ++k) {
        v = pick(v, in[static_cast<std::size_t>(r) * cols + k]);
      }
      tmp[static_cast<std::size_t>(r) * cols + c] = v;
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double v = tmp[static_cast<std::size_t>(r) * cols + c];
      for (int k = std::max(0, r - radius); k <= std::min(rows - 1, r + radius); ++k) {
        v = pick(v, tmp[static_cast<std::size_t>(k) * cols + c]);
      }
      out[static_cast<std::size_t>(r) * cols + c] = v;
    }
  }
  return out;
}

}  // namespace

std::size_t CellSample::erasure_count() const {
  return static_cast<std::size_t>(std::count(erased.begin(), erased.end(), std::uint8_t{1}));
}

CellSample sample_cells(const RasterImage& img, const GridGeometry& geom, const SampleOptions& options) {
  if (geom.cols <= 0 || geom.rows <= 0) throw Error(ErrorCode::GridNotFound, "empty grid geometry");
  CellSample out;
  out.cols = geom.cols;
  out.rows = geom.rows;
  const std::size_t count = static_cast<std::size_t>(geom.cols) * geom.rows;
  std::vector<double> means(count);

  const auto& [tl, tr, bl, br] = geom.corners;
  const PointF ex{(tr.x - tl.x + br.x - bl.x) / (2.0 * geom.cols), (tr.y - tl.y + br.y - bl.y) / (2.0 * geom.cols)};
  const PointF ey{(bl.x - tl.x + br.x - tr.x) / (2.0 * geom.rows), (bl.y - tl.y + br.y - tr.y) / (2.0 * geom.rows)};
  const double f = options.footprint;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      const PointF p = geom.to_pixel(c + 0.5, r + 0.5);
      const double sum = img.sample(p.x, p.y) + img.sample(p.x + f * ex.x, p.y + f * ex.y) +
                         img.sample(p.x - f * ex.x, p.y - f * ex.y) + img.sample(p.x + f * ey.x, p.y + f * ey.y) +
                         img.sample(p.x - f * ey.x, p.y - f * ey.y);
      means[out.index(c, r)] = sum / 5;
    }
  }

  std::vector<double> inner;
  inner.reserve(count);
  for (int r = kBorderCells; r < geom.rows - kBorderCells; ++r) {
    for (int c = kBorderCells; c < geom.cols - kBorderCells; ++c) inner.push_back(means[out.index(c, r)]);
  }
  if (inner.empty()) inner = means;
  const double t = otsu_threshold(inner);
  const ClassMeans cm = class_means(inner, t);

  out.bits.assign(count, 0);
  out.confidence.assign(count, 0.0f);
  out.erased.assign(count, 0);
  out.threshold = t;

  if (cm.light - cm.dark >= kMinSeparation) {
    const double half = (cm.light - cm.dark) / 2;
    for (std::size_t i = 0; i < count; ++i) {
      out.bits[i] = means[i] < t;
      out.confidence[i] = static_cast<float>(std::min(1.0, std::abs(means[i] - t) / half));
    }
  } else {
    out.used_local_threshold = true;
    const auto lo = window_extreme(means, geom.cols, geom.rows, kLocalRadius, false);
    const auto hi = window_extreme(means, geom.cols, geom.rows, kLocalRadius, true);
    for (std::size_t i = 0; i < count; ++i) {
      const double range = hi[i] - lo[i];
      if (range < kMinSeparation / 2) continue;
      const double local_t = (hi[i] + lo[i]) / 2;
      out.bits[i] = means[i] < local_t;
      out.confidence[i] = static_cast<float>(std::min(1.0, std::abs(means[i] - local_t) / (range / 2)));
    }
  }
  for (std::size_t i = 0; i < count; ++i) out.erased[i] = out.confidence[i] < options.erasure_cutoff;
  return out;
}

double bit_error_rate(const CellSample& observed, const CellGrid& truth) {
  if (observed.cols != truth.cols || observed.rows != truth.rows) return 0.5;
  std::size_t errors = 0, total = 0;
  for (int r = kBorderCells; r < truth.rows - kBorderCells; ++r) {
    for (int c = kBorderCells; c < truth.cols - kBorderCells; ++c) {
      errors += observed.bits[observed.index(c, r)] != truth.at(c, r);
      ++total;
    }
  }
  return total ? static_cast<double>(errors) / total : 0.0;
}

}  // namespace mrpods
