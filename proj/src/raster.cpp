#include "quermass/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace quermass {

namespace {

constexpr double kEdtInf = 1e18;  // squared pixel units; > any raster diagonal

// Lower envelope of the parabolas y = f[q] + (x-q)^2 (Felzenszwalb &
// Huttenlocher); d receives the envelope sampled at integer x.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z, std::size_t n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtInf;
  z[1] = kEdtInf;
  for (int q = 1; q < static_cast<int>(n); ++q) {
    double s;
    while (true) {
      int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtInf;
  }
  k = 0;
  for (int q = 0; q < static_cast<int>(n); ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::size_t BinaryRaster::foreground_count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += b != 0;
  return n;
}

BinaryRaster rasterize(const MarkedConfiguration& config, double pixel_size) {
  if (!(pixel_size > 0.0)) throw std::invalid_argument("rasterize: pixel_size must be positive");
  const Window& w = config.window;
  BinaryRaster r;
  r.pixel_size = pixel_size;
  r.origin_x = w.x0;
  r.origin_y = w.y0;
  r.width = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w.width() / pixel_size - 1e-9)));
  r.height = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w.height() / pixel_size - 1e-9)));
  r.bits.assign(r.width * r.height, 0);
  for (const Disc& d : config.discs) {
    double lo_x = (d.cx - d.r - r.origin_x) / pixel_size - 0.5;
    double hi_x = (d.cx + d.r - r.origin_x) / pixel_size - 0.5;
    double lo_y = (d.cy - d.r - r.origin_y) / pixel_size - 0.5;
    double hi_y = (d.cy + d.r - r.origin_y) / pixel_size - 0.5;
    std::size_t ix0 = static_cast<std::size_t>(std::max(0.0, std::ceil(lo_x)));
    std::size_t iy0 = static_cast<std::size_t>(std::max(0.0, std::ceil(lo_y)));
    std::size_t ix1 = static_cast<std::size_t>(std::clamp(std::floor(hi_x), -1.0, static_cast<double>(r.width - 1)) + 1.0);
    std::size_t iy1 = static_cast<std::size_t>(std::clamp(std::floor(hi_y), -1.0, static_cast<double>(r.height - 1)) + 1.0);
    double r2 = d.r * d.r;
    for (std::size_t iy = iy0; iy < iy1; ++iy) {
      double dy = r.centre_y(iy) - d.cy;
      for (std::size_t ix = ix0; ix < ix1; ++ix) {
        double dx = r.centre_x(ix) - d.cx;
        if (dx * dx + dy * dy <= r2) r.bits[iy * r.width + ix] = 1;
      }
    }
  }
  return r;
}

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& mask,
                                               std::size_t width, std::size_t height) {
  std::vector<double> dist(width * height);
  for (std::size_t i = 0; i < mask.size(); ++i) dist[i] = mask[i] ? 0.0 : kEdtInf;

  std::size_t n_max = std::max(width, height);
  std::vector<double> f(n_max), d(n_max), z(n_max + 1);
  std::vector<int> v(n_max);

  for (std::size_t x = 0; x < width; ++x) {
    for (std::size_t y = 0; y < height; ++y) f[y] = dist[y * width + x];
    dt_1d(f, d, v, z, height);
    for (std::size_t y = 0; y < height; ++y) dist[y * width + x] = d[y];
  }
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) f[x] = dist[y * width + x];
    dt_1d(f, d, v, z, width);
    for (std::size_t x = 0; x < width; ++x) dist[y * width + x] = d[x];
  }
  return dist;
}

MarkedConfiguration approximate(const BinaryRaster& raster, double r_min, double r_max,
                                double coverage_tol, std::size_t max_discs,
                                ApproxReport* report) {
  if (!(r_min > 0.0) || !(r_min <= r_max))
    throw std::invalid_argument("approximate: need 0 < r_min <= r_max");
  if (!(coverage_tol > 0.0) || !(coverage_tol < 1.0))
    throw std::invalid_argument("approximate: coverage_tol must lie in (0,1)");

  MarkedConfiguration config;
  config.window = raster.world_window();
  ApproxReport rep;

  std::size_t fg = raster.foreground_count();
  if (fg == 0) {
    rep.tol_met = true;
    if (report) *report = rep;
    return config;
  }

  // Distance from each foreground pixel to the nearest background pixel.
  std::vector<std::uint8_t> bg_mask(raster.bits.size());
  for (std::size_t i = 0; i < bg_mask.size(); ++i) bg_mask[i] = raster.bits[i] ? 0 : 1;
  std::vector<double> dist_sq = squared_distance_transform(bg_mask, raster.width, raster.height);

  struct Cand {
    double dist_sq;
    std::size_t idx;
  };
  auto worse = [](const Cand& a, const Cand& b) {
    if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
    return a.idx > b.idx;  // smaller index pops first among ties
  };
  std::vector<Cand> heap;
  heap.reserve(fg);
  for (std::size_t i = 0; i < raster.bits.size(); ++i)
    if (raster.bits[i]) heap.push_back({dist_sq[i], i});
  std::make_heap(heap.begin(), heap.end(), worse);

  std::vector<std::uint8_t> covered(raster.bits.size(), 0);
  std::size_t miss = fg, extra = 0;
  double ps = raster.pixel_size;
  double target = coverage_tol * static_cast<double>(fg);
  auto wi = static_cast<std::ptrdiff_t>(raster.width);
  auto hi = static_cast<std::ptrdiff_t>(raster.height);

  while (static_cast<double>(miss + extra) > target && config.size() < max_discs && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    Cand top = heap.back();
    heap.pop_back();
    if (covered[top.idx]) continue;  // already reached by an earlier disc

    auto ix = static_cast<std::ptrdiff_t>(top.idx % raster.width);
    auto iy = static_cast<std::ptrdiff_t>(top.idx / raster.width);

    // Sub-pixel centre: centroid of the equal-distance plateau in the 3x3
    // neighbourhood; on a symmetric blob this snaps onto the symmetry axis.
    double sx = 0.0, sy = 0.0;
    int n_plateau = 0;
    for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, iy - 1); y <= std::min(hi - 1, iy + 1); ++y)
      for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, ix - 1); x <= std::min(wi - 1, ix + 1); ++x)
        if (dist_sq[static_cast<std::size_t>(y) * raster.width + static_cast<std::size_t>(x)] ==
            top.dist_sq) {
          sx += raster.centre_x(static_cast<std::size_t>(x));
          sy += raster.centre_y(static_cast<std::size_t>(y));
          ++n_plateau;
        }
    double cx = sx / n_plateau, cy = sy / n_plateau;

    // Radius by best net gain: walking outward over equal-distance rings of
    // uncovered pixels, each covered foreground pixel counts +1 and each
    // covered background pixel -1; the cut with the largest running total
    // wins. Rings at or below r_min are always included (the clamp would
    // cover them anyway), and a placement whose best total is not positive
    // would only worsen the symmetric difference, so it is skipped.
    struct Ring {
      double d2;
      int weight;
    };
    std::vector<Ring> rings;
    std::ptrdiff_t gspan = static_cast<std::ptrdiff_t>(std::ceil(r_max / ps)) + 1;
    double rmax_sq = r_max * r_max;
    for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, iy - gspan); y <= std::min(hi - 1, iy + gspan); ++y) {
      double dy = raster.centre_y(static_cast<std::size_t>(y)) - cy;
      for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, ix - gspan); x <= std::min(wi - 1, ix + gspan); ++x) {
        std::size_t j = static_cast<std::size_t>(y) * raster.width + static_cast<std::size_t>(x);
        if (covered[j]) continue;
        double dx = raster.centre_x(static_cast<std::size_t>(x)) - cx;
        double d2 = dx * dx + dy * dy;
        if (d2 > rmax_sq) continue;
        rings.push_back({d2, raster.bits[j] ? 1 : -1});
      }
    }
    std::sort(rings.begin(), rings.end(), [](const Ring& a, const Ring& b) { return a.d2 < b.d2; });

    double rmin_sq = r_min * r_min;
    int net = 0, best_net = 0;
    double radius = r_min;
    std::size_t i = 0;
    while (i < rings.size() && rings[i].d2 <= rmin_sq) net += rings[i++].weight;
    best_net = net;
    while (i < rings.size()) {
      double d2 = rings[i].d2;
      while (i < rings.size() && rings[i].d2 == d2) net += rings[i++].weight;
      if (net > best_net) {
        best_net = net;
        double d = std::sqrt(d2);
        radius = i < rings.size() ? 0.5 * (d + std::sqrt(rings[i].d2))
                                  : std::min(d + 0.5 * ps, r_max);
      }
    }
    if (best_net <= 0) continue;  // no placement here can improve the covering
    config.discs.push_back({cx, cy, radius});

    // Mark with the same closed-disc membership rasterize applies.
    std::ptrdiff_t mspan = static_cast<std::ptrdiff_t>(std::ceil(radius / ps)) + 1;
    double r2 = radius * radius;
    for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, iy - mspan); y <= std::min(hi - 1, iy + mspan); ++y) {
      double dy = raster.centre_y(static_cast<std::size_t>(y)) - cy;
      for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, ix - mspan); x <= std::min(wi - 1, ix + mspan); ++x) {
        double dx = raster.centre_x(static_cast<std::size_t>(x)) - cx;
        if (dx * dx + dy * dy > r2) continue;
        std::size_t j = static_cast<std::size_t>(y) * raster.width + static_cast<std::size_t>(x);
        if (covered[j]) continue;
        covered[j] = 1;
        if (raster.bits[j])
          --miss;
        else
          ++extra;
      }
    }
  }

  rep.n_discs = config.size();
  rep.achieved = static_cast<double>(miss + extra) / static_cast<double>(fg);
  rep.tol_met = static_cast<double>(miss + extra) <= target;
  if (report) *report = rep;
  return config;
}

void write_pgm(const BinaryRaster& raster, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
  std::vector<char> row(raster.width);
  for (std::size_t iy = raster.height; iy-- > 0;) {
    for (std::size_t ix = 0; ix < raster.width; ++ix)
      row[ix] = raster.at(ix, iy) ? static_cast<char>(255) : 0;
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("short write on " + path);

  char buf[64];
  std::ofstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("cannot write " + path + ".meta");
  std::snprintf(buf, sizeof buf, "%.17g", raster.pixel_size);
  meta << "pixel_size=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", raster.origin_x);
  meta << "origin_x=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", raster.origin_y);
  meta << "origin_y=" << buf << "\n";
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

BinaryRaster read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  if (pgm_token(in) != "P5") throw std::runtime_error(path + ": not a P5 PGM file");
  BinaryRaster r;
  try {
    r.width = std::stoul(pgm_token(in));
    r.height = std::stoul(pgm_token(in));
    unsigned long maxval = std::stoul(pgm_token(in));
    if (maxval == 0 || maxval > 255)
      throw std::runtime_error(path + ": unsupported PGM maxval");
  } catch (const std::logic_error&) {
    throw std::runtime_error(path + ": malformed PGM header");
  }
  if (r.width == 0 || r.height == 0) throw std::runtime_error(path + ": empty PGM image");

  r.bits.assign(r.width * r.height, 0);
  std::vector<char> row(r.width);
  for (std::size_t iy = r.height; iy-- > 0;) {
    in.read(row.data(), static_cast<std::streamsize>(row.size()));
    if (in.gcount() != static_cast<std::streamsize>(row.size()))
      throw std::runtime_error(path + ": truncated PGM data");
    for (std::size_t ix = 0; ix < r.width; ++ix)
      r.bits[iy * r.width + ix] = static_cast<unsigned char>(row[ix]) >= 128 ? 1 : 0;
  }

  std::ifstream meta(path + ".meta");
  if (meta) {
    std::string line;
    while (std::getline(meta, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      try {
        if (key == "pixel_size")
          r.pixel_size = std::stod(val);
        else if (key == "origin_x")
          r.origin_x = std::stod(val);
        else if (key == "origin_y")
          r.origin_y = std::stod(val);
      } catch (const std::logic_error&) {
        throw std::runtime_error(path + ".meta: bad value for " + key);
      }
    }
    if (!(r.pixel_size > 0.0)) throw std::runtime_error(path + ".meta: pixel_size must be positive");
  }
  return r;
}

}  // namespace quermass
