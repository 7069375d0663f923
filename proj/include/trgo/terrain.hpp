#pragma once

// Procedural heightmaps for the four environment classes plus the stress
// presets. All generators are deterministic in (seed, parameters).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "trgo/error.hpp"

namespace trgo {

enum class TerrainKind : std::uint32_t { flat = 0, perlin_slope = 1, rock_field = 2 };

inline const char* to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::flat: return "flat";
    case TerrainKind::perlin_slope: return "perlin_slope";
    case TerrainKind::rock_field: return "rock_field";
  }
  return "unknown";
}

struct TerrainParams {
  int octaves = 0;
  double amplitude = 0.0;        // perlin, m
  double base_wavelength = 4.0;  // perlin, m
  double rock_max_height = 0.0;  // m
  double rock_density = 0.0;     // rocks / m^2
  double rock_size = 0.2;        // m, square footprint side

  bool operator==(const TerrainParams&) const = default;
};

class Heightmap {
 public:
  Heightmap() = default;

  Heightmap(std::size_t cols, std::size_t rows, double cell_size,
            double origin_x, double origin_y, std::uint64_t seed,
            TerrainKind kind, TerrainParams params,
            std::vector<double> grid)
      : cols_(cols), rows_(rows), cell_size_(cell_size), origin_x_(origin_x),
        origin_y_(origin_y), seed_(seed), kind_(kind), params_(params),
        grid_(std::move(grid)) {
    if (cols_ < 2 || rows_ < 2) throw ParameterError("heightmap needs >= 2x2 cells");
    if (!(cell_size_ > 0.0)) throw ParameterError("cell_size must be positive");
    if (grid_.size() != cols_ * rows_) throw ParameterError("grid size mismatch");
  }

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }
  double cell_size() const { return cell_size_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double extent_x() const { return static_cast<double>(cols_ - 1) * cell_size_; }
  double extent_y() const { return static_cast<double>(rows_ - 1) * cell_size_; }
  double center_x() const { return origin_x_ + extent_x() / 2.0; }
  double center_y() const { return origin_y_ + extent_y() / 2.0; }
  std::uint64_t seed() const { return seed_; }
  TerrainKind kind() const { return kind_; }
  const TerrainParams& params() const { return params_; }
  const std::vector<double>& grid() const { return grid_; }

  double at(std::size_t col, std::size_t row) const { return grid_[row * cols_ + col]; }

  bool contains(double x, double y) const {
    const double u = (x - origin_x_) / cell_size_;
    const double v = (y - origin_y_) / cell_size_;
    return u >= 0.0 && v >= 0.0 && u <= static_cast<double>(cols_ - 1) &&
           v <= static_cast<double>(rows_ - 1);
  }

  /// Bilinear interpolation of the surrounding four nodes.
  double height_at(double x, double y) const {
    if (!contains(x, y)) {
      throw OutOfBounds("query (" + std::to_string(x) + ", " + std::to_string(y) +
                        ") outside the heightmap");
    }
    const double u = (x - origin_x_) / cell_size_;
    const double v = (y - origin_y_) / cell_size_;
    const auto i = std::min(static_cast<std::size_t>(u), cols_ - 2);
    const auto j = std::min(static_cast<std::size_t>(v), rows_ - 2);
    const double fu = u - static_cast<double>(i);
    const double fv = v - static_cast<double>(j);
    const double z00 = at(i, j), z10 = at(i + 1, j);
    const double z01 = at(i, j + 1), z11 = at(i + 1, j + 1);
    return (1.0 - fv) * ((1.0 - fu) * z00 + fu * z10) +
           fv * ((1.0 - fu) * z01 + fu * z11);
  }

  bool operator==(const Heightmap&) const = default;

 private:
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  double cell_size_ = 1.0;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::uint64_t seed_ = 0;
  TerrainKind kind_ = TerrainKind::flat;
  TerrainParams params_{};
  std::vector<double> grid_;
};

namespace detail {

struct GridShape {
  std::size_t cols;
  std::size_t rows;
};

inline GridShape grid_shape(double extent_x, double extent_y, double cell_size) {
  if (!(extent_x > 0.0) || !(extent_y > 0.0)) {
    throw ParameterError("terrain extent must be positive");
  }
  if (!(cell_size > 0.0)) throw ParameterError("cell_size must be positive");
  const auto cols = static_cast<std::size_t>(std::llround(extent_x / cell_size)) + 1;
  const auto rows = static_cast<std::size_t>(std::llround(extent_y / cell_size)) + 1;
  return {std::max<std::size_t>(cols, 2), std::max<std::size_t>(rows, 2)};
}

// Classic gradient noise on a seeded permutation table.
class Perlin2D {
 public:
  explicit Perlin2D(std::uint64_t seed) {
    std::array<int, 256> p{};
    std::iota(p.begin(), p.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = p.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(p[i], p[pick(rng)]);
    }
    for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255];
  }

  // Range roughly [-0.7, 0.7]; zero on integer lattice points.
  double operator()(double x, double y) const {
    const double fx = std::floor(x), fy = std::floor(y);
    const int xi = static_cast<int>(fx) & 255;
    const int yi = static_cast<int>(fy) & 255;
    const double xf = x - fx, yf = y - fy;
    const double u = fade(xf), v = fade(yf);
    const int aa = perm_[perm_[xi] + yi];
    const int ab = perm_[perm_[xi] + yi + 1];
    const int ba = perm_[perm_[xi + 1] + yi];
    const int bb = perm_[perm_[xi + 1] + yi + 1];
    const double x1 = lerp(grad(aa, xf, yf), grad(ba, xf - 1.0, yf), u);
    const double x2 = lerp(grad(ab, xf, yf - 1.0), grad(bb, xf - 1.0, yf - 1.0), u);
    return lerp(x1, x2, v);
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
  static double lerp(double a, double b, double t) { return a + t * (b - a); }
  static double grad(int hash, double x, double y) {
    switch (hash & 7) {
      case 0: return x + y;
      case 1: return -x + y;
      case 2: return x - y;
      case 3: return -x - y;
      case 4: return x;
      case 5: return -x;
      case 6: return y;
      default: return -y;
    }
  }

  std::array<int, 512> perm_{};
};

}  // namespace detail

inline Heightmap generate_flat_terrain(std::uint64_t seed, double extent_x,
                                       double extent_y, double cell_size,
                                       double elevation = 0.0) {
  const auto shape = detail::grid_shape(extent_x, extent_y, cell_size);
  return Heightmap(shape.cols, shape.rows, cell_size, -extent_x / 2.0,
                   -extent_y / 2.0, seed, TerrainKind::flat, TerrainParams{},
                   std::vector<double>(shape.cols * shape.rows, elevation));
}

/// Multi-octave gradient noise, persistence 0.5 and lacunarity 2.0. The map
/// is centred on the world origin.
inline Heightmap generate_perlin_terrain(std::uint64_t seed, int octaves,
                                         double amplitude, double extent_x,
                                         double extent_y, double cell_size,
                                         double base_wavelength = 4.0) {
  if (octaves < 1) throw ParameterError("octaves must be >= 1");
  if (!(base_wavelength > 0.0)) throw ParameterError("base_wavelength must be positive");
  const auto shape = detail::grid_shape(extent_x, extent_y, cell_size);
  const detail::Perlin2D noise(seed);

  // Irrational per-octave offsets keep grid nodes off the lattice.
  std::vector<std::array<double, 2>> offsets;
  for (int k = 0; k < octaves; ++k) {
    offsets.push_back({17.31 + 31.7 * std::sqrt(2.0) * k, 5.77 + 23.3 * std::sqrt(3.0) * k});
  }

  const double x0 = -extent_x / 2.0, y0 = -extent_y / 2.0;
  std::vector<double> grid(shape.cols * shape.rows, 0.0);
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      const double x = static_cast<double>(c) * cell_size;
      const double y = static_cast<double>(r) * cell_size;
      double freq = 1.0 / base_wavelength;
      double amp = 1.0;
      double sum = 0.0;
      for (int k = 0; k < octaves; ++k) {
        sum += amp * noise(x * freq + offsets[k][0], y * freq + offsets[k][1]);
        freq *= 2.0;
        amp *= 0.5;
      }
      grid[r * shape.cols + c] = amplitude * sum;
    }
  }
  TerrainParams params;
  params.octaves = octaves;
  params.amplitude = amplitude;
  params.base_wavelength = base_wavelength;
  return Heightmap(shape.cols, shape.rows, cell_size, x0, y0, seed,
                   TerrainKind::perlin_slope, params, std::move(grid));
}

/// Flat ground with square rocks of uniform-random height in [0, max].
/// Overlapping rocks take the taller height. A clear patch of
/// `clear_radius` around the world origin keeps the start pose valid.
inline Heightmap generate_rock_terrain(std::uint64_t seed, double rock_max_height,
                                       double rock_density, double extent_x,
                                       double extent_y, double cell_size,
                                       double rock_size = 0.2,
                                       double clear_radius = 0.0) {
  if (rock_max_height < 0.0) throw ParameterError("rock_max_height must be >= 0");
  if (rock_density < 0.0) throw ParameterError("rock_density must be >= 0");
  if (!(rock_size > 0.0)) throw ParameterError("rock_size must be positive");
  const auto shape = detail::grid_shape(extent_x, extent_y, cell_size);
  const double x0 = -extent_x / 2.0, y0 = -extent_y / 2.0;
  std::vector<double> grid(shape.cols * shape.rows, 0.0);

  const auto count =
      static_cast<std::size_t>(std::llround(rock_density * extent_x * extent_y));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x0 + extent_x);
  std::uniform_real_distribution<double> uy(y0, y0 + extent_y);
  std::uniform_real_distribution<double> uh(0.0, 1.0);
  for (std::size_t n = 0; n < count; ++n) {
    const double cx = ux(rng), cy = uy(rng);
    const double h = rock_max_height * uh(rng);
    if (std::hypot(cx, cy) < clear_radius) continue;
    for (std::size_t r = 0; r < shape.rows; ++r) {
      const double y = y0 + static_cast<double>(r) * cell_size;
      if (std::abs(y - cy) > rock_size / 2.0) continue;
      for (std::size_t c = 0; c < shape.cols; ++c) {
        const double x = x0 + static_cast<double>(c) * cell_size;
        if (std::abs(x - cx) > rock_size / 2.0) continue;
        auto& z = grid[r * shape.cols + c];
        z = std::max(z, h);
      }
    }
  }
  TerrainParams params;
  params.rock_max_height = rock_max_height;
  params.rock_density = rock_density;
  params.rock_size = rock_size;
  return Heightmap(shape.cols, shape.rows, cell_size, x0, y0, seed,
                   TerrainKind::rock_field, params, std::move(grid));
}

/// Mean magnitude of the forward-difference gradient over the grid.
inline double roughness(const Heightmap& map) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r + 1 < map.rows(); ++r) {
    for (std::size_t c = 0; c + 1 < map.cols(); ++c) {
      const double gx = (map.at(c + 1, r) - map.at(c, r)) / map.cell_size();
      const double gy = (map.at(c, r + 1) - map.at(c, r)) / map.cell_size();
      sum += std::hypot(gx, gy);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Environment presets

struct TerrainSpec {
  std::string name = "E0";
  TerrainKind kind = TerrainKind::flat;
  int octaves = 0;
  double amplitude = 0.3;
  double base_wavelength = 4.0;
  double rock_max_height = 0.0;
  double rock_density = 2.0;
  double rock_size = 0.2;
  double extent = 8.0;
  double cell_size = 0.05;
  bool stress = false;

  Heightmap generate(std::uint64_t seed) const {
    switch (kind) {
      case TerrainKind::flat:
        return generate_flat_terrain(seed, extent, extent, cell_size);
      case TerrainKind::perlin_slope:
        return generate_perlin_terrain(seed, octaves, amplitude, extent, extent,
                                       cell_size, base_wavelength);
      case TerrainKind::rock_field:
        return generate_rock_terrain(seed, rock_max_height, rock_density, extent,
                                     extent, cell_size, rock_size);
    }
    throw ParameterError("unknown terrain kind");
  }
};

/// Accepts E0..E3, perlin:<octaves>, rock:<max height> and the stress preset
/// names perlin6/perlin8/perlin11/rock0.6/rock0.8/rock1.0.
inline TerrainSpec terrain_preset(const std::string& name) {
  TerrainSpec spec;
  spec.name = name;
  auto perlin = [&](int octaves) {
    spec.kind = TerrainKind::perlin_slope;
    spec.octaves = octaves;
  };
  auto rock = [&](double height) {
    spec.kind = TerrainKind::rock_field;
    spec.rock_max_height = height;
  };
  if (name == "E0" || name == "flat") {
    spec.kind = TerrainKind::flat;
  } else if (name == "E1") {
    perlin(3);
  } else if (name == "E2") {
    rock(0.5);
  } else if (name == "E3") {
    perlin(5);
  } else if (name == "perlin6" || name == "perlin8" || name == "perlin11") {
    perlin(std::stoi(name.substr(6)));
    spec.stress = true;
  } else if (name == "rock0.6" || name == "rock0.8" || name == "rock1.0") {
    rock(std::stod(name.substr(4)));
    spec.stress = true;
  } else if (name.rfind("perlin:", 0) == 0 || name.rfind("rock:", 0) == 0) {
    const bool is_perlin = name[0] == 'p';
    const std::string value = name.substr(is_perlin ? 7 : 5);
    try {
      if (is_perlin) {
        perlin(std::stoi(value));
        spec.stress = spec.octaves >= 6;
      } else {
        rock(std::stod(value));
        spec.stress = spec.rock_max_height >= 0.6;
      }
    } catch (const std::logic_error&) {
      throw ParameterError("bad terrain value in " + name);
    }
  } else {
    throw ParameterError("unknown environment " + name);
  }
  return spec;
}

inline const std::vector<std::string>& stress_presets() {
  static const std::vector<std::string> names{"perlin6", "perlin8",  "perlin11",
                                              "rock0.6", "rock0.8", "rock1.0"};
  return names;
}

// ---------------------------------------------------------------------------
// Persistence

namespace detail {
inline constexpr char kHeightmapMagic[8] = {'T', 'R', 'G', 'O', 'H', 'M', 'A', 'P'};
inline constexpr std::uint32_t kHeightmapVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("unexpected end of file");
  return v;
}
}  // namespace detail

/// Layout (native little-endian): magic "TRGOHMAP", u32 version, u64 cols,
/// u64 rows, f64 cell_size, f64 origin_x, f64 origin_y, u64 seed, u32 kind,
/// i32 octaves, f64 amplitude, f64 base_wavelength, f64 rock_max_height,
/// f64 rock_density, f64 rock_size, then rows*cols f64 row-major.
inline void write_heightmap(std::ostream& out, const Heightmap& map) {
  using detail::write_pod;
  out.write(detail::kHeightmapMagic, sizeof(detail::kHeightmapMagic));
  write_pod(out, detail::kHeightmapVersion);
  write_pod(out, static_cast<std::uint64_t>(map.cols()));
  write_pod(out, static_cast<std::uint64_t>(map.rows()));
  write_pod(out, map.cell_size());
  write_pod(out, map.origin_x());
  write_pod(out, map.origin_y());
  write_pod(out, map.seed());
  write_pod(out, static_cast<std::uint32_t>(map.kind()));
  const auto& p = map.params();
  write_pod(out, static_cast<std::int32_t>(p.octaves));
  write_pod(out, p.amplitude);
  write_pod(out, p.base_wavelength);
  write_pod(out, p.rock_max_height);
  write_pod(out, p.rock_density);
  write_pod(out, p.rock_size);
  out.write(reinterpret_cast<const char*>(map.grid().data()),
            static_cast<std::streamsize>(map.grid().size() * sizeof(double)));
}

inline Heightmap read_heightmap(std::istream& in) {
  using detail::read_pod;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, detail::kHeightmapMagic, sizeof(magic)) != 0) {
    throw IoError("not a heightmap file");
  }
  if (read_pod<std::uint32_t>(in) != detail::kHeightmapVersion) {
    throw IoError("unsupported heightmap version");
  }
  const auto cols = read_pod<std::uint64_t>(in);
  const auto rows = read_pod<std::uint64_t>(in);
  const auto cell = read_pod<double>(in);
  const auto ox = read_pod<double>(in);
  const auto oy = read_pod<double>(in);
  const auto seed = read_pod<std::uint64_t>(in);
  const auto kind = read_pod<std::uint32_t>(in);
  if (kind > 2) throw IoError("bad terrain kind in heightmap file");
  TerrainParams p;
  p.octaves = read_pod<std::int32_t>(in);
  p.amplitude = read_pod<double>(in);
  p.base_wavelength = read_pod<double>(in);
  p.rock_max_height = read_pod<double>(in);
  p.rock_density = read_pod<double>(in);
  p.rock_size = read_pod<double>(in);
  if (cols > (1u << 20) || rows > (1u << 20)) throw IoError("heightmap too large");
  std::vector<double> grid(cols * rows);
  in.read(reinterpret_cast<char*>(grid.data()),
          static_cast<std::streamsize>(grid.size() * sizeof(double)));
  if (!in) throw IoError("truncated heightmap grid");
  return Heightmap(cols, rows, cell, ox, oy, seed, static_cast<TerrainKind>(kind), p,
                   std::move(grid));
}

inline void save_heightmap(const std::string& path, const Heightmap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_heightmap(out, map);
}

inline Heightmap load_heightmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_heightmap(in);
}

inline void write_heightmap_csv(std::ostream& out, const Heightmap& map) {
  out << "x,y,z\n";
  char buf[96];
  for (std::size_t r = 0; r < map.rows(); ++r) {
    for (std::size_t c = 0; c < map.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                    map.origin_x() + static_cast<double>(c) * map.cell_size(),
                    map.origin_y() + static_cast<double>(r) * map.cell_size(),
                    map.at(c, r));
      out << buf;
    }
  }
}

}  // namespace trgo
