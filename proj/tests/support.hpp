#pragma once

// Generators and independent oracles shared by the test suites. Nothing here
// calls the FFT path it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnls/spectral_core.hpp"

namespace dnls::testing {

/// Random trigonometric polynomial with modes |k| <= max_mode, coefficients
/// uniform in the unit square scaled by `scale`.
inline SpectralField random_field(const PeriodicGrid& grid, std::mt19937_64& rng,
                                  long max_mode, double scale = 1.0) {
  std::uniform_real_distribution<double> coin(-1.0, 1.0);
  SpectralField f(grid);
  for (long k = -max_mode; k <= max_mode; ++k)
    if (grid.has_mode(k)) f.at_mode(k) = scale * Complex(coin(rng), coin(rng));
  return f;
}

/// O(N²) forward DFT: (1/N) Σ_j s_j exp(-2πi k j/N), returned in storage order.
inline std::vector<Complex> naive_forward(const std::vector<Complex>& samples,
                                          const PeriodicGrid& grid) {
  const std::size_t n = samples.size();
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex sum{};
    const double k = static_cast<double>(grid.mode(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * k * static_cast<double>(j) / static_cast<double>(n);
      sum += samples[j] * Complex(std::cos(phase), std::sin(phase));
    }
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

/// (1/L)∫₀ᴸ f(x) e^{-i w x} dx by composite Simpson with `panels` (even) intervals.
inline Complex simpson_coefficient(const std::function<double(double)>& f, double L, double w,
                                   std::size_t panels) {
  const double h = L / static_cast<double>(panels);
  Complex sum{};
  for (std::size_t j = 0; j <= panels; ++j) {
    const double x = static_cast<double>(j) * h;
    const double weight = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += weight * f(x) * std::exp(Complex(0.0, -w * x));
  }
  return sum * h / 3.0 / L;
}

/// Triple convolution Σ_{p-q+r=k} a_p conj(b_q) c_r over p, q, r in K.
inline SpectralField triple_convolution(const SpectralField& a, const SpectralField& b,
                                        const SpectralField& c) {
  const auto& grid = a.grid();
  SpectralField out(grid);
  for (long p = grid.min_mode(); p <= grid.max_mode(); ++p)
    for (long q = grid.min_mode(); q <= grid.max_mode(); ++q)
      for (long r = grid.min_mode(); r <= grid.max_mode(); ++r) {
        const long k = p - q + r;
        if (grid.has_mode(k)) out.at_mode(k) += a.at_mode(p) * std::conj(b.at_mode(q)) * c.at_mode(r);
      }
  return out;
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline SpectralField gaussian(const PeriodicGrid& grid, double center, double width = 1.0) {
  return project(grid, [=](double x) {
    const double r = (x - center) / width;
    return Complex(std::exp(-r * r));
  });
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  CsvTable table;
  std::string line;
  if (std::getline(in, line)) table.header = split_csv_line(line);
  while (std::getline(in, line)) table.rows.push_back(split_csv_line(line));
  return table;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dnls-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dnls::testing
