#pragma once

// Periodic grid, discrete Fourier conventions, Sobolev norms, projection and
// dealiased cubic products.
//
// Coefficients are stored in transform order: storage index i holds mode
// k = i for i < N/2 and k = i - N for i >= N/2, so the mode set is
// K = {-N/2, ..., N/2 - 1}. The Nyquist coefficient is mode -N/2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dnls/error.hpp"
#include "dnls/fft.hpp"

namespace dnls {

using Complex = std::complex<double>;

class PeriodicGrid {
 public:
  PeriodicGrid(double length, std::size_t points) : length_(length), points_(points) {
    if (!(length > 0.0) || !std::isfinite(length))
      throw InvalidInput("PeriodicGrid: length must be finite and positive");
    if (points < 4 || points % 2 != 0)
      throw InvalidInput("PeriodicGrid: point count must be even and >= 4, got " +
                         std::to_string(points));
  }

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return points_; }
  double spacing() const noexcept { return length_ / static_cast<double>(points_); }

  double x(std::size_t j) const noexcept {
    return static_cast<double>(j) * length_ / static_cast<double>(points_);
  }

  std::vector<double> nodes() const {
    std::vector<double> xs(points_);
    for (std::size_t j = 0; j < points_; ++j) xs[j] = x(j);
    return xs;
  }

  long min_mode() const noexcept { return -static_cast<long>(points_ / 2); }
  long max_mode() const noexcept { return static_cast<long>(points_ / 2) - 1; }
  bool has_mode(long k) const noexcept { return k >= min_mode() && k <= max_mode(); }

  /// Mode number k of storage index i.
  long mode(std::size_t i) const noexcept {
    return i < points_ / 2 ? static_cast<long>(i)
                           : static_cast<long>(i) - static_cast<long>(points_);
  }

  /// Storage index of mode k; k must lie in K.
  std::size_t index(long k) const {
    if (!has_mode(k)) throw InvalidInput("PeriodicGrid: mode " + std::to_string(k) + " not in K");
    return k >= 0 ? static_cast<std::size_t>(k)
                  : static_cast<std::size_t>(k + static_cast<long>(points_));
  }

  /// w_k = 2πk/L for the mode at storage index i.
  double wavenumber(std::size_t i) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(mode(i)) / length_;
  }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  double length_;
  std::size_t points_;
};

/// Smoothness exponent of an H^s norm.
class SobolevOrder {
 public:
  explicit SobolevOrder(double s) : s_(s) {
    if (!std::isfinite(s) || s < 0.0) throw InvalidInput("SobolevOrder: s must be finite and >= 0");
  }
  double value() const noexcept { return s_; }

 private:
  double s_;
};

/// A periodic function represented by its Fourier coefficients on a grid.
class SpectralField {
 public:
  explicit SpectralField(PeriodicGrid grid) : grid_(grid), coeffs_(grid.size()) {}

  SpectralField(PeriodicGrid grid, std::vector<Complex> coeffs)
      : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size())
      throw InvalidInput("SpectralField: coefficient count " + std::to_string(coeffs_.size()) +
                         " does not match grid size " + std::to_string(grid_.size()));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  Complex operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }

  /// Coefficient of mode k (k in K).
  Complex at_mode(long k) const { return coeffs_[grid_.index(k)]; }
  Complex& at_mode(long k) { return coeffs_[grid_.index(k)]; }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  SpectralField& operator+=(const SpectralField& other) {
    require_same_grid(other, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& other) {
    require_same_grid(other, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(Complex scale) noexcept {
    for (auto& c : coeffs_) c *= scale;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

  void require_same_grid(const SpectralField& other, const char* where) const {
    if (!(grid_ == other.grid_))
      throw InvalidInput(std::string(where) + ": fields live on different grids");
  }

 private:
  PeriodicGrid grid_;
  std::vector<Complex> coeffs_;
};

/// Samples f(x_j) on the grid nodes.
inline std::vector<Complex> sample(const PeriodicGrid& grid,
                                   const std::function<Complex(double)>& f) {
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) values[j] = f(grid.x(j));
  return values;
}

/// û_k = (1/N) Σ_j u_j exp(-i w_k x_j): the trapezoid rule for (1/L)∫u e^{-iw_k x}.
inline SpectralField dft_forward(std::span<const Complex> samples, const PeriodicGrid& grid) {
  if (samples.size() != grid.size())
    throw InvalidInput("dft_forward: " + std::to_string(samples.size()) + " samples for a " +
                       std::to_string(grid.size()) + "-point grid");
  std::vector<Complex> coeffs(grid.size());
  fft::transform(samples, coeffs, fft::Direction::forward);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (auto& c : coeffs) c *= inv_n;
  return SpectralField(grid, std::move(coeffs));
}

/// u(x_j) = Σ_k û_k exp(i w_k x_j).
inline std::vector<Complex> dft_inverse(const SpectralField& field) {
  std::vector<Complex> samples(field.size());
  fft::transform(field.coeffs(), samples, fft::Direction::backward);
  return samples;
}

inline SpectralField project(const PeriodicGrid& grid, const std::function<Complex(double)>& f) {
  auto values = sample(grid, f);
  return dft_forward(values, grid);
}

/// ⟨f,g⟩_s = L Σ_k (1+k²)^s f̂_k conj(ĝ_k).
inline Complex hs_inner(const SpectralField& f, const SpectralField& g, SobolevOrder s) {
  f.require_same_grid(g, "hs_inner");
  const auto& grid = f.grid();
  Complex sum{};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = static_cast<double>(grid.mode(i));
    sum += std::pow(1.0 + k * k, s.value()) * f[i] * std::conj(g[i]);
  }
  return grid.length() * sum;
}

/// ‖f‖_s = sqrt(Σ_k (1+k²)^s |f̂_k|²). No factor L, unlike hs_inner.
inline double hs_norm(const SpectralField& f, SobolevOrder s) {
  const auto& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = static_cast<double>(grid.mode(i));
    sum += std::pow(1.0 + k * k, s.value()) * std::norm(f[i]);
  }
  return std::sqrt(sum);
}

/// Discrete L² norm, identical to hs_norm(f, SobolevOrder{0}).
inline double l2_norm(const SpectralField& f) {
  double sum = 0.0;
  for (auto c : f.coeffs()) sum += std::norm(c);
  return std::sqrt(sum);
}

/// max_j |u_j|.
inline double max_abs(std::span<const Complex> values) {
  double m = 0.0;
  for (auto v : values) m = std::max(m, std::abs(v));
  return m;
}

/// Restriction to the M-point grid on the same domain, keeping modes in
/// {-M/2, ..., M/2-1}.
inline SpectralField truncate(const SpectralField& field, std::size_t modes) {
  const auto& grid = field.grid();
  if (modes % 2 != 0 || modes < 4 || modes > grid.size())
    throw InvalidInput("truncate: mode count must be even with 4 <= M <= " +
                       std::to_string(grid.size()) + ", got " + std::to_string(modes));
  PeriodicGrid coarse(grid.length(), modes);
  SpectralField out(coarse);
  for (std::size_t i = 0; i < modes; ++i) out[i] = field.at_mode(coarse.mode(i));
  return out;
}

/// Embedding into an M-point grid (M >= N) by zero-padding the coefficients.
inline SpectralField zero_pad(const SpectralField& field, std::size_t modes) {
  const auto& grid = field.grid();
  if (modes % 2 != 0 || modes < grid.size())
    throw InvalidInput("zero_pad: mode count must be even and >= " + std::to_string(grid.size()));
  PeriodicGrid fine(grid.length(), modes);
  SpectralField out(fine);
  for (std::size_t i = 0; i < grid.size(); ++i) out.at_mode(grid.mode(i)) = field[i];
  return out;
}

/// Treatment of aliasing in pointwise products.
enum class Dealias {
  pad2,  ///< exact: zero-pad to 2N before multiplying
  none,  ///< plain collocation product on the N-point grid
};

/// Coefficients of a·conj(b)·c on the grid of the inputs. With Dealias::pad2
/// this equals the triple convolution Σ_{p-q+r=k} â_p conj(b̂_q) ĉ_r over
/// p, q, r in K, for every k in K.
inline SpectralField dealias_pad_product(const SpectralField& a, const SpectralField& b,
                                         const SpectralField& c,
                                         Dealias mode = Dealias::pad2) {
  a.require_same_grid(b, "dealias_pad_product");
  a.require_same_grid(c, "dealias_pad_product");
  const std::size_t n = a.size();
  const std::size_t m = mode == Dealias::pad2 ? 2 * n : n;

  auto physical = [&](const SpectralField& f) {
    return mode == Dealias::pad2 ? dft_inverse(zero_pad(f, m)) : dft_inverse(f);
  };
  auto pa = physical(a);
  const bool b_is_a = &a == &b;
  const bool c_is_a = &a == &c;
  auto pb = b_is_a ? std::vector<Complex>{} : physical(b);
  auto pc = c_is_a ? std::vector<Complex>{} : physical(c);
  const auto& vb = b_is_a ? pa : pb;
  const auto& vc = c_is_a ? pa : pc;

  std::vector<Complex> product(m);
  for (std::size_t j = 0; j < m; ++j) product[j] = pa[j] * std::conj(vb[j]) * vc[j];

  PeriodicGrid work(a.grid().length(), m);
  auto spectrum = dft_forward(product, work);
  return mode == Dealias::pad2 ? truncate(spectrum, n) : spectrum;
}

/// Coefficients of |u|²u.
inline SpectralField cubic(const SpectralField& u, Dealias mode = Dealias::pad2) {
  return dealias_pad_product(u, u, u, mode);
}

/// Coefficients of ∂ₓ^order u.
inline SpectralField derivative(const SpectralField& u, int order = 1) {
  SpectralField out = u;
  const auto& grid = u.grid();
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] *= std::pow(Complex(0.0, grid.wavenumber(i)), order);
  return out;
}

}  // namespace dnls
