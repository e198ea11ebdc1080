#pragma once

// i∂ₜu + ∂ₓ²u + iα∂ₓ(|u|²u) = i(η∂ₓ²u + β∂ₓ³u + γ∂ₓu) on an L-periodic domain.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dnls/error.hpp"
#include "dnls/spectral_core.hpp"

namespace dnls {

struct ModelParams {
  double alpha = 0.0;  ///< nonlinearity strength
  double beta = 0.0;   ///< third-order dispersion
  double gamma = 0.0;  ///< transport
  double eta = 0.0;    ///< diffusion, >= 0

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) ||
        !std::isfinite(eta))
      throw InvalidInput("ModelParams: parameters must be finite");
    if (eta < 0.0) throw InvalidInput("ModelParams: eta must be >= 0");
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Per-mode coefficient m_k of the semidiscrete system
/// i û'_k + m_k û_k = α w_k P_k[|u|²u].
inline Complex semidiscrete_coefficient(const ModelParams& p, double w) {
  const double w2 = w * w;
  return {-w2 - p.beta * w2 * w + p.gamma * w, p.eta * w2};
}

/// σ_k = -i w_k² - η w_k² - iβ w_k³ + iγ w_k, the growth rate of mode k under
/// the linear flow. Equal to i·m_k.
class LinearSymbol {
 public:
  LinearSymbol(const ModelParams& params, const PeriodicGrid& grid)
      : grid_(grid), eta_(params.eta), sigma_(grid.size()) {
    params.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w = grid.wavenumber(i);
      const double w2 = w * w;
      sigma_[i] = Complex(-params.eta * w2, -w2 - params.beta * w2 * w + params.gamma * w);
    }
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return sigma_; }
  Complex operator[](std::size_t i) const noexcept { return sigma_[i]; }

  /// Diffusive decay rate per k² of the semigroup, θ = 8ηπ²/L².
  double theta() const noexcept {
    const double L = grid_.length();
    return 8.0 * eta_ * std::numbers::pi * std::numbers::pi / (L * L);
  }

 private:
  PeriodicGrid grid_;
  double eta_;
  std::vector<Complex> sigma_;
};

inline LinearSymbol linear_symbol(const ModelParams& params, const PeriodicGrid& grid) {
  return LinearSymbol(params, grid);
}

/// 𝒯(t): û_k ↦ e^{σ_k t} û_k.
inline SpectralField apply_semigroup(const LinearSymbol& symbol, double t,
                                     const SpectralField& field) {
  if (!(t >= 0.0)) throw InvalidInput("apply_semigroup: t must be >= 0");
  if (!(symbol.grid() == field.grid()))
    throw InvalidInput("apply_semigroup: symbol and field live on different grids");
  SpectralField out = field;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(symbol[i] * t);
  return out;
}

inline SpectralField exact_linear_solution(const ModelParams& params, const SpectralField& u0,
                                           double t) {
  if (params.alpha != 0.0)
    throw InvalidInput("exact_linear_solution: requires alpha = 0");
  return apply_semigroup(linear_symbol(params, u0.grid()), t, u0);
}

/// Forcing α w_k Ĉ_k of the semidiscrete system for a cubic spectrum Ĉ.
inline SpectralField semidiscrete_forcing(const ModelParams& params, const SpectralField& cubic_spectrum) {
  SpectralField out = cubic_spectrum;
  const auto& grid = out.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] *= params.alpha * grid.wavenumber(i);
  return out;
}

/// F(u) = -α ∂ₓ(|u|²u), coefficients -α (i w_k) Ĉ_k.
inline SpectralField nonlinear_term(const ModelParams& params, const SpectralField& field,
                                    Dealias mode = Dealias::pad2) {
  SpectralField out(field.grid());
  if (params.alpha == 0.0) return out;
  out = cubic(field, mode);
  const auto& grid = out.grid();
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] *= Complex(0.0, -params.alpha * grid.wavenumber(i));
  return out;
}

}  // namespace dnls
