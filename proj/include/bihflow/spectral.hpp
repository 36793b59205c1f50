#pragma once

// Discrete Fourier calculus on the periodic grid (FFTW backed).

#include <complex>
#include <memory>
#include <vector>

#include "bihflow/fields.hpp"
#include "bihflow/kernel.hpp"

namespace bihflow::spectral {

using Complex = std::complex<double>;
using fields::Grid;
using fields::GridField;
using kernel::MultiIndex;

/// Per-mode wavenumbers k = 2 pi m / L, in FFT order.
struct ModeTable {
  std::vector<std::array<double, 3>> k;
  /// nyquist[p][a]: mode p sits on the Nyquist frequency of axis a, where
  /// odd derivative multipliers are set to zero to keep real fields real.
  std::vector<std::array<bool, 3>> nyquist;
  /// |k|^4, the symbol of the bilaplacian.
  std::vector<double> symbol;
};

std::shared_ptr<const ModeTable> mode_table(const Grid& grid);

/// Fourier coefficients of every component, component-major.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(const Grid& grid, int components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t mode_count() const noexcept { return grid_.point_count(); }

  Complex* component(int c) noexcept { return coeffs_.data() + c * mode_count(); }
  const Complex* component(int c) const noexcept { return coeffs_.data() + c * mode_count(); }

  std::vector<Complex>& coefficients() noexcept { return coeffs_; }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

 private:
  Grid grid_;
  int components_ = 0;
  std::vector<Complex> coeffs_;
};

/// Unnormalized forward DFT of each component.
Spectrum forward(const GridField& f);
/// Normalized inverse DFT; returns the real part.
GridField inverse(const Spectrum& s);

/// In-place complex transform of one component array.
void transform(const Grid& grid, Complex* data, bool inverse_direction);

/// Value of (i k)^order at a mode with the Nyquist convention applied.
Complex derivative_symbol(const ModeTable& modes, std::size_t p, const MultiIndex& order);

Spectrum derivative(const Spectrum& s, const MultiIndex& order);

/// ∂^order f via the multiplier (i 2 pi m / L)^order.
GridField spectral_derivative(const GridField& f, const MultiIndex& order);

/// Sum over axes of ∂_a F_a; each F_a has the same codomain.
GridField spectral_divergence(const std::vector<GridField>& per_axis);

/// Sum over lattice points of the periodic Euclidean ball B_r(x) of a
/// density, for every center x (FFT convolution with the ball indicator).
/// Lattice points are counted once even when the ball wraps.
std::vector<double> ball_sum(const Grid& grid, const std::vector<double>& density, double radius);

/// Number of lattice points in a ball of the given radius.
std::size_t ball_count(const Grid& grid, double radius);

/// Integer offsets of the lattice ball (deduplicated modulo M).
std::vector<std::array<int, 3>> ball_offsets(const Grid& grid, double radius);

}  // namespace bihflow::spectral
