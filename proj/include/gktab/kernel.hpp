#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace gktab {

using Complex = std::complex<double>;

/// The two radial kernels this library tabulates and interpolates.
enum class KernelKind : std::uint8_t {
  PlainExp = 0,    ///< exp(-jkr)
  GreenOverR = 1,  ///< exp(-jkr)/r
};

inline const char* kernel_name(KernelKind kind) {
  return kind == KernelKind::PlainExp ? "exp" : "green";
}

/// Lossless homogeneous medium. Only real material constants: a complex
/// wavenumber would break the zero-crossing placement the sampler relies on.
struct Medium {
  double lambda0 = 1.0;  ///< free-space wavelength [m]
  double eps_r = 1.0;    ///< relative permittivity
  double mu_r = 1.0;     ///< relative permeability

  void validate() const {
    if (!(std::isfinite(lambda0) && lambda0 > 0.0))
      throw std::invalid_argument("Medium: lambda0 must be finite and > 0");
    if (!(std::isfinite(eps_r) && eps_r > 0.0))
      throw std::invalid_argument("Medium: eps_r must be finite and > 0");
    if (!(std::isfinite(mu_r) && mu_r > 0.0))
      throw std::invalid_argument("Medium: mu_r must be finite and > 0");
  }
};

/// k = 2*pi*sqrt(eps_r*mu_r)/lambda0 [1/m].
inline double wavenumber(const Medium& medium) {
  medium.validate();
  return 2.0 * std::numbers::pi * std::sqrt(medium.eps_r * medium.mu_r) / medium.lambda0;
}

/// Direct evaluation of exp(-jkr) or exp(-jkr)/r. This is the table source
/// and the correctness oracle for every interpolated path.
inline Complex eval_analytic(KernelKind kind, double k, double r) {
  if (!(k >= 0.0)) throw std::invalid_argument("eval_analytic: k must be >= 0");
  if (kind == KernelKind::GreenOverR) {
    if (r == 0.0)
      throw std::domain_error("eval_analytic: exp(-jkr)/r is singular at r = 0; "
                              "route the point to the singular-integration fallback");
    if (!(r > 0.0)) throw std::invalid_argument("eval_analytic: r must be > 0");
    const double kr = k * r;
    return {std::cos(kr) / r, -std::sin(kr) / r};
  }
  if (!(r >= 0.0)) throw std::invalid_argument("eval_analytic: r must be >= 0");
  const double kr = k * r;
  return {std::cos(kr), -std::sin(kr)};
}

}  // namespace gktab
