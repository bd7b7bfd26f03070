#pragma once

#include <jcoup/tensor.hpp>

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace jcoup::spin {

/// Hilbert-space dimension of two spin-1/2 nuclei.
inline constexpr int kDim = 4;

using CMat = Eigen::Matrix<std::complex<double>, kDim, kDim>;
using RVec = Eigen::Matrix<double, kDim, 1>;

namespace constants {
inline constexpr double mu0_over_4pi = 1e-7;        // T^2 m^3 / J
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double gamma_13c = 6.728284e7;     // rad / (s T)
inline constexpr double angstrom = 1e-10;           // m
} // namespace constants

/// Two coupled spin-1/2 nuclei. Tensors are in the crystal frame, in Hz.
struct SpinSystem {
  double gamma_a{constants::gamma_13c};
  double gamma_b{constants::gamma_13c};
  double offset_a{0.0}; // Hz
  double offset_b{0.0}; // Hz
  CouplingTensor j_tensor;
  CouplingTensor d_tensor;
  std::string description;
};

/// Throws std::invalid_argument unless D is symmetric and traceless within
/// 1e-9 Hz and both tensors share a frame.
void validate(const SpinSystem &sys);

struct Line {
  double frequency{0.0}; // Hz
  double intensity{0.0};
};

struct Spectrum {
  std::vector<Line> lines; // ascending frequency
  double field{0.0};       // T
};

/// Dipolar coupling tensor b (I - 3 e e^T) in Hz, with
/// b = (mu0/4pi) gamma_a gamma_b hbar / (2 pi r^3). Throws on r = 0.
CouplingTensor dipolar_tensor(const Vec3 &r_angstrom, double gamma_a, double gamma_b);

/// |b| in Hz for a separation in Angstrom.
double dipolar_prefactor(double r_angstrom, double gamma_a, double gamma_b);

/// Spin operators in the product basis |uu>, |ud>, |du>, |dd>; `spin` is 0
/// or 1, `axis` 0..2 for x, y, z.
const CMat &spin_operator(int spin, int axis);

/// Sum of both spins' components along a (normalised) direction.
CMat total_spin_along(const Vec3 &direction);

/// H/h in Hz for field B (T) along lab +Z with the crystal rotated by
/// `orientation`: -(nu_a I1z + nu_b I2z) + I1 . R (J + D) R^T . I2,
/// nu = gamma B / 2 pi + offset.
CMat build_hamiltonian(const SpinSystem &sys, double field_tesla,
                       const Rotation &orientation = Rotation::identity());

struct Eigensystem {
  RVec energies; // ascending, Hz
  CMat vectors;  // columns
};
Eigensystem diagonalize(const CMat &h);

/// Stick spectrum of `h` detected through `detect`: one line per eigenstate
/// pair with frequency |E_f - E_i| and intensity |<f|detect|i>|^2. Lines
/// below the intensity floor or at zero frequency are dropped and coincident
/// lines merged (see line_tolerance).
Spectrum transition_spectrum(const CMat &h, const CMat &detect, double field_tesla);

/// Frequency resolution used for merging and zero-frequency filtering:
/// max(1e-9 Hz, 1e-12 * spectral radius of H).
double line_tolerance(const RVec &energies);

inline constexpr double kIntensityFloor = 1e-12;

/// Spectrum detected through I1x + I2x.
Spectrum spectrum(const SpinSystem &sys, double field_tesla,
                  const Rotation &orientation = Rotation::identity());

struct SweepPoint {
  double angle_deg{0.0};
  Spectrum spectrum;
};

/// Spectra at angles k * 360 / steps degrees (k = 0..steps-1) of crystal
/// rotation about `axis`, applied after `base`. Throws for steps < 1.
std::vector<SweepPoint> orientation_sweep(const SpinSystem &sys, double field_tesla,
                                          const Vec3 &axis, int steps,
                                          const Rotation &base = Rotation::identity());

/// Reads the spin-system JSON document:
///   {"gamma_a", "gamma_b", "offset_a_hz", "offset_b_hz", "j_tensor_hz",
///    "r_vec_angstrom" | "d_tensor_hz", "description"?}
/// gamma values default to 13C when omitted.
SpinSystem read_system(std::string_view json_text);

/// `frequency_hz,intensity` CSV, header included.
std::string spectrum_csv(const Spectrum &s);

} // namespace jcoup::spin
