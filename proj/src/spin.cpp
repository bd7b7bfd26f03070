#include <jcoup/spin.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace jcoup::spin {

namespace {

using cd = std::complex<double>;
using C2 = Eigen::Matrix2cd;

constexpr double kTensorTolerance = 1e-9;

std::array<CMat, 6> make_operators() {
  const cd i(0.0, 1.0);
  C2 sx, sy, sz;
  sx << 0.0, 0.5, 0.5, 0.0;
  sy << 0.0, -0.5 * i, 0.5 * i, 0.0;
  sz << 0.5, 0.0, 0.0, -0.5;
  const C2 one = C2::Identity();
  const auto kron = [](const C2 &a, const C2 &b) {
    CMat out;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
      }
    }
    return out;
  };
  return {kron(sx, one), kron(sy, one), kron(sz, one),
          kron(one, sx), kron(one, sy), kron(one, sz)};
}

} // namespace

void validate(const SpinSystem &sys) {
  if (sys.j_tensor.frame() != sys.d_tensor.frame()) {
    throw std::invalid_argument(fmt::format("J frame '{}' differs from D frame '{}'",
                                            sys.j_tensor.frame(), sys.d_tensor.frame()));
  }
  const Mat3 &d = sys.d_tensor.values();
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > kTensorTolerance) {
    throw std::invalid_argument("dipolar tensor is not symmetric");
  }
  if (std::abs(d.trace()) > kTensorTolerance) {
    throw std::invalid_argument("dipolar tensor is not traceless");
  }
  if (!std::isfinite(sys.gamma_a) || !std::isfinite(sys.gamma_b) ||
      !std::isfinite(sys.offset_a) || !std::isfinite(sys.offset_b)) {
    throw std::invalid_argument("spin system has non-finite parameters");
  }
}

double dipolar_prefactor(double r_angstrom, double gamma_a, double gamma_b) {
  const double r = r_angstrom * constants::angstrom;
  return constants::mu0_over_4pi * gamma_a * gamma_b * constants::hbar /
         (2.0 * std::numbers::pi * r * r * r);
}

CouplingTensor dipolar_tensor(const Vec3 &r_angstrom, double gamma_a, double gamma_b) {
  const double r = r_angstrom.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("dipolar coupling needs a non-zero separation");
  }
  const Vec3 e = r_angstrom / r;
  const double b = dipolar_prefactor(r, gamma_a, gamma_b);
  Mat3 d = b * (Mat3::Identity() - 3.0 * e * e.transpose());
  // exact symmetry; the trace is zero up to rounding of e.e
  d = 0.5 * (d + d.transpose()).eval();
  return CouplingTensor(d, "lab");
}

const CMat &spin_operator(int spin, int axis) {
  static const std::array<CMat, 6> ops = make_operators();
  if (spin < 0 || spin > 1 || axis < 0 || axis > 2) {
    throw std::out_of_range("spin operator index out of range");
  }
  return ops[static_cast<std::size_t>(3 * spin + axis)];
}

CMat total_spin_along(const Vec3 &direction) {
  const double n = direction.norm();
  if (!(n > 0.0)) {
    throw std::invalid_argument("detection direction has zero length");
  }
  const Vec3 u = direction / n;
  CMat out = CMat::Zero();
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < 3; ++k) {
      out += u[k] * spin_operator(s, k);
    }
  }
  return out;
}

CMat build_hamiltonian(const SpinSystem &sys, double field_tesla,
                       const Rotation &orientation) {
  validate(sys);
  const double two_pi = 2.0 * std::numbers::pi;
  const double nu_a = sys.gamma_a * field_tesla / two_pi + sys.offset_a;
  const double nu_b = sys.gamma_b * field_tesla / two_pi + sys.offset_b;
  const Mat3 &r = orientation.matrix();
  const Mat3 k = r * (sys.j_tensor.values() + sys.d_tensor.values()) * r.transpose();

  CMat h = -(nu_a * spin_operator(0, 2) + nu_b * spin_operator(1, 2));
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      if (k(p, q) != 0.0) {
        h += k(p, q) * spin_operator(0, p) * spin_operator(1, q);
      }
    }
  }
  return h;
}

Eigensystem diagonalize(const CMat &h) {
  const Eigen::SelfAdjointEigenSolver<CMat> eig(h);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("Hamiltonian diagonalization failed");
  }
  return {eig.eigenvalues(), eig.eigenvectors()};
}

double line_tolerance(const RVec &energies) {
  return std::max(1e-9, 1e-12 * energies.cwiseAbs().maxCoeff());
}

Spectrum transition_spectrum(const CMat &h, const CMat &detect, double field_tesla) {
  const Eigensystem es = diagonalize(h);
  const double tol = line_tolerance(es.energies);
  const CMat moments = es.vectors.adjoint() * detect * es.vectors;

  std::vector<Line> raw;
  for (int i = 0; i < kDim; ++i) {
    for (int f = i + 1; f < kDim; ++f) {
      const double freq = std::abs(es.energies[f] - es.energies[i]);
      const double inten = std::norm(moments(f, i));
      if (freq < tol || inten < kIntensityFloor) {
        continue;
      }
      raw.push_back({freq, inten});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const Line &x, const Line &y) { return x.frequency < y.frequency; });

  Spectrum out;
  out.field = field_tesla;
  for (const Line &l : raw) {
    if (!out.lines.empty() && l.frequency - out.lines.back().frequency < tol) {
      Line &prev = out.lines.back();
      const double w = prev.intensity + l.intensity;
      prev.frequency = (prev.frequency * prev.intensity + l.frequency * l.intensity) / w;
      prev.intensity = w;
    } else {
      out.lines.push_back(l);
    }
  }
  return out;
}

Spectrum spectrum(const SpinSystem &sys, double field_tesla, const Rotation &orientation) {
  return transition_spectrum(build_hamiltonian(sys, field_tesla, orientation),
                             total_spin_along(Vec3::UnitX()), field_tesla);
}

std::vector<SweepPoint> orientation_sweep(const SpinSystem &sys, double field_tesla,
                                          const Vec3 &axis, int steps,
                                          const Rotation &base) {
  if (steps < 1) {
    throw std::invalid_argument("orientation sweep needs at least one step");
  }
  std::vector<SweepPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double deg = 360.0 * k / steps;
    const Rotation r = Rotation::about_axis(axis, deg * std::numbers::pi / 180.0);
    out.push_back({deg, spectrum(sys, field_tesla, r * base)});
  }
  return out;
}

namespace {

using json = nlohmann::json;

double number_field(const json &j, const char *key, std::optional<double> fallback) {
  if (!j.contains(key)) {
    if (fallback) {
      return *fallback;
    }
    throw std::invalid_argument(fmt::format("spin system: missing field '{}'", key));
  }
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(fmt::format("spin system: '{}' must be a number", key));
  }
  return j.at(key).get<double>();
}

Mat3 matrix_field(const json &j, const char *key) {
  const json &m = j.at(key);
  if (!m.is_array() || m.size() != 3) {
    throw std::invalid_argument(fmt::format("spin system: '{}' must have 3 rows", key));
  }
  Mat3 out;
  for (std::size_t r = 0; r < 3; ++r) {
    if (!m[r].is_array() || m[r].size() != 3) {
      throw std::invalid_argument(
          fmt::format("spin system: '{}[{}]' must have 3 columns", key, r));
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (!m[r][c].is_number()) {
        throw std::invalid_argument(
            fmt::format("spin system: '{}[{}][{}]' must be a number", key, r, c));
      }
      out(static_cast<int>(r), static_cast<int>(c)) = m[r][c].get<double>();
    }
  }
  return out;
}

} // namespace

SpinSystem read_system(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(fmt::format("spin system: invalid JSON: {}", e.what()));
  }
  if (!j.is_object()) {
    throw std::invalid_argument("spin system: expected a JSON object");
  }
  SpinSystem sys;
  sys.gamma_a = number_field(j, "gamma_a", constants::gamma_13c);
  sys.gamma_b = number_field(j, "gamma_b", constants::gamma_13c);
  sys.offset_a = number_field(j, "offset_a_hz", 0.0);
  sys.offset_b = number_field(j, "offset_b_hz", 0.0);
  if (!j.contains("j_tensor_hz")) {
    throw std::invalid_argument("spin system: missing field 'j_tensor_hz'");
  }
  sys.j_tensor = CouplingTensor(matrix_field(j, "j_tensor_hz"), "lab");
  const bool has_r = j.contains("r_vec_angstrom");
  const bool has_d = j.contains("d_tensor_hz");
  if (has_r == has_d) {
    throw std::invalid_argument(
        "spin system: give exactly one of 'r_vec_angstrom' or 'd_tensor_hz'");
  }
  if (has_r) {
    const json &r = j.at("r_vec_angstrom");
    if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() ||
        !r[2].is_number()) {
      throw std::invalid_argument("spin system: 'r_vec_angstrom' must be 3 numbers");
    }
    sys.d_tensor = dipolar_tensor(
        Vec3(r[0].get<double>(), r[1].get<double>(), r[2].get<double>()), sys.gamma_a,
        sys.gamma_b);
  } else {
    sys.d_tensor = CouplingTensor(matrix_field(j, "d_tensor_hz"), "lab");
  }
  if (j.contains("description")) {
    if (!j.at("description").is_string()) {
      throw std::invalid_argument("spin system: 'description' must be a string");
    }
    sys.description = j.at("description").get<std::string>();
  }
  validate(sys);
  return sys;
}

std::string spectrum_csv(const Spectrum &s) {
  std::string out = "frequency_hz,intensity\n";
  for (const Line &l : s.lines) {
    out += fmt::format("{:.9f},{:.12f}\n", l.frequency, l.intensity);
  }
  return out;
}

} // namespace jcoup::spin
