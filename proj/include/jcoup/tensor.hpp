#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace jcoup {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// A 3x3 coupling tensor in Hz, tagged with the frame its axes refer to.
/// Rows and columns are ordered X, Y, Z. Entries are stored as given; no
/// symmetrization is ever applied.
class CouplingTensor {
public:
  CouplingTensor();
  CouplingTensor(const Mat3 &values, std::string frame);

  static CouplingTensor zero(std::string frame = "lab");
  static CouplingTensor diagonal(double xx, double yy, double zz,
                                 std::string frame = "lab");

  const Mat3 &values() const { return m_values; }
  const std::string &frame() const { return m_frame; }
  double operator()(int k, int l) const { return m_values(k, l); }

private:
  Mat3 m_values;
  std::string m_frame;
};

/// Proper rotation matrix (orthogonal, det = +1). Active convention: a vector
/// v is carried to R v, and a tensor J to R J R^T.
class Rotation {
public:
  Rotation() : m_matrix(Mat3::Identity()) {}
  explicit Rotation(const Mat3 &m);

  static Rotation identity() { return Rotation(); }
  /// Right-handed rotation by `radians` about `axis` (counterclockwise when
  /// viewed from the tip of the axis toward the origin).
  static Rotation about_axis(const Vec3 &axis, double radians);
  /// Intrinsic z-y-z Euler angles: R = Rz(alpha) Ry(beta) Rz(gamma).
  static Rotation from_euler_zyz(double alpha, double beta, double gamma);

  const Mat3 &matrix() const { return m_matrix; }
  Vec3 apply(const Vec3 &v) const { return m_matrix * v; }
  Rotation inverse() const { return Rotation(m_matrix.transpose()); }
  Rotation operator*(const Rotation &rhs) const {
    return Rotation(m_matrix * rhs.m_matrix);
  }

private:
  Mat3 m_matrix;
};

/// The five mechanism contributions to one pair's coupling tensor, plus the
/// producer's own total when it printed one.
struct MechanismSet {
  CouplingTensor dso;  // diamagnetic spin-orbit
  CouplingTensor pso;  // paramagnetic spin-orbit
  CouplingTensor fc;   // Fermi contact
  CouplingTensor sd;   // spin-dipolar
  CouplingTensor sdfc; // spin-dipolar / Fermi-contact cross term
  std::optional<CouplingTensor> total;
};

/// Element-wise tolerance for the declared total against the mechanism sum.
/// Printed matrices carry four decimals; five half-ulp roundings stay below
/// this bound.
inline constexpr double kMechanismSumTolerance = 5e-4;

struct AssembledTotal {
  CouplingTensor total;
  /// max |declared - sum| over the nine elements, when a total was declared.
  std::optional<double> max_discrepancy;
};

struct TensorSummary {
  double j_iso{0.0};
  double delta_j{0.0};
  Vec3 antisym{Vec3::Zero()};
  Mat3 sym_traceless{Mat3::Zero()};
  double span{0.0};
};

/// Throws std::invalid_argument when the members do not share a frame.
void check_frames(const MechanismSet &m);

AssembledTotal assemble_total(const MechanismSet &m);

double isotropic(const CouplingTensor &j);

/// J_ZZ - (J_XX + J_YY)/2 in whatever frame `j` is expressed.
double axial_anisotropy(const CouplingTensor &j);

TensorSummary decompose(const CouplingTensor &j);

/// Inverse of decompose: j_iso I + sym_traceless + [antisym]_x.
Mat3 reconstruct(const TensorSummary &s);

/// Skew matrix A with (A_YZ - A_ZY)/2 = a_X etc.; A_YZ = a_X, A_ZY = -a_X.
Mat3 antisymmetric_matrix(const Vec3 &a);

CouplingTensor rotate(const CouplingTensor &j, const Rotation &r,
                      std::string new_frame);

/// Rotation carrying the direction `u` onto +Z by the shortest arc. For u
/// along +X this is -90 degrees about Y. An antiparallel u (along -Z) maps
/// via 180 degrees about X. Throws std::invalid_argument for a zero vector.
Rotation bond_frame_rotation(const Vec3 &u);

} // namespace jcoup
