#include <jcoup/tensor.hpp>

#include <cmath>
#include <stdexcept>

namespace jcoup {

namespace {
constexpr double kRotationTolerance = 1e-12;
}

CouplingTensor::CouplingTensor() : m_values(Mat3::Zero()), m_frame("lab") {}

CouplingTensor::CouplingTensor(const Mat3 &values, std::string frame)
    : m_values(values), m_frame(std::move(frame)) {
  if (!m_values.allFinite()) {
    throw std::invalid_argument("coupling tensor has non-finite entries");
  }
  if (m_frame.empty()) {
    throw std::invalid_argument("coupling tensor frame label is empty");
  }
}

CouplingTensor CouplingTensor::zero(std::string frame) {
  return CouplingTensor(Mat3::Zero(), std::move(frame));
}

CouplingTensor CouplingTensor::diagonal(double xx, double yy, double zz,
                                        std::string frame) {
  return CouplingTensor(Vec3(xx, yy, zz).asDiagonal().toDenseMatrix(),
                        std::move(frame));
}

Rotation::Rotation(const Mat3 &m) : m_matrix(m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("rotation has non-finite entries");
  }
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance) {
    throw std::invalid_argument("rotation matrix is not orthogonal");
  }
  if (std::abs(m.determinant() - 1.0) > kRotationTolerance) {
    throw std::invalid_argument("rotation matrix is not proper (det != +1)");
  }
}

Rotation Rotation::about_axis(const Vec3 &axis, double radians) {
  const double n = axis.norm();
  if (!(n > 0.0)) {
    throw std::invalid_argument("rotation axis has zero length");
  }
  return Rotation(Eigen::AngleAxisd(radians, axis / n).toRotationMatrix());
}

Rotation Rotation::from_euler_zyz(double alpha, double beta, double gamma) {
  const Mat3 m = (Eigen::AngleAxisd(alpha, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(beta, Vec3::UnitY()) *
                  Eigen::AngleAxisd(gamma, Vec3::UnitZ()))
                     .toRotationMatrix();
  return Rotation(m);
}

void check_frames(const MechanismSet &m) {
  const std::string &f = m.dso.frame();
  for (const CouplingTensor *t : {&m.pso, &m.fc, &m.sd, &m.sdfc}) {
    if (t->frame() != f) {
      throw std::invalid_argument("mechanism frames differ: '" + f + "' vs '" +
                                  t->frame() + "'");
    }
  }
  if (m.total && m.total->frame() != f) {
    throw std::invalid_argument("total frame '" + m.total->frame() +
                                "' differs from mechanism frame '" + f + "'");
  }
}

AssembledTotal assemble_total(const MechanismSet &m) {
  check_frames(m);
  const Mat3 sum = m.dso.values() + m.pso.values() + m.fc.values() +
                   m.sd.values() + m.sdfc.values();
  AssembledTotal out{CouplingTensor(sum, m.dso.frame()), std::nullopt};
  if (m.total) {
    out.max_discrepancy = (m.total->values() - sum).cwiseAbs().maxCoeff();
  }
  return out;
}

double isotropic(const CouplingTensor &j) { return j.values().trace() / 3.0; }

double axial_anisotropy(const CouplingTensor &j) {
  const Mat3 &v = j.values();
  return v(2, 2) - 0.5 * (v(0, 0) + v(1, 1));
}

Mat3 antisymmetric_matrix(const Vec3 &a) {
  Mat3 m;
  // clang-format off
  m <<  0.0,   a.z(), -a.y(),
       -a.z(), 0.0,    a.x(),
        a.y(), -a.x(), 0.0;
  // clang-format on
  return m;
}

TensorSummary decompose(const CouplingTensor &j) {
  const Mat3 &v = j.values();
  TensorSummary s;
  s.j_iso = isotropic(j);
  s.delta_j = axial_anisotropy(j);
  const Mat3 sym = 0.5 * (v + v.transpose());
  s.sym_traceless = sym - s.j_iso * Mat3::Identity();
  s.antisym = Vec3(0.5 * (v(1, 2) - v(2, 1)), 0.5 * (v(2, 0) - v(0, 2)),
                   0.5 * (v(0, 1) - v(1, 0)));
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(sym, Eigen::EigenvaluesOnly);
  s.span = eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff();
  return s;
}

Mat3 reconstruct(const TensorSummary &s) {
  return s.j_iso * Mat3::Identity() + s.sym_traceless +
         antisymmetric_matrix(s.antisym);
}

CouplingTensor rotate(const CouplingTensor &j, const Rotation &r,
                      std::string new_frame) {
  const Mat3 &rm = r.matrix();
  return CouplingTensor(rm * j.values() * rm.transpose(), std::move(new_frame));
}

Rotation bond_frame_rotation(const Vec3 &u) {
  const double n = u.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("bond direction has zero length");
  }
  const Vec3 e = u / n;
  const Vec3 z = Vec3::UnitZ();
  const double c = e.dot(z);
  if (c < -1.0 + 1e-15) {
    return Rotation(Vec3(1.0, -1.0, -1.0).asDiagonal().toDenseMatrix());
  }
  // Rodrigues form of the shortest-arc rotation e -> z, written without
  // trigonometric round trips: R = I + [v]x + [v]x^2 / (1 + c), v = e x z.
  const Vec3 v = e.cross(z);
  Mat3 vx;
  // clang-format off
  vx <<  0.0,   -v.z(),  v.y(),
         v.z(),  0.0,   -v.x(),
        -v.y(),  v.x(),  0.0;
  // clang-format on
  Mat3 r = Mat3::Identity() + vx + vx * vx / (1.0 + c);
  // One polar cleanup step keeps R^T R within the Rotation tolerance when e
  // came from noisy coordinates.
  r = 0.5 * (r + r.transpose().inverse());
  return Rotation(r);
}

} // namespace jcoup
