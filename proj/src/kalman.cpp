#include "ctd/kalman.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ctd/errors.hpp"

namespace ctd {
namespace {

constexpr double kMaxCondition = 1e12;

Matrix8 transition() {
  Matrix8 f = Matrix8::Identity();
  for (int i = 0; i < 4; ++i) f(i, 4 + i) = 1.0;
  return f;
}

Eigen::Matrix<double, 4, 8> observation() {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

const Matrix8& F() {
  static const Matrix8 f = transition();
  return f;
}

const Eigen::Matrix<double, 4, 8>& H() {
  static const Eigen::Matrix<double, 4, 8> h = observation();
  return h;
}

Eigen::LLT<Matrix4> factor(const Matrix4& S) {
  if (!S.allFinite()) throw NumericError("innovation covariance has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix4> eig(S, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw NumericError("innovation covariance is singular or ill-conditioned");
  }
  Eigen::LLT<Matrix4> llt(S);
  if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization of S failed");
  return llt;
}

Matrix8 symmetrized(const Matrix8& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Matrix8 NoiseModel::process_noise(double h) const {
  Vector8 std;
  std << position_weight * h, position_weight * h, aspect_std, position_weight * h,
      velocity_weight * h, velocity_weight * h, aspect_velocity_std, velocity_weight * h;
  std *= process_scale;
  return std.array().square().matrix().asDiagonal();
}

Matrix4 NoiseModel::measurement_noise(double h) const {
  Vector4 std{position_weight * h, position_weight * h, aspect_std, position_weight * h};
  std *= measurement_scale;
  return std.array().square().matrix().asDiagonal();
}

BoxState initiate(const Measurement& m, const NoiseModel& noise) {
  if (!(m.h > 0.0) || !(m.a > 0.0)) throw std::domain_error("initiate: measurement needs h > 0 and a > 0");
  BoxState s;
  s.mean << m.cx, m.cy, m.a, m.h, 0.0, 0.0, 0.0, 0.0;
  const double pos = noise.init_position_scale * noise.position_weight * m.h;
  const double vel = noise.init_velocity_scale * noise.velocity_weight * m.h;
  Vector8 std;
  std << pos, pos, noise.aspect_std, pos, vel, vel, noise.aspect_velocity_std, vel;
  s.cov = std.array().square().matrix().asDiagonal();
  return s;
}

BoxState predict(const BoxState& s, const NoiseModel& noise) {
  BoxState out;
  out.mean = F() * s.mean;
  out.cov = symmetrized(F() * s.cov * F().transpose() + noise.process_noise(s.mean(3)));
  return out;
}

Projection project(const BoxState& s, const NoiseModel& noise) {
  Projection p;
  p.mean = H() * s.mean;
  Matrix4 S = H() * s.cov * H().transpose() + noise.measurement_noise(s.mean(3));
  p.cov = 0.5 * (S + S.transpose());
  factor(p.cov);
  return p;
}

BoxState update(const BoxState& s, const Measurement& m, const NoiseModel& noise) {
  const Projection proj = project(s, noise);
  const auto llt = factor(proj.cov);
  // K^T = S^-1 H P  (P symmetric)
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(H() * s.cov).transpose();
  const Vector4 innovation = m.vec() - proj.mean;

  BoxState out;
  out.mean = s.mean + gain * innovation;
  const Matrix8 ikh = Matrix8::Identity() - gain * H();
  const Matrix4 R = noise.measurement_noise(s.mean(3));
  out.cov = symmetrized(ikh * s.cov * ikh.transpose() + gain * R * gain.transpose());
  return out;
}

std::vector<double> mahalanobis_squared(const Projection& proj, std::span<const Measurement> ms) {
  const auto llt = factor(proj.cov);
  std::vector<double> out;
  out.reserve(ms.size());
  for (const auto& m : ms) {
    const Vector4 z = llt.matrixL().solve(m.vec() - proj.mean);
    out.push_back(z.squaredNorm());
  }
  return out;
}

std::vector<double> mahalanobis_squared(const BoxState& s, std::span<const Measurement> ms,
                                        const NoiseModel& noise) {
  return mahalanobis_squared(project(s, noise), ms);
}

}  // namespace ctd
