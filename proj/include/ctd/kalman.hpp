#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace ctd {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Box measurement in filter coordinates: center, aspect ratio (w/h), height.
struct Measurement {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;
  double h = 1.0;

  Vector4 vec() const { return {cx, cy, a, h}; }
  bool operator==(const Measurement&) const = default;
};

/// Kalman state of one box: (cx, cy, a, h) followed by per-frame velocities.
struct BoxState {
  Vector8 mean = Vector8::Zero();
  Matrix8 cov = Matrix8::Identity();
};

/// Measurement-space view of a state: predicted measurement and innovation
/// covariance S.
struct Projection {
  Vector4 mean = Vector4::Zero();
  Matrix4 cov = Matrix4::Identity();
};

/// Height-proportional noise schedule. Standard deviations for the position
/// components (cx, cy, h) are `position_weight * h`, for their velocities
/// `velocity_weight * h`; the aspect ratio uses fixed standard deviations.
struct NoiseModel {
  double position_weight = 1.0 / 20.0;
  double velocity_weight = 1.0 / 160.0;
  double aspect_std = 1e-2;
  double aspect_velocity_std = 1e-5;
  // initiate() inflates the initial uncertainty by these factors.
  double init_position_scale = 2.0;
  double init_velocity_scale = 10.0;
  // Multipliers on the process (Q) and measurement (R) standard deviations.
  // A filter observing a noiseless sensor uses a tiny measurement_scale.
  double process_scale = 1.0;
  double measurement_scale = 1.0;

  Matrix8 process_noise(double h) const;
  Matrix4 measurement_noise(double h) const;
};

/// Zero-velocity state centered on `m`. Throws std::domain_error unless h > 0
/// and a > 0.
BoxState initiate(const Measurement& m, const NoiseModel& noise = {});

/// One constant-velocity step: positions advance by one frame of velocity.
BoxState predict(const BoxState& s, const NoiseModel& noise = {});

/// y_hat = H mean, S = H cov H^T + R. Throws NumericError if S is not
/// positive definite or its condition number exceeds 1e12.
Projection project(const BoxState& s, const NoiseModel& noise = {});

/// Kalman correction with gain K = cov H^T S^-1 (Joseph-form covariance).
BoxState update(const BoxState& s, const Measurement& m, const NoiseModel& noise = {});

/// Squared Mahalanobis distance of each measurement to `proj`, using a
/// Cholesky solve against S.
std::vector<double> mahalanobis_squared(const Projection& proj, std::span<const Measurement> ms);

std::vector<double> mahalanobis_squared(const BoxState& s, std::span<const Measurement> ms,
                                        const NoiseModel& noise = {});

}  // namespace ctd
