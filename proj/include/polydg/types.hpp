#ifndef POLYDG_TYPES_HPP
#define POLYDG_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace polydg {

using Real = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Up to 5 conserved variables (3D Euler/NS); 2D uses the leading 4.
constexpr int kMaxVar = 5;
using StateVec = Eigen::Matrix<Real, kMaxVar, 1>;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AdmissibilityError : std::runtime_error {
  explicit AdmissibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace polydg

#endif
