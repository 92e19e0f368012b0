#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dismech {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Energy, gradient and Hessian of one stencil. dofs[i] is the global index of
// local entry i; sign[i] re-signs the local entry on scatter (edge flips).
template <int N>
struct LocalContribution {
  double energy = 0.0;
  Eigen::Matrix<double, N, 1> gradient = Eigen::Matrix<double, N, 1>::Zero();
  Eigen::Matrix<double, N, N> hessian = Eigen::Matrix<double, N, N>::Zero();
  std::array<int, N> dofs{};
  std::array<double, N> sign = [] {
    std::array<double, N> s{};
    s.fill(1.0);
    return s;
  }();
};

inline Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

inline Vec3 node_position(const VecX& q, int node) { return q.segment<3>(3 * node); }

class SingularConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dismech
