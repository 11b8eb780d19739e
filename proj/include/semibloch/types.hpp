#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace semibloch {

using cplx = std::complex<double>;

// Small fixed-capacity vectors and matrices (d <= 3, phase space <= 6).
// No heap traffic in the inner loops of the flows.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using IVec = Eigen::Matrix<int, Eigen::Dynamic, 1, 0, 3, 1>;
using PVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using PMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr cplx kI{0.0, 1.0};

inline Vec zero_vec(int d) { return Vec::Zero(d); }
inline Mat zero_mat(int d) { return Mat::Zero(d, d); }

}  // namespace semibloch
