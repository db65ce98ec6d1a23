#pragma once

#include <vector>

#include <Eigen/Dense>

#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"

namespace crowdcert {

inline Eigen::MatrixXd to_eigen(const TransitionMatrix& t) {
    const int c = t.num_classes();
    Eigen::MatrixXd m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = t(i, j);
    return m;
}

// Smallest singular value; for the symmetric matrices of the paper this equals
// the smallest eigenvalue magnitude lambda_min(T).
inline double smallest_singular_value(const TransitionMatrix& t) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(t));
    return svd.singularValues().minCoeff();
}

// Solves T^T x = b (the generative noisy-marginal system).
inline std::vector<double> solve_transposed(const TransitionMatrix& t,
                                            const std::vector<double>& b) {
    const int c = t.num_classes();
    if (static_cast<int>(b.size()) != c)
        throw Error(Errc::InvalidRange, "vector length does not match matrix size");
    Eigen::VectorXd rhs(c);
    for (int i = 0; i < c; ++i) rhs(i) = b[static_cast<std::size_t>(i)];
    Eigen::VectorXd x = to_eigen(t).transpose().fullPivLu().solve(rhs);
    return std::vector<double>(x.data(), x.data() + c);
}

} // namespace crowdcert
