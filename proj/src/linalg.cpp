#include "ivmnar/linalg.hpp"

#include <Eigen/Dense>

namespace ivmnar {

std::vector<double> least_squares(const Rows<double>& a, const std::vector<double>& b) {
    const Eigen::Index m = static_cast<Eigen::Index>(a.size());
    const Eigen::Index k = m ? static_cast<Eigen::Index>(a[0].size()) : 0;
    Eigen::MatrixXd A(m, k);
    Eigen::VectorXd B(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) A(i, j) = a[i][j];
        B(i) = b[i];
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(B);
    return {x.data(), x.data() + x.size()};
}

}  // namespace ivmnar
