#include "metrics.hpp"

namespace softshape {

double r_squared(const Matrix& observed, const Matrix& predicted) {
    if (observed.rows() != predicted.rows() || observed.cols() != predicted.cols())
        throw std::invalid_argument("r_squared: shape mismatch");
    if (observed.rows() < 2) throw std::invalid_argument("r_squared: need at least 2 rows");

    if (observed == predicted) return 1.0;

    const Eigen::RowVectorXd mean = observed.colwise().mean();
    const double ss_res = (observed - predicted).squaredNorm();
    const double ss_tot = (observed.rowwise() - mean).squaredNorm();
    if (ss_tot == 0.0) throw std::invalid_argument("r_squared: observed data has zero variance");
    return 1.0 - ss_res / ss_tot;
}

}  // namespace softshape
