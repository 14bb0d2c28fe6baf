#include "ads/voigt.hpp"

#include <Eigen/Eigenvalues>

namespace ads {

double Tensor4Voigt::component(int i, int j, int k, int l) const {
    return c_(voigt::slot(i, j), voigt::slot(k, l));
}

Vec6 Tensor4Voigt::mandel_eigenvalues() const {
    const Mat6 m = voigt::mandel(c_);
    Eigen::SelfAdjointEigenSolver<Mat6> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double bulk_modulus(const Tensor4Voigt& c) { return c.matrix().topLeftCorner<3, 3>().sum() / 9.0; }

namespace {

double frobenius2(const Mat6& c) {
    Vec6 m;
    m << 1, 1, 1, 2, 2, 2;
    return (m * m.transpose()).cwiseProduct(c.cwiseAbs2()).sum();
}

}  // namespace

double tensor_rel_error(const Tensor4Voigt& a, const Tensor4Voigt& b) {
    const double na = frobenius2(a.matrix());
    if (!(na > 0.0)) throw Error(ErrorKind::InvalidArgument, "reference tensor is zero");
    return std::sqrt(frobenius2(a.matrix() - b.matrix()) / na);
}

}  // namespace ads
