#include <random>

#include <gtest/gtest.h>

#include "ads/objective.hpp"

namespace ads {
namespace {

Tensor4Voigt random_spd(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat6 a;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = u(rng);
    return Tensor4Voigt(a * a.transpose() + 0.5 * Mat6::Identity());
}

std::vector<ObjectiveSpec> all_specs() {
    std::vector<ObjectiveSpec> specs;
    ObjectiveSpec s;
    specs.push_back(s);
    s.kind = ObjectiveKind::Component;
    s.component = {1, 2, 1, 2};
    specs.push_back(s);
    s.kind = ObjectiveKind::DirectionalYoung;
    s.direction = Vec3(0.3, -0.5, 0.8);
    specs.push_back(s);
    s.kind = ObjectiveKind::StrainEnergy;
    s.strain << 0.4, 0.1, -0.2, 0.1, -0.3, 0.05, -0.2, 0.05, 0.7;
    specs.push_back(s);
    s.kind = ObjectiveKind::DeviatoricAverage;
    specs.push_back(s);
    s.kind = ObjectiveKind::CustomLinear;
    s.weights = random_spd(11).matrix();
    specs.push_back(s);
    s.kind = ObjectiveKind::Poisson;
    specs.push_back(s);
    ObjectiveSpec penalized;
    penalized.isotropy_penalty = 0.7;
    specs.push_back(penalized);
    penalized.kind = ObjectiveKind::Poisson;
    specs.push_back(penalized);
    return specs;
}

// Haar average over rotations by a tensor-product rule in ZYZ Euler angles.
double rotation_average(const Tensor4Voigt& c, const Mat3& s) {
    const int na = 16, nb = 400;
    double sum = 0.0, weight = 0.0;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib)
            for (int ig = 0; ig < na; ++ig) {
                const double a = 2.0 * M_PI * ia / na, b = M_PI * (ib + 0.5) / nb, g = 2.0 * M_PI * ig / na;
                const Mat3 r = (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
                                Eigen::AngleAxisd(g, Vec3::UnitZ()))
                                   .toRotationMatrix();
                const double w = std::sin(b);
                sum += w * c.energy(r * s * r.transpose());
                weight += w;
            }
    return sum / weight;
}

TEST(Objective, BulkOnPlaneTensor) {
    Mat6 c = Mat6::Zero();
    c(0, 0) = c(1, 1) = 1.098901;
    c(0, 1) = c(1, 0) = 0.329670;
    c(5, 5) = 0.384615;
    EXPECT_NEAR(evaluate_objective({}, Tensor4Voigt(c)), 0.317460, 1e-6);
}

TEST(Objective, ComponentPicksEntry) {
    const Tensor4Voigt c = random_spd(3);
    ObjectiveSpec s;
    s.kind = ObjectiveKind::Component;
    s.component = {1, 2, 1, 2};
    EXPECT_DOUBLE_EQ(evaluate_objective(s, c), c(3, 3));
    s.component = {2, 2, 2, 2};
    EXPECT_DOUBLE_EQ(evaluate_objective(s, c), c(2, 2));
}

TEST(Objective, DerivativeMatchesFiniteDifferences) {
    const Tensor4Voigt c = random_spd(5);
    const Tensor4Voigt dir = random_spd(9);
    for (const ObjectiveSpec& s : all_specs()) {
        const Mat6 g = objective_derivative(s, c);
        EXPECT_TRUE(g.isApprox(g.transpose(), 1e-14)) << s.describe();
        const double h = 1e-6;
        const double fd = (evaluate_objective(s, Tensor4Voigt(c.matrix() + h * dir.matrix())) -
                           evaluate_objective(s, Tensor4Voigt(c.matrix() - h * dir.matrix()))) /
                          (2.0 * h);
        const double analytic = g.cwiseProduct(dir.matrix()).sum();
        EXPECT_NEAR(analytic, fd, 1e-7 * std::max(1.0, std::abs(fd))) << s.describe();
    }
}

TEST(Objective, DeviatoricAverageMatchesRotationQuadrature) {
    const Tensor4Voigt c = random_spd(21);
    ObjectiveSpec s;
    s.kind = ObjectiveKind::DeviatoricAverage;
    const double value = evaluate_objective(s, c);
    EXPECT_NEAR(value, rotation_average(c, s.deviator), 1e-4 * std::abs(value));
    const Mat6& m = c.matrix();
    const double closed = m(0, 0) + m(1, 1) + m(2, 2) + 3.0 * (m(3, 3) + m(4, 4) + m(5, 5)) -
                          (m(0, 1) + m(0, 2) + m(1, 2));
    EXPECT_NEAR(value, 0.8 * closed, 1e-12);
    EXPECT_DOUBLE_EQ(evaluate_objective(s, Tensor4Voigt()), 0.0);
}

TEST(Objective, DeviatoricAverageGeneralStrain) {
    const Tensor4Voigt c = random_spd(22);
    ObjectiveSpec s;
    s.kind = ObjectiveKind::DeviatoricAverage;
    s.deviator << 0.5, 0.2, 0.0, 0.2, -0.1, 0.3, 0.0, 0.3, 0.9;
    const double value = evaluate_objective(s, c);
    EXPECT_NEAR(value, rotation_average(c, s.deviator), 1e-4 * std::abs(value));
}

TEST(Objective, IsotropicTensorHasZeroPenalty) {
    const double lambda = 0.577, mu = 0.385;
    const Tensor4Voigt c(isotropic_tensor(lambda, mu));
    const IsotropicFit fit = isotropic_fit(c);
    EXPECT_NEAR(fit.lambda, lambda, 1e-12);
    EXPECT_NEAR(fit.mu, mu, 1e-12);
    EXPECT_NEAR(fit.residual, 0.0, 1e-24);
    ObjectiveSpec s;
    s.isotropy_penalty = 3.0;
    EXPECT_NEAR(evaluate_objective(s, c), bulk_modulus(c), 1e-14);
}

TEST(Objective, PenaltyIsPositiveForAnisotropicTensor) {
    const Tensor4Voigt c = random_spd(2);
    EXPECT_GT(isotropic_fit(c).residual, 0.0);
    ObjectiveSpec s;
    s.isotropy_penalty = 1.0;
    EXPECT_LT(evaluate_objective(s, c), bulk_modulus(c));
}

TEST(Objective, IsotropicYoungAndPoisson) {
    const double y = 2.0, nu = 0.25;
    const double lambda = y * nu / ((1 + nu) * (1 - 2 * nu)), mu = y / (2 * (1 + nu));
    const Tensor4Voigt c(isotropic_tensor(lambda, mu));
    ObjectiveSpec s;
    s.kind = ObjectiveKind::DirectionalYoung;
    s.direction = Vec3(1, 2, -2);
    EXPECT_NEAR(evaluate_objective(s, c), y, 1e-12);
    const Vec2 e = lateral_contractions(c);
    EXPECT_NEAR(e[0], lambda / (2 * (lambda + mu)), 1e-12);
    s.kind = ObjectiveKind::Poisson;
    EXPECT_NEAR(evaluate_objective(s, c), e.sum(), 1e-14);
    EXPECT_FALSE(s.maximize());
}

TEST(Objective, SingularTensorRejected) {
    Mat6 c = Mat6::Zero();
    c(0, 0) = c(1, 1) = 1.0;
    ObjectiveSpec s;
    s.kind = ObjectiveKind::DirectionalYoung;
    try {
        evaluate_objective(s, Tensor4Voigt(c));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularTensor);
    }
    s.kind = ObjectiveKind::Poisson;
    EXPECT_THROW(evaluate_objective(s, Tensor4Voigt(Mat6::Zero())), Error);
}

TEST(Objective, Validation) {
    ObjectiveSpec s;
    s.kind = ObjectiveKind::Component;
    s.component = {0, 3, 0, 0};
    EXPECT_THROW(s.validate(), Error);
    s = {};
    s.isotropy_penalty = -1.0;
    EXPECT_THROW(s.validate(), Error);
    EXPECT_EQ(parse_objective_kind("deviatoric_average"), ObjectiveKind::DeviatoricAverage);
    EXPECT_THROW(parse_objective_kind("nope"), Error);
}

}  // namespace
}  // namespace ads
