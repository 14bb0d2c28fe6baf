#include "ads/objective.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace ads {

namespace {

// Multiplicity of each Voigt entry among the 81 tensor components.
Mat6 component_multiplicity() {
    Vec6 m;
    m << 1, 1, 1, 2, 2, 2;
    return m * m.transpose();
}

double weighted_dot(const Mat6& a, const Mat6& b) {
    return component_multiplicity().cwiseProduct(a).cwiseProduct(b).sum();
}

Mat6 lambda_basis() {
    Mat6 c = Mat6::Zero();
    c.topLeftCorner<3, 3>().setOnes();
    return c;
}

Mat6 mu_basis() {
    Vec6 d;
    d << 2, 2, 2, 1, 1, 1;
    return d.asDiagonal();
}

Vec6 stress_to_voigt(const Mat3& s) {
    Vec6 v;
    v << s(0, 0), s(1, 1), s(2, 2), s(1, 2), s(0, 2), s(0, 1);
    return v;
}

Mat6 symmetric(const Mat6& g) { return 0.5 * (g + g.transpose()); }

// Haar-average coefficients (a, b) in E[eps (x) eps] = a I(x)I + b (I(x)I)^sym-swap.
Vec2 rotation_average_coefficients(const Mat3& s) {
    const double t2 = s.trace() * s.trace();
    const double q = s.cwiseAbs2().sum();
    const double b = (3.0 * q - t2) / 30.0;
    return {(t2 - 6.0 * b) / 9.0, b};
}

Mat6 deviatoric_weights(const Mat3& s) {
    const Vec2 ab = rotation_average_coefficients(s);
    Vec6 shear;
    shear << 1, 1, 1, 2, 2, 2;
    return ab[0] * lambda_basis() + 2.0 * ab[1] * Mat6(shear.asDiagonal());
}

Vec6 young_compliance_stress(const ObjectiveSpec& spec, const Tensor4Voigt& c, double* young) {
    Eigen::FullPivLU<Mat6> lu(c.matrix());
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw Error(ErrorKind::SingularTensor, "directional Young's modulus needs an invertible C_A");
    const Vec3 z = spec.direction.normalized();
    const Vec6 sigma = stress_to_voigt(z * z.transpose());
    const Vec6 strain = lu.solve(sigma);
    const double compliance = sigma.dot(strain);
    if (!(compliance > 0.0))
        throw Error(ErrorKind::SingularTensor, "C_A is not positive definite along the load");
    *young = 1.0 / compliance;
    return strain;
}

struct Contraction {
    Mat2 block;
    Vec2 coupling;
    Vec2 eps;
};

Contraction solve_contraction(const Tensor4Voigt& c) {
    Contraction out;
    out.block << c(0, 0), c(0, 1), c(1, 0), c(1, 1);
    out.coupling << c(0, 2), c(1, 2);
    const Eigen::FullPivLU<Mat2> lu(out.block);
    if (!lu.isInvertible() || std::abs(out.block.determinant()) < 1e-14 * out.block.squaredNorm())
        throw Error(ErrorKind::SingularTensor, "in-plane block of C_A is singular");
    out.eps = lu.solve(out.coupling);
    return out;
}

double base_value(const ObjectiveSpec& spec, const Tensor4Voigt& c) {
    switch (spec.kind) {
        case ObjectiveKind::Bulk: return bulk_modulus(c);
        case ObjectiveKind::Component: {
            const auto& k = spec.component;
            return c.component(k[0], k[1], k[2], k[3]);
        }
        case ObjectiveKind::DirectionalYoung: {
            double y = 0.0;
            young_compliance_stress(spec, c, &y);
            return y;
        }
        case ObjectiveKind::StrainEnergy: return c.energy(spec.strain);
        case ObjectiveKind::DeviatoricAverage:
            return deviatoric_weights(spec.deviator).cwiseProduct(c.matrix()).sum();
        case ObjectiveKind::CustomLinear: return spec.weights.cwiseProduct(c.matrix()).sum();
        case ObjectiveKind::Poisson: return solve_contraction(c).eps.sum();
    }
    return 0.0;
}

Mat6 base_derivative(const ObjectiveSpec& spec, const Tensor4Voigt& c) {
    Mat6 g = Mat6::Zero();
    switch (spec.kind) {
        case ObjectiveKind::Bulk: g.topLeftCorner<3, 3>().setConstant(1.0 / 9.0); break;
        case ObjectiveKind::Component: {
            const auto& k = spec.component;
            g(voigt::slot(k[0], k[1]), voigt::slot(k[2], k[3])) = 1.0;
            break;
        }
        case ObjectiveKind::DirectionalYoung: {
            double y = 0.0;
            const Vec6 strain = young_compliance_stress(spec, c, &y);
            g = y * y * strain * strain.transpose();
            break;
        }
        case ObjectiveKind::StrainEnergy: {
            const Vec6 e = voigt::strain_to_voigt(spec.strain);
            g = e * e.transpose();
            break;
        }
        case ObjectiveKind::DeviatoricAverage: g = deviatoric_weights(spec.deviator); break;
        case ObjectiveKind::CustomLinear: g = spec.weights; break;
        case ObjectiveKind::Poisson: {
            const Contraction k = solve_contraction(c);
            const Vec2 w = k.block.transpose().fullPivLu().solve(Vec2::Ones());
            g(0, 2) = w[0];
            g(1, 2) = w[1];
            const Mat2 da = -w * k.eps.transpose();
            g.topLeftCorner<2, 2>() = da;
            break;
        }
    }
    return symmetric(g);
}

}  // namespace

ObjectiveKind parse_objective_kind(std::string_view name) {
    if (name == "bulk") return ObjectiveKind::Bulk;
    if (name == "component") return ObjectiveKind::Component;
    if (name == "directional_young" || name == "young") return ObjectiveKind::DirectionalYoung;
    if (name == "strain_energy") return ObjectiveKind::StrainEnergy;
    if (name == "deviatoric_average") return ObjectiveKind::DeviatoricAverage;
    if (name == "custom_linear") return ObjectiveKind::CustomLinear;
    if (name == "poisson" || name == "npr") return ObjectiveKind::Poisson;
    throw Error(ErrorKind::Config, "unknown objective kind '" + std::string(name) + "'");
}

const char* to_string(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::Bulk: return "bulk";
        case ObjectiveKind::Component: return "component";
        case ObjectiveKind::DirectionalYoung: return "directional_young";
        case ObjectiveKind::StrainEnergy: return "strain_energy";
        case ObjectiveKind::DeviatoricAverage: return "deviatoric_average";
        case ObjectiveKind::CustomLinear: return "custom_linear";
        case ObjectiveKind::Poisson: return "poisson";
    }
    return "bulk";
}

void ObjectiveSpec::validate() const {
    if (!std::isfinite(isotropy_penalty) || isotropy_penalty < 0.0)
        throw Error(ErrorKind::InvalidArgument, "isotropy penalty must be finite and >= 0");
    if (kind == ObjectiveKind::Component)
        for (int i : component)
            if (i < 0 || i > 2) throw Error(ErrorKind::InvalidArgument, "component indices must lie in 1..3");
    if (kind == ObjectiveKind::DirectionalYoung && !(direction.norm() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "Young's modulus direction is zero");
    if (!strain.isApprox(strain.transpose()) || !deviator.isApprox(deviator.transpose()))
        throw Error(ErrorKind::InvalidArgument, "strain tensors must be symmetric");
}

std::string ObjectiveSpec::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    if (kind == ObjectiveKind::Component)
        out << ' ' << component[0] + 1 << component[1] + 1 << component[2] + 1 << component[3] + 1;
    if (kind == ObjectiveKind::DirectionalYoung) {
        const Vec3 z = direction.normalized();
        out << " [" << z.x() << ' ' << z.y() << ' ' << z.z() << ']';
    }
    if (isotropy_penalty > 0.0) out << " + isotropy " << isotropy_penalty;
    return out.str();
}

Mat6 isotropic_tensor(double lambda, double mu) { return lambda * lambda_basis() + mu * mu_basis(); }

IsotropicFit isotropic_fit(const Tensor4Voigt& c) {
    const Mat6 bl = lambda_basis(), bm = mu_basis();
    Mat2 normal;
    normal << weighted_dot(bl, bl), weighted_dot(bl, bm), weighted_dot(bm, bl), weighted_dot(bm, bm);
    const Vec2 rhs(weighted_dot(c.matrix(), bl), weighted_dot(c.matrix(), bm));
    const Vec2 x = normal.ldlt().solve(rhs);
    const Mat6 r = c.matrix() - isotropic_tensor(x[0], x[1]);
    return {x[0], x[1], 0.5 * weighted_dot(r, r)};
}

Vec2 lateral_contractions(const Tensor4Voigt& c) { return solve_contraction(c).eps; }

double evaluate_objective(const ObjectiveSpec& spec, const Tensor4Voigt& c) {
    double f = base_value(spec, c);
    if (spec.isotropy_penalty > 0.0) {
        const double p = spec.isotropy_penalty * isotropic_fit(c).residual;
        f += spec.maximize() ? -p : p;
    }
    return f;
}

Mat6 objective_derivative(const ObjectiveSpec& spec, const Tensor4Voigt& c) {
    Mat6 g = base_derivative(spec, c);
    if (spec.isotropy_penalty > 0.0) {
        const IsotropicFit fit = isotropic_fit(c);
        const Mat6 r = c.matrix() - isotropic_tensor(fit.lambda, fit.mu);
        const Mat6 dp = spec.isotropy_penalty * component_multiplicity().cwiseProduct(symmetric(r));
        g += spec.maximize() ? Mat6(-dp) : dp;
    }
    return g;
}

}  // namespace ads
