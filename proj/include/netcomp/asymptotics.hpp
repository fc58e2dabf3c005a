#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "netcomp/components_directed.hpp"
#include "netcomp/degree.hpp"

namespace netcomp {

enum class AsymptoteFamily { in_out, weak_directed, two_layer, degenerate_directed };

enum class Criticality { subcritical_side, critical, supercritical_side };

inline const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::subcritical_side: return "subcritical-side";
        case Criticality::critical: return "critical";
        case Criticality::supercritical_side: return "supercritical-side";
    }
    return "?";
}

struct AsymptoteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct AsymptoteParams {
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

    AsymptoteFamily family = AsymptoteFamily::weak_directed;

    // in/out family: h_inf(n) = C1 e^{-C2 n} n^{-3/2}
    Scalar C1 = 0, C2 = 0;

    // weak / two-layer family: w_inf(n+1) = L0 (L1 n^{-3/2} + L2 n^{-5/2}) e^{-(E1 n + E0 + Em1/n)}
    Scalar r1 = 0, L0 = 0, L1 = 0, L2 = 0, E1 = 0, E0 = 0, Em1 = 0;
    Vec2 a = Vec2::Zero(), b = Vec2::Zero();
    Mat2 A = Mat2::Zero(), B = Mat2::Zero(), S = Mat2::Zero();
    Scalar C0_scalar = 0;
    Eigen::Matrix<Scalar, 1, 2> C1_row = Eigen::Matrix<Scalar, 1, 2>::Zero();
    Mat2 C2_mat = Mat2::Zero();
    Scalar S_condition = 0;              // 2-norm condition estimate of S
    Scalar critical_window = 0;          // |a r1 + b|
    bool linear_root = false;            // leading coefficient vanished
    bool both_roots_admissible = false;  // warning: paper assumes a unique root

    // degenerate family: w_inf(n) = L0 n^{-1/2} e^{-E0 - n E1}; primed moments kept
    Scalar expected_size = 0;  // C
    Scalar mu0p = 0, mu1p = 0, m01 = 0, m02 = 0, m11 = 0, m12 = 0;

    Scalar eval(Scalar n) const {
        using std::exp;
        using std::pow;
        switch (family) {
            case AsymptoteFamily::in_out:
                return C1 * exp(-C2 * n) * pow(n, Scalar(-1.5));
            case AsymptoteFamily::weak_directed:
            case AsymptoteFamily::two_layer: {
                const Scalar m = n - Scalar(1);
                return L0 * (L1 * pow(m, Scalar(-1.5)) + L2 * pow(m, Scalar(-2.5))) *
                       exp(-(E1 * m + E0 + Em1 / m));
            }
            case AsymptoteFamily::degenerate_directed:
                return L0 * pow(n, Scalar(-0.5)) * exp(-E0 - n * E1);
        }
        return Scalar(0);
    }
};

// --- in/out asymptote (power-form constants) --------------------------------

template <typename Scalar>
AsymptoteParams<Scalar> in_out_asymptote(const MomentSet<Scalar>& m, ComponentKind side) {
    using std::sqrt;
    const Scalar mu = m.mu(1, 0);
    Scalar second, third;
    if (side == ComponentKind::in_component) {
        second = m.mu(2, 0);
        third = m.mu(3, 0);
    } else if (side == ComponentKind::out_component) {
        second = m.mu(0, 2);
        third = m.mu(0, 3);
    } else {
        throw std::invalid_argument("in_out_asymptote: side must be in or out");
    }
    const Scalar denom = mu * third - second * second;
    if (!(denom > Scalar(0))) throw AsymptoteError("asymptote undefined: nonpositive variance combination");
    AsymptoteParams<Scalar> p;
    p.family = AsymptoteFamily::in_out;
    p.C1 = mu * mu / sqrt(Scalar(2) * Scalar(M_PI) * denom);
    p.C2 = (second - Scalar(2) * mu) * (second - Scalar(2) * mu) / (Scalar(2) * denom);
    return p;
}

// --- weak / two-layer asymptote ---------------------------------------------

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> adjugate(const Eigen::Matrix<Scalar, 2, 2>& M) {
    Eigen::Matrix<Scalar, 2, 2> out;
    out << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
    return out;
}

}  // namespace detail

// Constants of the diagonal-sum asymptote. The change-of-variables data (a, b,
// A, B and the C coefficients) differ between the directed and two-layer
// families; everything downstream of them is shared.
template <typename Scalar>
AsymptoteParams<Scalar> weak_asymptote(const MomentSet<Scalar>& m, AsymptoteFamily family,
                                       Scalar root_tolerance = Scalar(1e-14)) {
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
    using RowVec2 = Eigen::Matrix<Scalar, 1, 2>;
    using std::abs;
    using std::sqrt;

    if (family != AsymptoteFamily::weak_directed && family != AsymptoteFamily::two_layer)
        throw std::invalid_argument("weak_asymptote: family must be weak_directed or two_layer");

    const Vec2 mu0 = m.mu0, mu1 = m.mu1, mu2 = m.mu2;
    const Mat2 S1 = m.Sigma1, S2 = m.Sigma2;
    Mat2 D;
    D << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);

    AsymptoteParams<Scalar> p;
    p.family = family;
    Vec2 a, b;
    Mat2 A, B;
    if (family == AsymptoteFamily::weak_directed) {
        // degenerate excess distribution makes Sigma_1 singular with the root pinned
        // at z = 1; the separate branch applies there.
        if (abs(m.mu(1, 0) * m.mu(3, 0) - m.mu(2, 0) * m.mu(2, 0)) < Scalar(1e-12) ||
            abs(m.mu(1, 0) * m.mu(0, 3) - m.mu(0, 2) * m.mu(0, 2)) < Scalar(1e-12))
            throw AsymptoteError(
                "degenerate excess distribution detected: use the degenerate directed asymptote");
        a = (mu1 - mu2) / Scalar(2);
        b = Vec2::Ones() - (mu1 + mu2) / Scalar(2);
        A = (S2 - S1) / Scalar(2);
        B = (S1 + S2) / Scalar(2);
    } else {
        Vec2 I1, I2;
        I1 << Scalar(1), Scalar(0);
        I2 << Scalar(0), Scalar(1);
        a = (I1 - I2) - (mu1 - mu2) / Scalar(2);
        b = Vec2::Ones() - (mu1 + mu2) / Scalar(2);
        A = (S1 - S2) / Scalar(2);
        B = (S1 + S2) / Scalar(2);
    }
    p.a = a;
    p.b = b;
    p.A = A;
    p.B = B;

    // root equation: (aT adjA a) z^2 + (aT adjB a + aT adjA b) z + aT adjB b = 0
    const Mat2 adjA = detail::adjugate(A), adjB = detail::adjugate(B);
    const Scalar qa = a.dot(adjA * a);
    const Scalar qb = a.dot(adjB * a) + a.dot(adjA * b);
    const Scalar qc = a.dot(adjB * b);
    Scalar roots[2];
    int n_roots = 0;
    const Scalar scale = abs(qa) + abs(qb) + abs(qc);
    if (abs(qa) <= root_tolerance * scale) {
        if (qb == Scalar(0)) throw AsymptoteError("no admissible root: degenerate root equation");
        roots[n_roots++] = -qc / qb;
        p.linear_root = true;
    } else {
        const Scalar disc = qb * qb - Scalar(4) * qa * qc;
        if (disc < Scalar(0)) throw AsymptoteError("no admissible root: complex roots");
        const Scalar sq = sqrt(disc);
        roots[n_roots++] = (-qb - sq) / (Scalar(2) * qa);
        roots[n_roots++] = (-qb + sq) / (Scalar(2) * qa);
    }
    int admissible[2];
    int n_adm = 0;
    for (int i = 0; i < n_roots; ++i)
        if (abs(roots[i]) <= Scalar(1) + Scalar(1e-12)) admissible[n_adm++] = i;
    if (n_adm == 0) throw AsymptoteError("no admissible root in [-1, 1]");

    auto cond2 = [&](Scalar z) {
        const Mat2 M = A * z + B;
        Eigen::JacobiSVD<Eigen::Matrix<double, 2, 2>> svd(M.template cast<double>());
        const double smin = svd.singularValues()(1);
        return smin > 0 ? Scalar(svd.singularValues()(0) / smin) : Scalar(std::numeric_limits<double>::infinity());
    };
    Scalar r1 = roots[admissible[0]];
    if (n_adm == 2) {
        p.both_roots_admissible = true;
        if (cond2(roots[admissible[1]]) < cond2(roots[admissible[0]])) r1 = roots[admissible[1]];
    }
    p.r1 = r1;

    const Mat2 S = A * r1 + B;
    p.S = S;
    const Scalar detS = S.determinant();
    if (!(abs(detS) > Scalar(0))) throw AsymptoteError("singular S = A r1 + B");
    p.S_condition = cond2(r1);
    p.critical_window = (a * r1 + b).norm();

    const Mat2 Sinv = S.inverse();
    const Scalar alpha = a.dot(Sinv * a);
    const Scalar beta = a.dot(Sinv * b);
    const Scalar delta = b.dot(Sinv * b);
    // the Gaussian center carries -mu0/n
    const Vec2 m0 = -mu0;
    const Scalar gamma = a.dot(Sinv * m0);
    const Scalar eta = b.dot(Sinv * m0);
    const Scalar kappa = mu0.dot(Sinv * mu0);
    if (!(alpha > Scalar(0))) throw AsymptoteError("invalid asymptote: a^T S^-1 a not positive");

    using std::pow;
    p.E1 = (alpha * delta - beta * beta) / (Scalar(2) * alpha);
    p.E0 = (alpha * eta - beta * gamma) / alpha;
    p.Em1 = (alpha * kappa - gamma * gamma) / (Scalar(2) * alpha);
    p.L0 = pow(Scalar(2), Scalar(-1.5)) / sqrt(Scalar(M_PI) * detS * alpha);

    RowVec2 C1row;
    Scalar C0;
    Mat2 C2m;
    if (family == AsymptoteFamily::weak_directed) {
        Vec2 I;
        I << Scalar(1), Scalar(-1);
        C0 = I.dot(mu1 - mu2) + mu1.dot(D * mu2);
        C1row = (I.transpose() * (S1 - S2) + (mu1.transpose() * D * S2) - (mu2.transpose() * D * S1)) * Sinv;
        C2m = -Sinv * S2 * D * S1 * Sinv;
    } else {
        C0 = Scalar(4) - Scalar(2) * (mu1(0) + mu2(1)) - mu1.dot(D * mu2);
        RowVec2 rows = S1.row(0) + S2.row(1);
        C1row = ((mu2.transpose() * D * S1) - (mu1.transpose() * D * S2) - Scalar(2) * rows) * Sinv;
        C2m = -Sinv * S1 * D * S2 * Sinv;
    }
    p.C0_scalar = C0;
    p.C1_row = C1row;
    p.C2_mat = C2m;

    const Vec2 e = a * r1 + b;
    p.L1 = (C1row * m0)(0) + e.dot((C2m + C2m.transpose()) * m0);
    p.L2 = mu0.dot(C2m * mu0);
    return p;
}

// --- degenerate directed branch ----------------------------------------------

// Probability that the component of a root node (in-degree 0) has size n:
// w0(n) = 1/(n-1) [k u0(k) * u1^{*(n-1)}](n-1), n > 1; w0(1) = u0(0).
inline Eigen::ArrayXd degenerate_root_distribution(const DegreeDistribution<double>& u, Eigen::Index n_max) {
    const auto& m = u.mass;
    if (m.dims() != 2) throw DegreeError("degenerate branch needs a bivariate distribution");
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        if (m.flat()[off] == 0.0) continue;
        m.unravel(off, idx);
        if (idx[0] > 1) throw DegreeError("degenerate branch requires u(k,l) = 0 for k > 1");
    }
    const Eigen::Index L = m.shape()[1];
    double p0 = 0, p1 = 0;
    for (Eigen::Index l = 0; l < L; ++l) {
        p0 += m.at2(0, l);
        if (m.shape()[0] > 1) p1 += m.at2(1, l);
    }
    if (!(p0 > 0)) throw DegreeError("degenerate branch: no root nodes (u(0,.) has zero mass)");
    Eigen::ArrayXd u0(L), u1(L);
    for (Eigen::Index l = 0; l < L; ++l) {
        u0[l] = m.at2(0, l) / p0;
        u1[l] = (m.shape()[0] > 1 && p1 > 0) ? m.at2(1, l) / p1 : 0.0;
    }
    Eigen::ArrayXd w0 = Eigen::ArrayXd::Zero(n_max + 1);
    w0[1] = u0[0];
    const Eigen::Index T = n_max + 1;
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(T);  // k u0(k)
    for (Eigen::Index k = 0; k < std::min(L, T); ++k) g[k] = double(k) * u0[k];
    Eigen::ArrayXd p = g, next(T);
    for (Eigen::Index n = 2; n <= n_max; ++n) {
        next.setZero();
        for (Eigen::Index k = 0; k < std::min(L, T); ++k) {
            const double v = u1[k];
            if (v == 0.0) continue;
            for (Eigen::Index s = 0; s + k < T; ++s) next[s + k] += p[s] * v;
        }
        p.swap(next);  // g * u1^{*(n-1)}
        w0[n] = p[n - 1] / double(n - 1);
    }
    return w0;
}

template <typename Scalar>
AsymptoteParams<Scalar> degenerate_asymptote_from_moments(Scalar mu0p, Scalar mu1p, Scalar m01, Scalar m02,
                                                          Scalar m11, Scalar m12) {
    using std::sqrt;
    if (!(m11 < Scalar(1))) throw AsymptoteError("supercritical root process: mu'_11 >= 1");
    const Scalar var = m12 - m11 * m11;
    if (!(var > Scalar(0))) throw AsymptoteError("degenerate asymptote undefined: mu'_12 - mu'_11^2 <= 0");
    AsymptoteParams<Scalar> p;
    p.family = AsymptoteFamily::degenerate_directed;
    p.mu0p = mu0p;
    p.mu1p = mu1p;
    p.m01 = m01;
    p.m02 = m02;
    p.m11 = m11;
    p.m12 = m12;
    p.L0 = m01 * (m11 - Scalar(1)) / ((m11 - m01 - Scalar(1)) * sqrt(Scalar(2) * Scalar(M_PI) * var));
    p.E0 = (m11 - Scalar(1)) * (m01 + m02 - m01 * m11) / (m01 * var);
    p.E1 = (m11 - Scalar(1)) * (m11 - Scalar(1)) / (Scalar(2) * var);
    p.expected_size = Scalar(1) + m01 / (Scalar(1) - m11);
    return p;
}

inline AsymptoteParams<double> degenerate_asymptote(const DegreeDistribution<double>& u) {
    const auto& m = u.mass;
    if (m.dims() != 2) throw DegreeError("degenerate branch needs a bivariate distribution");
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        if (m.flat()[off] == 0.0) continue;
        m.unravel(off, idx);
        if (idx[0] > 1) throw DegreeError("degenerate branch requires u(k,l) = 0 for k > 1");
    }
    const Eigen::Index L = m.shape()[1];
    double p0 = 0, p1 = 0, s01 = 0, s02 = 0, s11 = 0, s12 = 0;
    for (Eigen::Index l = 0; l < L; ++l) {
        const double a0 = m.at2(0, l);
        const double a1 = m.shape()[0] > 1 ? m.at2(1, l) : 0.0;
        p0 += a0;
        p1 += a1;
        s01 += double(l) * a0;
        s02 += double(l) * double(l) * a0;
        s11 += double(l) * a1;
        s12 += double(l) * double(l) * a1;
    }
    if (p1 > 0 && !(s11 / p1 < 1.0)) throw AsymptoteError("supercritical root process: mu'_11 >= 1");
    if (!(p0 > 0) || !(p1 > 0)) throw DegreeError("degenerate asymptote: a row of u has zero mass");
    return degenerate_asymptote_from_moments<double>(p0, p1, s01 / p0, s02 / p0, s11 / p1, s12 / p1);
}

// Exact degenerate-branch size distribution: w(n) = n w0(n) / C.
inline SizeDistribution degenerate_weak_components(const DegreeDistribution<double>& u, Eigen::Index n_max) {
    auto params = degenerate_asymptote(u);
    auto w0 = degenerate_root_distribution(u, n_max);
    SizeDistribution s;
    s.kind = ComponentKind::weak;
    s.n_max = n_max;
    s.w = Eigen::ArrayXd::Zero(n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(n_max + 1, -std::numeric_limits<double>::infinity());
    for (Eigen::Index n = 1; n <= n_max; ++n) {
        s.w[n] = double(n) * w0[n] / params.expected_size;
        if (s.w[n] > 0) s.log_w[n] = std::log(s.w[n]);
    }
    detail::finalize_size_distribution(s);
    return s;
}

// --- criticality criteria ------------------------------------------------------

template <typename Scalar>
struct CriticalityReport {
    Scalar value = 0;
    Criticality classification = Criticality::critical;
    bool sign_decides_giant = true;  // false for two layers (see the G(u) caveat)
};

template <typename Scalar>
CriticalityReport<Scalar> criticality(const MomentSet<Scalar>& m, AsymptoteFamily kind,
                                      Scalar tolerance = Scalar(1e-8)) {
    using std::abs;
    Scalar v;
    CriticalityReport<Scalar> rep;
    if (kind == AsymptoteFamily::weak_directed) {
        const Scalar mu = m.mu(1, 0);
        v = Scalar(2) * mu * m.mu(1, 1) - mu * m.mu(0, 2) - mu * m.mu(2, 0) + m.mu(0, 2) * m.mu(2, 0) -
            m.mu(1, 1) * m.mu(1, 1);
        rep.sign_decides_giant = true;
    } else if (kind == AsymptoteFamily::two_layer) {
        v = m.mu(1, 1) * m.mu(1, 1) -
            (m.mu(2, 0) - Scalar(2) * m.mu(1, 0)) * (m.mu(0, 2) - Scalar(2) * m.mu(0, 1));
        rep.sign_decides_giant = false;  // sign alone does not decide the two-layer giant
    } else {
        throw std::invalid_argument("criticality: kind must be weak_directed or two_layer");
    }
    rep.value = v;
    rep.classification = abs(v) < tolerance
                             ? Criticality::critical
                             : (v > Scalar(0) ? Criticality::supercritical_side : Criticality::subcritical_side);
    return rep;
}

template <typename Scalar>
Scalar gateaux_derivative_G(const MomentSet<Scalar>& m) {
    return (Scalar(2) * m.mu(0, 1) - m.mu(0, 2)) * (Scalar(2) * m.mu(1, 0) - Scalar(1)) +
           Scalar(2) * m.mu(0, 1) * m.mu(1, 1);
}

}  // namespace netcomp
