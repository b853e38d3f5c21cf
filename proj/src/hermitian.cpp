#include "secbeam/hermitian.hpp"

#include <cmath>

namespace secbeam {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

RVec hvec(const CMat& X) {
    const int n = static_cast<int>(X.rows());
    RVec x(n * n);
    for (int a = 0; a < n; ++a) x(a) = X(a, a).real();
    int m = n;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            // average the two triangles so slightly non-Hermitian input is symmetrized
            const cd v = 0.5 * (X(a, b) + std::conj(X(b, a)));
            x(m++) = kSqrt2 * v.real();
            x(m++) = kSqrt2 * v.imag();
        }
    return x;
}

CMat hmat(const Eigen::Ref<const RVec>& x, int n) {
    CMat X(n, n);
    for (int a = 0; a < n; ++a) X(a, a) = x(a);
    int m = n;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const cd v(kInvSqrt2 * x(m), kInvSqrt2 * x(m + 1));
            m += 2;
            X(a, b) = v;
            X(b, a) = std::conj(v);
        }
    return X;
}

CMat hbasis(int j, int n) {
    RVec e = RVec::Zero(n * n);
    e(j) = 1.0;
    return hmat(e, n);
}

void add_congruence_block(const CMat& L, double scale, Eigen::Ref<RMat> out) {
    const int du = static_cast<int>(L.rows());
    const int dv = static_cast<int>(L.cols());
    // out(i, j) += scale * Tr(E_i L F_j L^H), E_i / F_j basis of size du / dv.
    auto emit = [&](int j, auto&& y) {
        // y(p, q) returns (L F_j L^H)(p, q) for p <= q
        for (int p = 0; p < du; ++p) out(p, j) += scale * y(p, p).real();
        int m = du;
        for (int p = 0; p < du; ++p)
            for (int q = p + 1; q < du; ++q) {
                const cd v = y(p, q);
                out(m++, j) += scale * kSqrt2 * v.real();
                out(m++, j) += scale * kSqrt2 * v.imag();
            }
    };
    for (int a = 0; a < dv; ++a) {
        const auto la = L.col(a);
        emit(a, [&](int p, int q) { return la(p) * std::conj(la(q)); });
    }
    int m = dv;
    for (int a = 0; a < dv; ++a)
        for (int b = a + 1; b < dv; ++b) {
            const auto la = L.col(a);
            const auto lb = L.col(b);
            emit(m++, [&](int p, int q) {
                return kInvSqrt2 * (la(p) * std::conj(lb(q)) + lb(p) * std::conj(la(q)));
            });
            emit(m++, [&](int p, int q) {
                return cd(0.0, kInvSqrt2) * (la(p) * std::conj(lb(q)) - lb(p) * std::conj(la(q)));
            });
        }
}

CMat herm(const CMat& A) { return 0.5 * (A + A.adjoint()); }

CMat sqrtm_pd(const CMat& A) {
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(A));
    RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat inv_sqrtm_pd(const CMat& A) {
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(A));
    if (es.eigenvalues()(0) <= 0.0) throw DomainError("inv_sqrtm_pd: matrix not positive definite");
    RVec d = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace secbeam
