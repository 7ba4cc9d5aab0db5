#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace pdiff {

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending. Only the upper triangle is read.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& matrix, int max_sweeps = 64) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using std::sqrt;

    const Eigen::Index n = matrix.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        matrix.template selfadjointView<Eigen::Upper>();

    const Scalar eps = Eigen::NumTraits<Scalar>::epsilon();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Scalar off = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        const Scalar diag = a.diagonal().squaredNorm();
        if (off == Scalar(0) || off <= eps * eps * diag * Scalar(1e-4)) break;

        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0)) continue;
                // Rotation angle zeroing a(p, q); t is the smaller root.
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                Scalar t = Scalar(1) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
                if (theta < Scalar(0)) t = -t;
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar s = t * c;

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = Scalar(0);
                for (Eigen::Index r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const Scalar arp = a(r, p);
                    const Scalar arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
            }
        }
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values = a.diagonal();
    std::sort(values.data(), values.data() + values.size());
    return values;
}

} // namespace pdiff
