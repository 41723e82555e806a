#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "loadcast/matrix.hpp"

namespace testsupport {

// Cyclic Jacobi eigenvalue iteration for small symmetric matrices. Returns
// the eigenvalues in ascending order; plenty accurate for the Gram matrices
// (n <= a few dozen) the tests throw at it.
inline std::vector<double> symmetric_eigenvalues(loadcast::Matrix A) {
    const std::size_t n = A.rows;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A.at(p, q) * A.at(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A.at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A.at(k, p), akq = A.at(k, q);
                    A.at(k, p) = c * akp - s * akq;
                    A.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A.at(p, k), aqk = A.at(q, k);
                    A.at(p, k) = c * apk - s * aqk;
                    A.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = A.at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace testsupport
