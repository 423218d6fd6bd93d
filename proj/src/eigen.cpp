#include "bernoulli/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bernoulli/errors.hpp"

namespace bernoulli {

EigenResult jacobi_eigen(const SymMatrix& A, bool want_vectors) {
    const int n = A.n;
    SymMatrix M = A;
    std::vector<std::vector<double>> V;
    if (want_vectors) {
        V.assign(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) V[i][i] = 1.0;
    }
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(M.at(i, j)));
    if (scale == 0.0) scale = 1.0;

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::fabs(M.at(i, j)));
        if (off <= 1e-14 * scale) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = M.at(p, q);
                if (std::fabs(apq) <= 1e-16 * scale) continue;
                double theta = (M.at(q, q) - M.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double mkp = M.at(k, p), mkq = M.at(k, q);
                    M.at(k, p) = c * mkp - s * mkq;
                    M.at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    double mpk = M.at(p, k), mqk = M.at(q, k);
                    M.at(p, k) = c * mpk - s * mqk;
                    M.at(q, k) = s * mpk + c * mqk;
                }
                if (want_vectors)
                    for (int k = 0; k < n; ++k) {
                        double vkp = V[k][p], vkq = V[k][q];
                        V[k][p] = c * vkp - s * vkq;
                        V[k][q] = s * vkp + c * vkq;
                    }
            }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return M.at(a, a) < M.at(b, b); });
    EigenResult res;
    res.values.resize(n);
    for (int k = 0; k < n; ++k) res.values[k] = M.at(order[k], order[k]);
    if (want_vectors) {
        res.vectors.assign(n, std::vector<double>(n));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) res.vectors[k][i] = V[i][order[k]];
    }
    return res;
}

namespace {

// Lower Cholesky factor; throws SingularMass on a nonpositive pivot.
std::vector<double> cholesky(const SymMatrix& B) {
    const int n = B.n;
    std::vector<double> L(std::size_t(n) * n, 0.0);
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, B.at(i, i));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = B.at(i, j);
            for (int k = 0; k < j; ++k) s -= L[std::size_t(i) * n + k] * L[std::size_t(j) * n + k];
            if (i == j) {
                if (s <= 1e-12 * std::max(1.0, max_diag))
                    throw SingularMass("mass matrix not positive definite at pivot " +
                                       std::to_string(i));
                L[std::size_t(i) * n + i] = std::sqrt(s);
            } else {
                L[std::size_t(i) * n + j] = s / L[std::size_t(j) * n + j];
            }
        }
    }
    return L;
}

}  // namespace

EigenResult generalized_eigen(const SymMatrix& A, const SymMatrix& B, bool want_vectors) {
    const int n = A.n;
    std::vector<double> L = cholesky(B);

    // C = L^{-1} A L^{-T}
    SymMatrix C(n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = A.at(i, j);
        for (int i = 0; i < n; ++i) {
            double s = col[i];
            for (int k = 0; k < i; ++k) s -= L[std::size_t(i) * n + k] * col[k];
            col[i] = s / L[std::size_t(i) * n + i];
        }
        for (int i = 0; i < n; ++i) C.at(i, j) = col[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) col[j] = C.at(i, j);
        for (int j = 0; j < n; ++j) {
            double s = col[j];
            for (int k = 0; k < j; ++k) s -= L[std::size_t(j) * n + k] * col[k];
            col[j] = s / L[std::size_t(j) * n + j];
        }
        for (int j = 0; j < n; ++j) C.at(i, j) = col[j];
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (C.at(i, j) + C.at(j, i));
            C.at(i, j) = v;
            C.at(j, i) = v;
        }

    EigenResult res = jacobi_eigen(C, want_vectors);
    if (want_vectors) {
        // x = L^{-T} y
        for (auto& y : res.vectors) {
            for (int i = n - 1; i >= 0; --i) {
                double s = y[i];
                for (int k = i + 1; k < n; ++k) s -= L[std::size_t(k) * n + i] * y[k];
                y[i] = s / L[std::size_t(i) * n + i];
            }
        }
    }
    return res;
}

}  // namespace bernoulli
