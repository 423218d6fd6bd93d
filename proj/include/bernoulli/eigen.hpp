#pragma once

#include <vector>

namespace bernoulli {

// Dense symmetric matrix, row-major.
struct SymMatrix {
    int n = 0;
    std::vector<double> a;

    explicit SymMatrix(int size = 0) : n(size), a(std::size_t(size) * size, 0.0) {}
    double& at(int i, int j) { return a[std::size_t(i) * n + j]; }
    double at(int i, int j) const { return a[std::size_t(i) * n + j]; }
};

struct EigenResult {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[k] matches values[k]
};

// Cyclic Jacobi; adequate for the dense bases used here (n <= ~500).
EigenResult jacobi_eigen(const SymMatrix& A, bool want_vectors = false);

// Generalized symmetric problem A x = lambda B x via the Cholesky reduction
// B = L L^T. Throws SingularMass when B is not positive definite.
EigenResult generalized_eigen(const SymMatrix& A, const SymMatrix& B,
                              bool want_vectors = false);

}  // namespace bernoulli
