#include "bernoulli/lp.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace bernoulli {

namespace {

// Tableau simplex with the lexicographic tie-break (value, index) on entering
// and leaving variables, which prevents cycling on the degenerate sup-norm
// systems the minimax fits produce.
class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
            const std::vector<double>& c, double eps)
        : eps_(eps),
          m_(static_cast<int>(b.size())),
          n_(static_cast<int>(c.size())),
          N_(n_ + 1),
          B_(m_),
          D_(m_ + 2, std::vector<double>(n_ + 2)) {
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
        for (int i = 0; i < m_; ++i) {
            B_[i] = n_ + i;
            D_[i][n_] = -1;
            D_[i][n_ + 1] = b[i];
        }
        for (int j = 0; j < n_; ++j) {
            N_[j] = j;
            D_[m_][j] = -c[j];
        }
        N_[n_] = -1;
        D_[m_ + 1][n_] = 1;
    }

    double solve(std::vector<double>& x) {
        int r = 0;
        for (int i = 1; i < m_; ++i)
            if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
        if (D_[r][n_ + 1] < -eps_) {
            pivot(r, n_);
            if (!simplex(2) || D_[m_ + 1][n_ + 1] < -eps_)
                return -std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i)
                if (B_[i] == -1) {
                    int s = 0;
                    for (int j = 1; j <= n_; ++j)
                        if (std::pair(D_[i][j], N_[j]) < std::pair(D_[i][s], N_[s])) s = j;
                    pivot(i, s);
                }
        }
        bool ok = simplex(1);
        x.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (B_[i] < n_) x[B_[i]] = D_[i][n_ + 1];
        return ok ? D_[m_][n_ + 1] : std::numeric_limits<double>::infinity();
    }

private:
    void pivot(int r, int s) {
        double* a = D_[r].data();
        double inv = 1.0 / a[s];
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r && std::fabs(D_[i][s]) > eps_) {
                double* bb = D_[i].data();
                double inv2 = bb[s] * inv;
                for (int j = 0; j < n_ + 2; ++j) bb[j] -= a[j] * inv2;
                bb[s] = a[s] * inv2;
            }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) D_[r][j] *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) D_[i][s] *= -inv;
        D_[r][s] = inv;
        std::swap(B_[r], N_[s]);
    }

    bool simplex(int phase) {
        int x = m_ + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (N_[j] == -phase) continue;
                if (s == -1 || std::pair(D_[x][j], N_[j]) < std::pair(D_[x][s], N_[s])) s = j;
            }
            if (D_[x][s] >= -eps_) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (D_[i][s] <= eps_) continue;
                if (r == -1 || std::pair(D_[i][n_ + 1] / D_[i][s], B_[i]) <
                                   std::pair(D_[r][n_ + 1] / D_[r][s], B_[r]))
                    r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    double eps_;
    int m_, n_;
    std::vector<int> N_, B_;
    std::vector<std::vector<double>> D_;
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, double eps) {
    Simplex s(A, b, c, eps);
    LpResult res;
    double obj = s.solve(res.x);
    res.feasible = obj != -std::numeric_limits<double>::infinity();
    res.bounded = obj != std::numeric_limits<double>::infinity();
    res.objective = (res.feasible && res.bounded) ? obj : 0.0;
    return res;
}

}  // namespace bernoulli
