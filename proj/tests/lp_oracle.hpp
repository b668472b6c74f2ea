#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

// Dense two-phase primal simplex for  min c^T x  s.t.  A x = b, x >= 0.
// Bland's rule, no factorization updates: oracle duty on tiny instances only.

namespace lp {

struct Result {
    bool feasible = false;
    bool bounded = true;
    double objective = 0;
    std::vector<double> x;
};

class Simplex {
public:
    Simplex(int rows, int cols) : m_(rows), n_(cols), A_(size_t(rows) * cols, 0.0), b_(rows, 0.0), c_(cols, 0.0) {}

    double& A(int i, int j) { return A_[size_t(i) * n_ + j]; }
    double& b(int i) { return b_[size_t(i)]; }
    double& c(int j) { return c_[size_t(j)]; }

    Result solve() {
        // make b >= 0
        for (int i = 0; i < m_; i++)
            if (b_[size_t(i)] < 0) {
                b_[size_t(i)] = -b_[size_t(i)];
                for (int j = 0; j < n_; j++) A(i, j) = -A(i, j);
            }
        // phase 1 tableau with m artificial columns
        int cols = n_ + m_;
        ncols_ = cols;
        tab_.assign(size_t(m_ + 1) * (cols + 1), 0.0);
        basis_.resize(size_t(m_));
        for (int i = 0; i < m_; i++) {
            for (int j = 0; j < n_; j++) T(i, j) = A(i, j);
            T(i, n_ + i) = 1.0;
            T(i, cols) = b_[size_t(i)];
            basis_[size_t(i)] = n_ + i;
        }
        for (int j = 0; j < cols; j++) {
            double s = 0;
            for (int i = 0; i < m_; i++) s += (j >= n_) ? 0.0 : T(i, j);
            T(m_, j) = (j >= n_) ? 0.0 : -s;
        }
        double rhs = 0;
        for (int i = 0; i < m_; i++) rhs += T(i, cols);
        T(m_, cols) = -rhs;
        if (!iterate(cols)) throw std::runtime_error("lp: phase-1 unbounded");
        if (T(m_, cols) < -1e-7) return Result{false, true, 0.0, {}};

        // drive remaining artificials out of the basis where possible
        for (int i = 0; i < m_; i++) {
            if (basis_[size_t(i)] < n_) continue;
            int piv = -1;
            for (int j = 0; j < n_; j++)
                if (std::abs(T(i, j)) > 1e-9) {
                    piv = j;
                    break;
                }
            if (piv >= 0) pivot(i, piv);
        }
        // phase 2 objective
        for (int j = 0; j <= cols; j++) T(m_, j) = 0.0;
        for (int j = 0; j < n_; j++) T(m_, j) = c_[size_t(j)];
        for (int i = 0; i < m_; i++) {
            if (basis_[size_t(i)] >= n_) continue;
            double cb = c_[size_t(basis_[size_t(i)])];
            if (cb == 0.0) continue;
            for (int j = 0; j <= cols; j++) T(m_, j) -= cb * T(i, j);
        }
        // forbid re-entering artificials
        artificial_blocked_ = true;
        if (!iterate(cols)) return Result{true, false, 0.0, {}};

        Result res;
        res.feasible = true;
        res.x.assign(size_t(n_), 0.0);
        for (int i = 0; i < m_; i++)
            if (basis_[size_t(i)] < n_) res.x[size_t(basis_[size_t(i)])] = T(i, cols);
        res.objective = 0;
        for (int j = 0; j < n_; j++) res.objective += c_[size_t(j)] * res.x[size_t(j)];
        return res;
    }

private:
    double& T(int i, int j) { return tab_[size_t(i) * (ncols_ + 1) + j]; }

    void pivot(int row, int col) {
        double p = T(row, col);
        for (int j = 0; j <= ncols_; j++) T(row, j) /= p;
        for (int i = 0; i <= m_; i++) {
            if (i == row) continue;
            double f = T(i, col);
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols_; j++) T(i, j) -= f * T(row, j);
        }
        basis_[size_t(row)] = col;
    }

    bool iterate(int cols) {
        for (int guard = 0; guard < 200000; guard++) {
            // Dantzig rule for speed, Bland after a while for anti-cycling
            bool bland = guard > 20000;
            int col = -1;
            double best_rc = -1e-9;
            for (int j = 0; j < cols; j++) {
                if (artificial_blocked_ && j >= n_) break;
                if (T(m_, j) < best_rc) {
                    col = j;
                    if (bland) break;
                    best_rc = T(m_, j);
                }
            }
            if (col < 0) return true;
            int row = -1;
            double best = 0;
            for (int i = 0; i < m_; i++) {
                if (T(i, col) > 1e-11) {
                    double ratio = T(i, cols) / T(i, col);
                    if (row < 0 || ratio < best - 1e-12 ||
                        (std::abs(ratio - best) <= 1e-12 && basis_[size_t(i)] < basis_[size_t(row)])) {
                        row = i;
                        best = ratio;
                    }
                }
            }
            if (row < 0) return false;  // unbounded
            pivot(row, col);
        }
        throw std::runtime_error("lp: too many pivots");
    }

    int m_, n_, ncols_ = 0;
    std::vector<double> A_, b_, c_, tab_;
    std::vector<int> basis_;
    bool artificial_blocked_ = false;
};

}  // namespace lp
