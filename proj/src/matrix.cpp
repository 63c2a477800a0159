#include "pdiv/matrix.hpp"

#include <stdexcept>

namespace pdiv {

RatMat operator*(const RatMat& a, const RatMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    RatMat c(a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t k = 0; k < a.cols(); ++k) {
            const Rat& aik = a.at(i, k);
            if (aik == 0) continue;
            for (size_t j = 0; j < b.cols(); ++j) {
                const Rat& bkj = b.at(k, j);
                if (bkj == 0) continue;
                c.at(i, j) += aik * bkj;
            }
        }
    return c;
}

RatMat operator*(const Rat& s, const RatMat& a) {
    RatMat c(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) c.at(i, j) = s * a.at(i, j);
    return c;
}

RatVec mat_vec(const RatMat& a, const RatVec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("mat_vec: shape mismatch");
    RatVec y(a.rows(), Rat(0));
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) {
            if (a.at(i, j) == 0 || x[j] == 0) continue;
            y[i] += a.at(i, j) * x[j];
        }
    return y;
}

RatMat inverse(const RatMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: non-square matrix");
    const size_t n = a.rows();
    RatMat w = a, inv = RatMat::identity(n);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && w.at(piv, col) == 0) ++piv;
        if (piv == n) throw std::domain_error("inverse: singular matrix");
        if (piv != col)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(piv, j), w.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        const Rat d = w.at(col, col);
        for (size_t j = 0; j < n; ++j) {
            w.at(col, j) /= d;
            inv.at(col, j) /= d;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == col || w.at(i, col) == 0) continue;
            const Rat f = w.at(i, col);
            for (size_t j = 0; j < n; ++j) {
                if (w.at(col, j) != 0) w.at(i, j) -= f * w.at(col, j);
                if (inv.at(col, j) != 0) inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

Rat determinant(const RatMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant: non-square matrix");
    const size_t n = a.rows();
    RatMat w = a;
    Rat det(1);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && w.at(piv, col) == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != col) {
            for (size_t j = col; j < n; ++j) std::swap(w.at(piv, j), w.at(col, j));
            det = -det;
        }
        det *= w.at(col, col);
        for (size_t i = col + 1; i < n; ++i) {
            if (w.at(i, col) == 0) continue;
            const Rat f = w.at(i, col) / w.at(col, col);
            for (size_t j = col; j < n; ++j)
                if (w.at(col, j) != 0) w.at(i, j) -= f * w.at(col, j);
        }
    }
    return det;
}

RatMat mat_pow(const RatMat& a, long q) {
    if (a.rows() != a.cols()) throw std::invalid_argument("mat_pow: non-square matrix");
    RatMat base = q >= 0 ? a : inverse(a);
    unsigned long e = static_cast<unsigned long>(q >= 0 ? q : -q);
    RatMat acc = RatMat::identity(a.rows());
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

std::vector<Rat> charpoly(const RatMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("charpoly: non-square matrix");
    const size_t n = a.rows();
    std::vector<Rat> c(n + 1, Rat(0));
    c[n] = 1;
    RatMat b = a;
    for (size_t k = 1; k <= n; ++k) {
        Rat tr(0);
        for (size_t i = 0; i < n; ++i) tr += b.at(i, i);
        c[n - k] = -tr / Rat(static_cast<long>(k));
        if (k < n) {
            RatMat shifted = b;
            for (size_t i = 0; i < n; ++i) shifted.at(i, i) += c[n - k];
            b = a * shifted;
        }
    }
    return c;
}

std::vector<RatVec> nullspace(const RatMat& a) {
    const size_t m = a.rows(), n = a.cols();
    RatMat w = a;
    std::vector<long> pivot_of_col(n, -1);
    size_t rank = 0;
    for (size_t col = 0; col < n && rank < m; ++col) {
        size_t piv = rank;
        while (piv < m && w.at(piv, col) == 0) ++piv;
        if (piv == m) continue;
        if (piv != rank)
            for (size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(rank, j));
        const Rat d = w.at(rank, col);
        for (size_t j = 0; j < n; ++j) w.at(rank, j) /= d;
        for (size_t i = 0; i < m; ++i) {
            if (i == rank || w.at(i, col) == 0) continue;
            const Rat f = w.at(i, col);
            for (size_t j = 0; j < n; ++j)
                if (w.at(rank, j) != 0) w.at(i, j) -= f * w.at(rank, j);
        }
        pivot_of_col[col] = static_cast<long>(rank);
        ++rank;
    }
    std::vector<RatVec> basis;
    for (size_t col = 0; col < n; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        RatVec v(n, Rat(0));
        v[col] = 1;
        for (size_t j = 0; j < n; ++j)
            if (pivot_of_col[j] >= 0) v[j] = -w.at(static_cast<size_t>(pivot_of_col[j]), col);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RatVec> solve_in_rowspan(const std::vector<RatVec>& b, const RatVec& x) {
    const size_t m = b.size();
    if (m == 0) {
        for (const Rat& e : x)
            if (e != 0) return std::nullopt;
        return RatVec{};
    }
    const size_t n = b[0].size();
    if (x.size() != n) throw std::invalid_argument("solve_in_rowspan: shape mismatch");
    // Echelonize b with a tracked transform, then reduce x against it.
    std::vector<RatVec> w = b;
    std::vector<RatVec> t(m, RatVec(m, Rat(0)));
    for (size_t i = 0; i < m; ++i) t[i][i] = 1;
    size_t rank = 0;
    std::vector<size_t> pivcol;
    for (size_t col = 0; col < n && rank < m; ++col) {
        size_t piv = rank;
        while (piv < m && w[piv][col] == 0) ++piv;
        if (piv == m) continue;
        std::swap(w[piv], w[rank]);
        std::swap(t[piv], t[rank]);
        for (size_t i = rank + 1; i < m; ++i) {
            if (w[i][col] == 0) continue;
            const Rat f = w[i][col] / w[rank][col];
            for (size_t j = 0; j < n; ++j)
                if (w[rank][j] != 0) w[i][j] -= f * w[rank][j];
            for (size_t j = 0; j < m; ++j)
                if (t[rank][j] != 0) t[i][j] -= f * t[rank][j];
        }
        pivcol.push_back(col);
        ++rank;
    }
    RatVec rem = x;
    RatVec coef(rank, Rat(0));
    for (size_t k = 0; k < rank; ++k) {
        const size_t c = pivcol[k];
        if (rem[c] == 0) continue;
        const Rat f = rem[c] / w[k][c];
        coef[k] = f;
        for (size_t j = 0; j < n; ++j)
            if (w[k][j] != 0) rem[j] -= f * w[k][j];
    }
    for (const Rat& e : rem)
        if (e != 0) return std::nullopt;
    RatVec y(m, Rat(0));
    for (size_t k = 0; k < rank; ++k) {
        if (coef[k] == 0) continue;
        for (size_t j = 0; j < m; ++j)
            if (t[k][j] != 0) y[j] += coef[k] * t[k][j];
    }
    return y;
}

}  // namespace pdiv
