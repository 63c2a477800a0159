#pragma once

/* Dense exact rational matrices: just enough linear algebra for the
 * lattice engine (products, inverses, characteristic polynomials,
 * rational nullspaces). Matrices act on column vectors. */

#include "pdiv/rational.hpp"

#include <vector>

namespace pdiv {

using RatVec = std::vector<Rat>;

class RatMat {
  public:
    RatMat() : rows_(0), cols_(0) {}
    RatMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}

    static RatMat identity(size_t n) {
        RatMat m(n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    Rat& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Rat& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    RatVec row(size_t i) const { return RatVec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }
    RatVec col(size_t j) const {
        RatVec c(rows_);
        for (size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }

    RatMat transpose() const {
        RatMat t(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    bool operator==(const RatMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

  private:
    size_t rows_, cols_;
    std::vector<Rat> a_;
};

RatMat operator*(const RatMat& a, const RatMat& b);
RatMat operator*(const Rat& s, const RatMat& a);

RatVec mat_vec(const RatMat& a, const RatVec& x);  // a * x (column vector)

/* Inverse; throws std::domain_error on a singular input. */
RatMat inverse(const RatMat& a);

Rat determinant(const RatMat& a);

RatMat mat_pow(const RatMat& a, long q);  // negative q through the inverse

/* Monic characteristic polynomial coefficients c[0..n] of det(xI - A),
 * c[n] = 1 (Faddeev-LeVerrier). */
std::vector<Rat> charpoly(const RatMat& a);

/* Rows spanning { x : a * x^T = 0 } over the rationals. */
std::vector<RatVec> nullspace(const RatMat& a);

/* Solve y * B = x for a row vector x in the row span of B; nullopt when
 * x is outside the span. B need not be square. */
std::optional<RatVec> solve_in_rowspan(const std::vector<RatVec>& b, const RatVec& x);

}  // namespace pdiv
