#include "btlf/linalg.hpp"

#include <sstream>

namespace btlf {

namespace {

void check_same(const Matrix& A, const Matrix& B, bool same_shape) {
  if (A.layer() != B.layer()) fail(Err::BadInput, "matrices live in different layers");
  if (same_shape && (A.rows() != B.rows() || A.cols() != B.cols()))
    fail(Err::DimensionMismatch, "matrix shapes do not match");
}

}  // namespace

Matrix Matrix::identity(const FieldLayer* L, int n) {
  Matrix I(L, n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = L->one();
  return I;
}

Matrix Matrix::from_rows(const FieldLayer* L, const std::vector<std::vector<FElem>>& rows) {
  if (rows.empty()) fail(Err::BadInput, "empty matrix");
  Matrix M(L, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < M.rows(); ++i) {
    if (static_cast<int>(rows[i].size()) != M.cols())
      fail(Err::DimensionMismatch, "ragged matrix rows");
    for (int j = 0; j < M.cols(); ++j) {
      if (rows[i][j].L != L) fail(Err::BadInput, "entry outside the matrix layer");
      M.at(i, j) = rows[i][j];
    }
  }
  return M;
}

Matrix Matrix::from_rat_rows(const FieldLayer* L, const std::vector<std::vector<Rat>>& rows) {
  if (rows.empty()) fail(Err::BadInput, "empty matrix");
  Matrix M(L, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < M.rows(); ++i) {
    if (rows[i].size() != rows[0].size()) fail(Err::DimensionMismatch, "ragged matrix rows");
    for (int j = 0; j < M.cols(); ++j) M.at(i, j) = L->from_rat(rows[i][j]);
  }
  return M;
}

Matrix Matrix::transpose() const {
  Matrix T(L_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) T.at(j, i) = at(i, j);
  return T;
}

std::vector<FElem> Matrix::col(int j) const {
  std::vector<FElem> v;
  v.reserve(rows_);
  for (int i = 0; i < rows_; ++i) v.push_back(at(i, j));
  return v;
}

std::vector<FElem> Matrix::row(int i) const {
  std::vector<FElem> v;
  v.reserve(cols_);
  for (int j = 0; j < cols_; ++j) v.push_back(at(i, j));
  return v;
}

void Matrix::set_col(int j, const std::vector<FElem>& v) {
  if (static_cast<int>(v.size()) != rows_) fail(Err::DimensionMismatch, "column size mismatch");
  for (int i = 0; i < rows_; ++i) at(i, j) = v[i];
}

Matrix Matrix::cols_subset(const std::vector<int>& idx) const {
  Matrix M(L_, rows_, static_cast<int>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) M.set_col(static_cast<int>(k), col(idx[k]));
  return M;
}

bool Matrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

std::string Matrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << (i ? "; " : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j).str();
  }
  os << "]";
  return os.str();
}

Matrix operator+(const Matrix& A, const Matrix& B) {
  check_same(A, B, true);
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = A.at(i, j) + B.at(i, j);
  return C;
}

Matrix operator-(const Matrix& A, const Matrix& B) {
  check_same(A, B, true);
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = A.at(i, j) - B.at(i, j);
  return C;
}

Matrix operator-(const Matrix& A) {
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = -A.at(i, j);
  return C;
}

Matrix operator*(const Matrix& A, const Matrix& B) {
  check_same(A, B, false);
  if (A.cols() != B.rows()) fail(Err::DimensionMismatch, "inner dimensions do not match");
  Matrix C(A.layer(), A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int k = 0; k < A.cols(); ++k) {
      if (A.at(i, k).is_zero()) continue;
      for (int j = 0; j < B.cols(); ++j) {
        if (B.at(k, j).is_zero()) continue;
        C.at(i, j) = C.at(i, j) + A.at(i, k) * B.at(k, j);
      }
    }
  return C;
}

Matrix operator*(const FElem& s, const Matrix& A) {
  if (s.L != A.layer()) fail(Err::BadInput, "scalar outside the matrix layer");
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = s * A.at(i, j);
  return C;
}

Matrix operator*(const Rat& s, const Matrix& A) {
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = s * A.at(i, j);
  return C;
}

bool operator==(const Matrix& A, const Matrix& B) {
  if (A.layer() != B.layer() || A.rows() != B.rows() || A.cols() != B.cols()) return false;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (!(A.at(i, j) == B.at(i, j))) return false;
  return true;
}

std::vector<FElem> mat_vec(const Matrix& A, const std::vector<FElem>& x) {
  if (static_cast<int>(x.size()) != A.cols()) fail(Err::DimensionMismatch, "vector size mismatch");
  std::vector<FElem> y(A.rows(), A.layer()->zero());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (!A.at(i, j).is_zero() && !x[j].is_zero()) y[i] = y[i] + A.at(i, j) * x[j];
  return y;
}

namespace {

// Row-reduce [A | B] in place; returns pivot columns of A and the row count
// used.  Turns A into reduced row echelon form.
struct Echelon {
  Matrix A, B;
  std::vector<int> pivot_col;  // per pivot row
};

Echelon echelonize(Matrix A, Matrix B) {
  const int rows = A.rows(), cols = A.cols();
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i)
      if (!A.at(i, c).is_zero()) { pr = i; break; }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j < cols; ++j) std::swap(A.at(pr, j), A.at(r, j));
    if (pr != r && B.cols() > 0)
      for (int j = 0; j < B.cols(); ++j) std::swap(B.at(pr, j), B.at(r, j));
    FElem piv_inv = inv(A.at(r, c));
    for (int j = c; j < cols; ++j) A.at(r, j) = piv_inv * A.at(r, j);
    for (int j = 0; j < B.cols(); ++j) B.at(r, j) = piv_inv * B.at(r, j);
    for (int i = 0; i < rows; ++i) {
      if (i == r || A.at(i, c).is_zero()) continue;
      FElem f = A.at(i, c);
      for (int j = c; j < cols; ++j) A.at(i, j) = A.at(i, j) - f * A.at(r, j);
      for (int j = 0; j < B.cols(); ++j) B.at(i, j) = B.at(i, j) - f * B.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return Echelon{std::move(A), std::move(B), std::move(pivots)};
}

}  // namespace

FElem det(const Matrix& A) {
  if (A.rows() != A.cols()) fail(Err::DimensionMismatch, "determinant of a non-square matrix");
  Matrix M = A;
  const int n = M.rows();
  FElem d = A.layer()->one();
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int i = c; i < n; ++i)
      if (!M.at(i, c).is_zero()) { pr = i; break; }
    if (pr < 0) return A.layer()->zero();
    if (pr != c) {
      for (int j = 0; j < n; ++j) std::swap(M.at(pr, j), M.at(c, j));
      d = -d;
    }
    d = d * M.at(c, c);
    FElem piv_inv = inv(M.at(c, c));
    for (int i = c + 1; i < n; ++i) {
      if (M.at(i, c).is_zero()) continue;
      FElem f = M.at(i, c) * piv_inv;
      for (int j = c; j < n; ++j) M.at(i, j) = M.at(i, j) - f * M.at(c, j);
    }
  }
  return d;
}

Matrix inverse(const Matrix& A) {
  if (A.rows() != A.cols()) fail(Err::DimensionMismatch, "inverse of a non-square matrix");
  Echelon e = echelonize(A, Matrix::identity(A.layer(), A.rows()));
  if (static_cast<int>(e.pivot_col.size()) != A.rows())
    fail(Err::RankDeficient, "matrix is singular");
  return e.B;
}

int rank(const Matrix& A) {
  Echelon e = echelonize(A, Matrix(A.layer(), A.rows(), 0));
  return static_cast<int>(e.pivot_col.size());
}

Matrix solve(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols()) fail(Err::DimensionMismatch, "solve needs a square matrix");
  check_same(A, B, false);
  if (A.rows() != B.rows()) fail(Err::DimensionMismatch, "right-hand side size mismatch");
  Echelon e = echelonize(A, B);
  if (static_cast<int>(e.pivot_col.size()) != A.rows())
    fail(Err::RankDeficient, "matrix is singular");
  return e.B;
}

std::optional<Matrix> try_solve(const Matrix& A, const Matrix& B) {
  check_same(A, B, false);
  if (A.rows() != B.rows()) fail(Err::DimensionMismatch, "right-hand side size mismatch");
  Echelon e = echelonize(A, B);
  const int r = static_cast<int>(e.pivot_col.size());
  // consistency: rows beyond the rank must have vanished on the B side
  for (int i = r; i < A.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (!e.B.at(i, j).is_zero()) return std::nullopt;
  Matrix X(A.layer(), A.cols(), B.cols());
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < B.cols(); ++j) X.at(e.pivot_col[k], j) = e.B.at(k, j);
  return X;
}

Matrix kernel(const Matrix& A) {
  Echelon e = echelonize(A, Matrix(A.layer(), A.rows(), 0));
  const int r = static_cast<int>(e.pivot_col.size());
  std::vector<int> free_cols;
  {
    std::vector<bool> is_piv(A.cols(), false);
    for (int c : e.pivot_col) is_piv[c] = true;
    for (int c = 0; c < A.cols(); ++c)
      if (!is_piv[c]) free_cols.push_back(c);
  }
  Matrix K(A.layer(), A.cols(), static_cast<int>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    K.at(fc, static_cast<int>(k)) = A.layer()->one();
    for (int i = 0; i < r; ++i)
      K.at(e.pivot_col[i], static_cast<int>(k)) = -e.A.at(i, fc);
  }
  return K;
}

Matrix hstack(const Matrix& A, const Matrix& B) {
  check_same(A, B, false);
  if (A.rows() != B.rows()) fail(Err::DimensionMismatch, "hstack row mismatch");
  Matrix C(A.layer(), A.rows(), A.cols() + B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = A.at(i, j);
    for (int j = 0; j < B.cols(); ++j) C.at(i, A.cols() + j) = B.at(i, j);
  }
  return C;
}

Matrix vstack(const Matrix& A, const Matrix& B) {
  check_same(A, B, false);
  if (A.cols() != B.cols()) fail(Err::DimensionMismatch, "vstack column mismatch");
  Matrix C(A.layer(), A.rows() + B.rows(), A.cols());
  for (int j = 0; j < A.cols(); ++j) {
    for (int i = 0; i < A.rows(); ++i) C.at(i, j) = A.at(i, j);
    for (int i = 0; i < B.rows(); ++i) C.at(A.rows() + i, j) = B.at(i, j);
  }
  return C;
}

Matrix apply_signs(const Matrix& A, const std::vector<int>& signs) {
  Matrix C = A;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = apply_signs(A.at(i, j), signs);
  return C;
}

Matrix lift(const Matrix& A, const FieldLayer* target) {
  Matrix C(target, A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C.at(i, j) = lift(A.at(i, j), target);
  return C;
}

FElem trace(const Matrix& A) {
  if (A.rows() != A.cols()) fail(Err::DimensionMismatch, "trace of a non-square matrix");
  FElem t = A.layer()->zero();
  for (int i = 0; i < A.rows(); ++i) t = t + A.at(i, i);
  return t;
}

}  // namespace btlf
