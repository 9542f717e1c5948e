#pragma once

// Dense exact linear algebra over a field layer.  Everything is plain
// Gaussian elimination on FElem entries; sizes here are tiny (n <= 8), so
// clarity wins over cleverness.

#include "btlf/field.hpp"

namespace btlf {

class Matrix {
 public:
  Matrix() = default;
  Matrix(const FieldLayer* L, int rows, int cols)
      : L_(L), rows_(rows), cols_(cols), a_(rows * cols, L->zero()) {}

  static Matrix identity(const FieldLayer* L, int n);
  // entries given row-major as layer elements
  static Matrix from_rows(const FieldLayer* L, const std::vector<std::vector<FElem>>& rows);
  // rational entries, lifted into the layer
  static Matrix from_rat_rows(const FieldLayer* L, const std::vector<std::vector<Rat>>& rows);

  const FieldLayer* layer() const { return L_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  FElem& at(int i, int j) { return a_[i * cols_ + j]; }
  const FElem& at(int i, int j) const { return a_[i * cols_ + j]; }

  Matrix transpose() const;
  std::vector<FElem> col(int j) const;
  std::vector<FElem> row(int i) const;
  void set_col(int j, const std::vector<FElem>& v);
  Matrix cols_subset(const std::vector<int>& idx) const;

  bool is_zero() const;
  std::string str() const;

 private:
  const FieldLayer* L_ = nullptr;
  int rows_ = 0, cols_ = 0;
  std::vector<FElem> a_;
};

Matrix operator+(const Matrix& A, const Matrix& B);
Matrix operator-(const Matrix& A, const Matrix& B);
Matrix operator-(const Matrix& A);
Matrix operator*(const Matrix& A, const Matrix& B);
Matrix operator*(const FElem& s, const Matrix& A);
Matrix operator*(const Rat& s, const Matrix& A);
bool operator==(const Matrix& A, const Matrix& B);
inline bool operator!=(const Matrix& A, const Matrix& B) { return !(A == B); }

std::vector<FElem> mat_vec(const Matrix& A, const std::vector<FElem>& x);

FElem det(const Matrix& A);
Matrix inverse(const Matrix& A);        // RankDeficient when singular
int rank(const Matrix& A);

// Solve A X = B exactly for square invertible A.
Matrix solve(const Matrix& A, const Matrix& B);
// General consistent-solve: any shape, free variables set to zero; nullopt
// when the system has no solution.
std::optional<Matrix> try_solve(const Matrix& A, const Matrix& B);

// Basis of the right kernel, returned as the columns of a matrix
// (rows x nullity; nullity may be zero).
Matrix kernel(const Matrix& A);

Matrix hstack(const Matrix& A, const Matrix& B);
Matrix vstack(const Matrix& A, const Matrix& B);

// Entrywise application of a layer involution.
Matrix apply_signs(const Matrix& A, const std::vector<int>& signs);
inline Matrix apply(const LayerInvolution& s, const Matrix& A) { return apply_signs(A, s.signs); }

// Entrywise lift into an extension layer.
Matrix lift(const Matrix& A, const FieldLayer* target);

FElem trace(const Matrix& A);

}  // namespace btlf
