#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmt {

using cd = std::complex<double>;

// Dense complex matrix, row-major storage.
struct ComplexMatrix {
  int n = 0;
  std::vector<cd> a;

  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : n(dim), a(size_t(dim) * dim, cd(0.0, 0.0)) {}

  cd& at(int i, int j) { return a[size_t(i) * n + j]; }
  const cd& at(int i, int j) const { return a[size_t(i) * n + j]; }
};

// Eigenvalues ordered (Re, Im) lexicographically.
struct Spectrum {
  std::vector<cd> values;
};

// Thrown when QR iteration exhausts its sweep budget; carries the active
// block that failed to deflate.
struct EigenConvergenceError : std::runtime_error {
  int block_lo, block_hi;
  EigenConvergenceError(int lo, int hi)
      : std::runtime_error("eigenvalues: QR failed to deflate block [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]"),
        block_lo(lo), block_hi(hi) {}
};

cd trace(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);

// Unitarily similar upper-Hessenberg form (Householder reflections).
ComplexMatrix hessenberg(const ComplexMatrix& m);

// All eigenvalues via Hessenberg reduction + shifted QR iteration.
// Deterministic for identical input; requires n <= 2048.
Spectrum eigenvalues(const ComplexMatrix& m);

// Determinant via partially pivoted LU; reference for small-n checks.
cd det_lu(const ComplexMatrix& m);

}  // namespace rmt
