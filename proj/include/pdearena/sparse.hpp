#ifndef PDEARENA_SPARSE_HPP
#define PDEARENA_SPARSE_HPP

#include <span>
#include <vector>

namespace pdearena {

/// Square sparse matrix in compressed-sparse-row form. Column indices are
/// strictly increasing within each row. Immutable once assembled.
struct SparseMatrix {
  int n = 0;
  std::vector<int> row_offsets;    // length n+1, monotone
  std::vector<int> column_indices; // length nnz
  std::vector<double> values;      // length nnz

  int nnz() const { return static_cast<int>(column_indices.size()); }
  /// Value lookup by binary search; 0 for entries outside the pattern.
  double at(int row, int col) const;
  /// Pointer to the stored entry (row, col), or nullptr if not present.
  double* find(int row, int col);
};

/// Builds a CSR matrix from a known symmetric-pattern adjacency: first
/// declare the couplings, then compress, then accumulate values.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) : adj_(n) {}
  void connect(int row, int col) { adj_[row].push_back(col); }
  /// Sorts and deduplicates the pattern; returns the matrix with zeroed
  /// values plus retains the pattern for add().
  SparseMatrix compress();

 private:
  std::vector<std::vector<int>> adj_;
};

/// Sums a value into an existing pattern entry; aborts in debug builds if
/// the entry is missing from the pattern.
void csr_add(SparseMatrix& a, int row, int col, double value);

/// y = A x (exact CSR product). Throws on dimension mismatch.
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
void spmv_into(const SparseMatrix& a, std::span<const double> x,
               std::span<double> y);

/// ILU(0): incomplete LU with the sparsity pattern of the source matrix.
/// L is unit lower triangular; L and U share the combined storage.
struct IluFactors {
  const SparseMatrix* pattern = nullptr;  // source matrix (for the pattern)
  std::vector<double> values;             // factored values, same layout
  std::vector<int> diag;                  // index of the diagonal per row

  /// x = U^{-1} L^{-1} r.
  void apply(std::span<const double> r, std::span<double> x) const;
};

/// Throws FactorizationBreakdown on a zero pivot (no perturbation is
/// applied, so failures stay visible).
IluFactors ilu0_factor(const SparseMatrix& a);

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for symmetric positive definite
/// systems. Stops when ||b - Ax||_2 <= tol * ||b||_2. Throws SolverFailure
/// (carrying the best iterate) on non-convergence or NaN.
SolveResult cg_solve(const SparseMatrix& a, std::span<const double> b,
                     const IluFactors* precond, double tol, int max_iter);

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations; left
/// ILU preconditioning when supplied. The true residual is re-checked on
/// exit; throws SolverFailure on non-convergence.
SolveResult gmres_solve(const SparseMatrix& a, std::span<const double> b,
                        const IluFactors* precond, double tol, int restart,
                        int max_iter);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace pdearena

#endif
