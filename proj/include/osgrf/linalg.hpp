#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace osgrf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised by jordan_decompose when a repeated eigenvalue has a deficient
/// eigenspace. Such matrices must be described by a JordanSpec directly.
class DefectiveMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix exponential by scaling and squaring with diagonal Padé
/// approximants of degree 3..13 (Higham's selection thresholds).
Matrix expm(const Matrix& A);

/// a^E = exp(ln(a) E). Throws std::domain_error when a <= 0.
Matrix mat_pow(const Matrix& E, double a);

/// A square matrix whose spectrum lies in the open right half-plane.
class AnisotropyMatrix {
public:
    /// Throws std::invalid_argument for non-square input, non-finite
    /// entries, or an eigenvalue with non-positive real part.
    explicit AnisotropyMatrix(Matrix entries);

    [[nodiscard]] const Matrix& matrix() const { return entries_; }
    [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] double trace() const { return entries_.trace(); }
    [[nodiscard]] double lambda_min() const { return lambda_min_; }
    [[nodiscard]] const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }

private:
    Matrix entries_;
    Eigen::VectorXcd eigenvalues_;
    double lambda_min_ = 0.0;
};

/// Minimum real part over the spectrum of E.
double lambda_min(const AnisotropyMatrix& E);

enum class BlockKind { ScalarDiag, ScalarJordan, RotationDiag, RotationJordan };

const char* to_string(BlockKind kind);
BlockKind block_kind_from_string(const std::string& name);

/// One of the four real Jordan block shapes.
///
/// ScalarDiag      lambda * I
/// ScalarJordan    lambda on the diagonal, ones on the superdiagonal
/// RotationDiag    blockdiag(A, ..., A) with A = [[alpha, beta], [-beta, alpha]]
/// RotationJordan  A on the diagonal, I2 on the block superdiagonal
struct GenericBlock {
    BlockKind kind = BlockKind::ScalarDiag;
    int size = 1;
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    static GenericBlock scalar_diag(double lambda, int size);
    static GenericBlock scalar_jordan(double lambda, int size);
    static GenericBlock rotation_diag(double alpha, double beta, int size);
    static GenericBlock rotation_jordan(double alpha, double beta, int size);

    /// Throws std::invalid_argument if the shape or parameters are invalid.
    void validate() const;
    [[nodiscard]] Matrix matrix() const;
};

/// Real Jordan description E = P * blockdiag(blocks) * P^-1.
struct JordanSpec {
    Matrix P;
    std::vector<GenericBlock> blocks;

    [[nodiscard]] int dim() const { return static_cast<int>(P.rows()); }
    /// Validates every block, the size bookkeeping and the invertibility of P.
    void validate() const;
    [[nodiscard]] Matrix block_diagonal() const;
    /// 2-norm condition number of P.
    [[nodiscard]] double condition_number() const;
};

Matrix block_diagonal(const std::vector<Matrix>& blocks);

AnisotropyMatrix jordan_assemble(const JordanSpec& spec);

/// Best-effort real Jordan decomposition for non-defective matrices.
/// Real eigenvalues give ScalarDiag blocks, conjugate pairs alpha +- i beta
/// give RotationDiag blocks with beta > 0. Blocks are ordered by decreasing
/// real part. Eigenvalues closer than tol * |E| are treated as one cluster.
JordanSpec jordan_decompose(const AnisotropyMatrix& E, double tol = 1e-8);

/// Relative Frobenius distance |A - B| / |B| (absolute when B = 0).
double relative_frobenius_error(const Matrix& A, const Matrix& B);

}  // namespace osgrf
