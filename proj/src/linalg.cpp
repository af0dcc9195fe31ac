#include "osgrf/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace osgrf {

namespace {

// Padé coefficients b_0..b_m for the [m/m] approximant of exp.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low_order(const Matrix& A, const std::array<double, N>& b) {
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    Matrix U = b[1] * I;
    Matrix V = b[0] * I;
    Matrix power = I;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * A2;
        V += b[k] * power;
        if (k + 1 < N) U += b[k + 1] * power;
    }
    U = A * U;
    return (V - U).partialPivLu().solve(V + U);
}

Matrix pade13(const Matrix& A) {
    const auto& b = kPade13;
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
                          b[3] * A2 + b[1] * I);
    const Matrix V =
        A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    return (V - U).partialPivLu().solve(V + U);
}

void require_square(const Matrix& A, const char* what) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
}

}  // namespace

Matrix expm(const Matrix& A) {
    require_square(A, "expm");
    if (!A.allFinite()) throw std::domain_error("expm: non-finite matrix entries");
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 <= kTheta3) return pade_low_order(A, kPade3);
    if (norm1 <= kTheta5) return pade_low_order(A, kPade5);
    if (norm1 <= kTheta7) return pade_low_order(A, kPade7);
    if (norm1 <= kTheta9) return pade_low_order(A, kPade9);

    const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    Matrix X = pade13(A / std::ldexp(1.0, s));
    for (int i = 0; i < s; ++i) X = X * X;
    return X;
}

Matrix mat_pow(const Matrix& E, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::domain_error("mat_pow: scale factor must be a positive finite number");
    }
    require_square(E, "mat_pow");
    if (a == 1.0) return Matrix::Identity(E.rows(), E.cols());
    return expm(std::log(a) * E);
}

AnisotropyMatrix::AnisotropyMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "AnisotropyMatrix");
    if (!entries_.allFinite()) {
        throw std::invalid_argument("AnisotropyMatrix: entries must be finite");
    }
    Eigen::EigenSolver<Matrix> solver(entries_, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::invalid_argument("AnisotropyMatrix: eigenvalue computation failed");
    }
    eigenvalues_ = solver.eigenvalues();
    lambda_min_ = eigenvalues_.real().minCoeff();
    if (!(lambda_min_ > 0.0)) {
        throw std::invalid_argument(
            "AnisotropyMatrix: every eigenvalue must have a strictly positive real part "
            "(minimum real part is " +
            std::to_string(lambda_min_) + ")");
    }
}

double lambda_min(const AnisotropyMatrix& E) { return E.lambda_min(); }

const char* to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::ScalarDiag: return "scalar_diag";
        case BlockKind::ScalarJordan: return "scalar_jordan";
        case BlockKind::RotationDiag: return "rotation_diag";
        case BlockKind::RotationJordan: return "rotation_jordan";
    }
    return "unknown";
}

BlockKind block_kind_from_string(const std::string& name) {
    if (name == "scalar_diag") return BlockKind::ScalarDiag;
    if (name == "scalar_jordan") return BlockKind::ScalarJordan;
    if (name == "rotation_diag") return BlockKind::RotationDiag;
    if (name == "rotation_jordan") return BlockKind::RotationJordan;
    throw std::invalid_argument("unknown block kind '" + name + "'");
}

GenericBlock GenericBlock::scalar_diag(double lambda, int size) {
    GenericBlock b{BlockKind::ScalarDiag, size, lambda, 0.0, 0.0};
    b.validate();
    return b;
}

GenericBlock GenericBlock::scalar_jordan(double lambda, int size) {
    GenericBlock b{BlockKind::ScalarJordan, size, lambda, 0.0, 0.0};
    b.validate();
    return b;
}

GenericBlock GenericBlock::rotation_diag(double alpha, double beta, int size) {
    GenericBlock b{BlockKind::RotationDiag, size, 0.0, alpha, beta};
    b.validate();
    return b;
}

GenericBlock GenericBlock::rotation_jordan(double alpha, double beta, int size) {
    GenericBlock b{BlockKind::RotationJordan, size, 0.0, alpha, beta};
    b.validate();
    return b;
}

void GenericBlock::validate() const {
    const std::string name = to_string(kind);
    switch (kind) {
        case BlockKind::ScalarDiag:
        case BlockKind::ScalarJordan:
            if (!(lambda > 0.0) || !std::isfinite(lambda)) {
                throw std::invalid_argument(name + " block requires lambda > 0");
            }
            if (size < 1 || (kind == BlockKind::ScalarJordan && size < 2)) {
                throw std::invalid_argument(name + " block has invalid size " +
                                            std::to_string(size));
            }
            break;
        case BlockKind::RotationDiag:
        case BlockKind::RotationJordan:
            if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
                throw std::invalid_argument(name + " block requires alpha > 0 and finite beta");
            }
            if (size < 2 || size % 2 != 0 || (kind == BlockKind::RotationJordan && size < 4)) {
                throw std::invalid_argument(name + " block has invalid size " +
                                            std::to_string(size));
            }
            break;
    }
}

Matrix GenericBlock::matrix() const {
    validate();
    Matrix M = Matrix::Zero(size, size);
    switch (kind) {
        case BlockKind::ScalarDiag:
            M.diagonal().setConstant(lambda);
            break;
        case BlockKind::ScalarJordan:
            M.diagonal().setConstant(lambda);
            for (int i = 0; i + 1 < size; ++i) M(i, i + 1) = 1.0;
            break;
        case BlockKind::RotationDiag:
        case BlockKind::RotationJordan:
            for (int i = 0; i < size; i += 2) {
                M(i, i) = alpha;
                M(i, i + 1) = beta;
                M(i + 1, i) = -beta;
                M(i + 1, i + 1) = alpha;
                if (kind == BlockKind::RotationJordan && i + 2 < size) {
                    M(i, i + 2) = 1.0;
                    M(i + 1, i + 3) = 1.0;
                }
            }
            break;
    }
    return M;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    Matrix D = Matrix::Zero(n, n);
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        D.block(offset, offset, b.rows(), b.cols()) = b;
        offset += b.rows();
    }
    return D;
}

void JordanSpec::validate() const {
    require_square(P, "JordanSpec.P");
    if (!P.allFinite()) throw std::invalid_argument("JordanSpec: P must be finite");
    if (blocks.empty()) throw std::invalid_argument("JordanSpec: at least one block required");
    int total = 0;
    for (const auto& b : blocks) {
        b.validate();
        total += b.size;
    }
    if (total != dim()) {
        throw std::invalid_argument("JordanSpec: block sizes sum to " + std::to_string(total) +
                                    " but P is " + std::to_string(dim()) + "x" +
                                    std::to_string(dim()));
    }
    const double cond = condition_number();
    if (!(cond < 1e12)) {
        throw std::invalid_argument("JordanSpec: P is numerically singular (condition number " +
                                    std::to_string(cond) + ")");
    }
}

Matrix JordanSpec::block_diagonal() const {
    std::vector<Matrix> mats;
    mats.reserve(blocks.size());
    for (const auto& b : blocks) mats.push_back(b.matrix());
    return osgrf::block_diagonal(mats);
}

double JordanSpec::condition_number() const {
    Eigen::JacobiSVD<Matrix> svd(P);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

AnisotropyMatrix jordan_assemble(const JordanSpec& spec) {
    spec.validate();
    const Matrix E = spec.P * spec.block_diagonal() * spec.P.inverse();
    return AnisotropyMatrix(E);
}

namespace {

struct Cluster {
    std::complex<double> center;
    std::vector<std::complex<double>> members;
};

// Orthonormal basis of the numerical null space of A (columns), using
// singular values at or below threshold.
template <typename Mat>
Mat null_space(const Mat& A, double threshold) {
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) ++rank;
    }
    const Eigen::Index nullity = A.cols() - rank;
    return svd.matrixV().rightCols(nullity);
}

// Deterministic sign: largest-magnitude component positive.
void fix_sign(Eigen::Ref<Vector> v) {
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0.0) v = -v;
}

}  // namespace

JordanSpec jordan_decompose(const AnisotropyMatrix& E, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("jordan_decompose: tol must be positive");
    const Matrix& A = E.matrix();
    const int n = E.dim();
    const double scale = std::max(A.norm(), std::numeric_limits<double>::min());
    const double gap = tol * scale;

    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("jordan_decompose: eigen decomposition failed");
    }
    const Eigen::VectorXcd values = solver.eigenvalues();
    const Eigen::MatrixXcd vectors = solver.eigenvectors();

    // Representatives: real eigenvalues and the positive-imaginary member of
    // each conjugate pair. Cluster them by single linkage at distance gap.
    std::vector<Eigen::Index> reps;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i).imag() >= -gap) reps.push_back(i);
    }
    std::sort(reps.begin(), reps.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
        return values(a).imag() > values(b).imag();
    });

    std::vector<std::vector<Eigen::Index>> clusters;
    for (Eigen::Index idx : reps) {
        bool placed = false;
        for (auto& c : clusters) {
            for (Eigen::Index m : c) {
                if (std::abs(values(m) - values(idx)) <= gap) {
                    c.push_back(idx);
                    placed = true;
                    break;
                }
            }
            if (placed) break;
        }
        if (!placed) clusters.push_back({idx});
    }

    JordanSpec spec;
    spec.P = Matrix::Zero(n, n);
    int column = 0;
    for (const auto& c : clusters) {
        std::complex<double> center = 0.0;
        for (Eigen::Index m : c) center += values(m);
        center /= static_cast<double>(c.size());
        const bool is_real = std::abs(center.imag()) <= gap;
        const int m = static_cast<int>(c.size());

        if (is_real) {
            Matrix basis;
            if (m == 1) {
                basis = vectors.col(c.front()).real().normalized();
            } else {
                basis = null_space<Matrix>(A - center.real() * Matrix::Identity(n, n), gap);
                if (basis.cols() < m) {
                    throw DefectiveMatrix(
                        "jordan_decompose: eigenvalue " + std::to_string(center.real()) +
                        " has algebraic multiplicity " + std::to_string(m) +
                        " but geometric multiplicity " + std::to_string(basis.cols()) +
                        "; supply a JordanSpec instead");
                }
                basis = basis.leftCols(m).eval();
            }
            for (int j = 0; j < m; ++j) {
                Vector v = basis.col(j);
                fix_sign(v);
                spec.P.col(column++) = v;
            }
            spec.blocks.push_back(GenericBlock::scalar_diag(center.real(), m));
        } else {
            Eigen::MatrixXcd basis;
            if (m == 1) {
                basis = vectors.col(c.front()).normalized();
            } else {
                const Eigen::MatrixXcd shifted =
                    A.cast<std::complex<double>>() -
                    center * Eigen::MatrixXcd::Identity(n, n);
                basis = null_space<Eigen::MatrixXcd>(shifted, gap);
                if (basis.cols() < m) {
                    throw DefectiveMatrix(
                        "jordan_decompose: complex eigenvalue pair has algebraic multiplicity " +
                        std::to_string(m) + " but geometric multiplicity " +
                        std::to_string(basis.cols()) + "; supply a JordanSpec instead");
                }
                basis = basis.leftCols(m).eval();
            }
            for (int j = 0; j < m; ++j) {
                Eigen::VectorXcd v = basis.col(j);
                // Rotate the phase so real and imaginary parts are orthogonal.
                const std::complex<double> vv = (v.array() * v.array()).sum();
                v *= std::polar(1.0, -0.5 * std::arg(vv));
                Vector u = v.real();
                Vector w = v.imag();
                Eigen::Index idx = 0;
                u.cwiseAbs().maxCoeff(&idx);
                if (u(idx) < 0.0) {
                    u = -u;
                    w = -w;
                }
                spec.P.col(column++) = u;
                spec.P.col(column++) = w;
            }
            spec.blocks.push_back(
                GenericBlock::rotation_diag(center.real(), std::abs(center.imag()), 2 * m));
        }
    }
    if (column != n) {
        throw DefectiveMatrix("jordan_decompose: eigenvalue bookkeeping mismatch (" +
                              std::to_string(column) + " of " + std::to_string(n) +
                              " basis vectors); matrix is defective within tolerance");
    }
    spec.validate();

    const Matrix realized = spec.P * spec.block_diagonal() * spec.P.inverse();
    const double err = relative_frobenius_error(realized, A);
    if (!(err <= std::max(tol, 1e-9))) {
        throw DefectiveMatrix("jordan_decompose: realization error " + std::to_string(err) +
                              " exceeds tolerance; matrix is too close to defective");
    }
    return spec;
}

double relative_frobenius_error(const Matrix& A, const Matrix& B) {
    const double denom = B.norm();
    const double diff = (A - B).norm();
    return denom > 0.0 ? diff / denom : diff;
}

}  // namespace osgrf
