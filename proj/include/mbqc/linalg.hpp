#pragma once

// Dense complex linear algebra for small Hilbert spaces (system dimension
// <= 16, superoperator side <= 256). Vectorization is column-major
// throughout the library: vec(X)[i + j*d] = X(i, j). Choi matrices and the
// superoperator tensor product silently break if this convention drifts, so
// every routine below assumes it.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbqc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Default tolerances: entrywise equality, eigenvalue floor for PSD checks,
// and channel (CPTP) checks. Dimensions are tiny and problems
// well-conditioned, so these are comfortable in double precision.
inline constexpr double kEntryTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;
inline constexpr double kChannelTol = 1e-10;

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    return (a - b).cwiseAbs().maxCoeff();
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                         double tol = kEntryTol) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.size() == 0 || max_abs_diff(a, b) <= tol);
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kChannelTol) {
    return m.rows() == m.cols() &&
           (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Basic matrix operations

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

// Trace over the subsystems not listed in `keep`; subsystem order among the
// kept factors is preserved.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
    long total = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("partial_trace: bad dims");
        total *= d;
    }
    if (m.rows() != m.cols() || m.rows() != total) {
        throw std::invalid_argument(
            "partial_trace: matrix side does not match product of dims");
    }
    const int k = static_cast<int>(dims.size());
    std::vector<bool> kept(k, false);
    for (int idx : keep) {
        if (idx < 0 || idx >= k) {
            throw std::invalid_argument("partial_trace: keep index out of range");
        }
        kept[idx] = true;
    }
    long dim_keep = 1, dim_trace = 1;
    for (int i = 0; i < k; ++i) (kept[i] ? dim_keep : dim_trace) *= dims[i];

    // Strides of each subsystem in the full index.
    std::vector<long> stride(k, 1);
    for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    // Enumerate (kept row, kept col, traced diagonal) multi-indices.
    std::vector<int> keep_sys, trace_sys;
    for (int i = 0; i < k; ++i) (kept[i] ? keep_sys : trace_sys).push_back(i);

    auto unrank = [&dims](long x, const std::vector<int>& sys,
                          std::vector<int>& out) {
        for (int s = static_cast<int>(sys.size()) - 1; s >= 0; --s) {
            out[s] = static_cast<int>(x % dims[sys[s]]);
            x /= dims[sys[s]];
        }
    };

    ComplexMatrix out = ComplexMatrix::Zero(dim_keep, dim_keep);
    std::vector<int> ri(keep_sys.size()), ci(keep_sys.size()), ti(trace_sys.size());
    for (long r = 0; r < dim_keep; ++r) {
        unrank(r, keep_sys, ri);
        for (long c = 0; c < dim_keep; ++c) {
            unrank(c, keep_sys, ci);
            cplx acc = 0.0;
            for (long t = 0; t < dim_trace; ++t) {
                unrank(t, trace_sys, ti);
                long row = 0, col = 0;
                for (size_t s = 0; s < keep_sys.size(); ++s) {
                    row += ri[s] * stride[keep_sys[s]];
                    col += ci[s] * stride[keep_sys[s]];
                }
                for (size_t s = 0; s < trace_sys.size(); ++s) {
                    row += ti[s] * stride[trace_sys[s]];
                    col += ti[s] * stride[trace_sys[s]];
                }
                acc += m(row, col);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("trace_norm: matrix must be square");
    }
    if (m.rows() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

struct HermitianEig {
    RealVector values;       // ascending
    ComplexMatrix vectors;   // columns, unitary
};

inline HermitianEig hermitian_eig(const ComplexMatrix& m) {
    if (!is_hermitian(m, 1e-10)) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eig: eigensolver failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_eigenvalue(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Vectorization

inline ComplexVector vectorize(const ComplexMatrix& x) {
    ComplexVector v(x.size());
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) v(idx++) = x(i, j);
    }
    return v;
}

inline ComplexMatrix devectorize(const ComplexVector& v, Eigen::Index rows,
                                 Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw std::invalid_argument("devectorize: size mismatch");
    }
    ComplexMatrix x(rows, cols);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = v(idx++);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Domain types

// Hermitian, unit-trace, positive semidefinite matrix.
struct DensityMatrix {
    int dim = 0;
    ComplexMatrix mat;

    DensityMatrix() = default;
    explicit DensityMatrix(ComplexMatrix m) : dim(static_cast<int>(m.rows())), mat(std::move(m)) {
        if (mat.rows() != mat.cols()) {
            throw std::invalid_argument("DensityMatrix: not square");
        }
        if (!is_hermitian(mat, kEntryTol)) {
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        }
        if (std::abs(mat.trace().real() - 1.0) > kEntryTol ||
            std::abs(mat.trace().imag()) > kEntryTol) {
            throw std::invalid_argument("DensityMatrix: trace is not 1");
        }
        if (min_eigenvalue(mat) < kPsdFloor) {
            throw std::invalid_argument("DensityMatrix: not positive semidefinite");
        }
    }
};

// List of dim x dim Kraus operators with dagger-products summing to identity.
struct KrausChannel {
    int dim = 0;
    std::vector<ComplexMatrix> ops;
};

inline bool kraus_complete(const KrausChannel& k, double tol = kChannelTol) {
    if (k.dim <= 0 || k.ops.empty()) return false;
    ComplexMatrix acc = ComplexMatrix::Zero(k.dim, k.dim);
    for (const auto& op : k.ops) {
        if (op.rows() != k.dim || op.cols() != k.dim) return false;
        acc += op.adjoint() * op;
    }
    return max_abs_diff(acc, ComplexMatrix::Identity(k.dim, k.dim)) <= tol;
}

// Linear map on operators, stored as a (dim_out^2 x dim_in^2) matrix acting
// on column-vectorized operators.
struct Superoperator {
    int dim_in = 0;
    int dim_out = 0;
    ComplexMatrix mat;
};

inline Superoperator superop_identity(int dim) {
    return {dim, dim, ComplexMatrix::Identity(static_cast<Eigen::Index>(dim) * dim,
                                              static_cast<Eigen::Index>(dim) * dim)};
}

inline Superoperator superop_zero(int dim_in, int dim_out) {
    return {dim_in, dim_out,
            ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_out) * dim_out,
                                static_cast<Eigen::Index>(dim_in) * dim_in)};
}

namespace detail {

// Rectangular Kraus operators (dim_out x dim_in) are allowed here; no
// completeness check. vec(K X K^dag) = (conj(K) (x) K) vec(X).
inline Superoperator superop_from_kraus_ops(const std::vector<ComplexMatrix>& ops) {
    if (ops.empty()) {
        throw std::invalid_argument("superop_from_kraus_ops: empty Kraus list");
    }
    const int dout = static_cast<int>(ops.front().rows());
    const int din = static_cast<int>(ops.front().cols());
    ComplexMatrix mat = ComplexMatrix::Zero(static_cast<Eigen::Index>(dout) * dout,
                                            static_cast<Eigen::Index>(din) * din);
    for (const auto& k : ops) {
        if (k.rows() != dout || k.cols() != din) {
            throw std::invalid_argument("superop_from_kraus_ops: inconsistent shapes");
        }
        mat += kron(k.conjugate(), k);
    }
    return {din, dout, std::move(mat)};
}

}  // namespace detail

inline Superoperator superop_from_kraus(const KrausChannel& k) {
    if (!kraus_complete(k)) {
        throw std::invalid_argument("superop_from_kraus: Kraus set is not complete");
    }
    return detail::superop_from_kraus_ops(k.ops);
}

// g after f.
inline Superoperator superop_compose(const Superoperator& g, const Superoperator& f) {
    if (g.dim_in != f.dim_out) {
        throw std::invalid_argument("superop_compose: inner dimensions mismatch");
    }
    return {f.dim_in, g.dim_out, g.mat * f.mat};
}

// Tensor product of maps: interleaves vectorization indices so that
// (f (x) g)(x (x) y) = f(x) (x) g(y).
inline Superoperator superop_tensor(const Superoperator& f, const Superoperator& g) {
    const int a_in = f.dim_in, a_out = f.dim_out;
    const int b_in = g.dim_in, b_out = g.dim_out;
    const int d_in = a_in * b_in, d_out = a_out * b_out;
    ComplexMatrix mat = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_out) * d_out,
                                            static_cast<Eigen::Index>(d_in) * d_in);
    for (Eigen::Index rf = 0; rf < f.mat.rows(); ++rf) {
        const int i1 = static_cast<int>(rf) % a_out;
        const int j1 = static_cast<int>(rf) / a_out;
        for (Eigen::Index cf = 0; cf < f.mat.cols(); ++cf) {
            const cplx fv = f.mat(rf, cf);
            if (fv == cplx(0.0, 0.0)) continue;
            const int i1c = static_cast<int>(cf) % a_in;
            const int j1c = static_cast<int>(cf) / a_in;
            for (Eigen::Index rg = 0; rg < g.mat.rows(); ++rg) {
                const int i2 = static_cast<int>(rg) % b_out;
                const int j2 = static_cast<int>(rg) / b_out;
                const long row = (static_cast<long>(i1) * b_out + i2) +
                                 (static_cast<long>(j1) * b_out + j2) * d_out;
                for (Eigen::Index cg = 0; cg < g.mat.cols(); ++cg) {
                    const int i2c = static_cast<int>(cg) % b_in;
                    const int j2c = static_cast<int>(cg) / b_in;
                    const long col = (static_cast<long>(i1c) * b_in + i2c) +
                                     (static_cast<long>(j1c) * b_in + j2c) * d_in;
                    mat(row, col) += fv * g.mat(rg, cg);
                }
            }
        }
    }
    return {d_in, d_out, std::move(mat)};
}

inline ComplexMatrix superop_apply(const Superoperator& f, const ComplexMatrix& x) {
    if (x.rows() != f.dim_in || x.cols() != f.dim_in) {
        throw std::invalid_argument("superop_apply: operand dimension mismatch");
    }
    return devectorize(f.mat * vectorize(x), f.dim_out, f.dim_out);
}

// Hilbert-Schmidt adjoint map.
inline Superoperator superop_adjoint(const Superoperator& f) {
    return {f.dim_out, f.dim_in, f.mat.adjoint()};
}

// Trace preservation: the adjoint applied to identity returns identity.
inline bool is_trace_preserving(const Superoperator& f, double tol = kChannelTol) {
    const ComplexMatrix back = superop_apply(
        superop_adjoint(f), ComplexMatrix::Identity(f.dim_out, f.dim_out));
    return max_abs_diff(back, ComplexMatrix::Identity(f.dim_in, f.dim_in)) <= tol;
}

// ---------------------------------------------------------------------------
// Choi-Jamiolkowski representation

// J(Delta) = sum_{jk} Delta(|j><k|) (x) |j><k|, output-space factor first,
// index factor second. Unnormalized: the Choi of a channel has trace dim_a.
struct ChoiMatrix {
    int dim_a = 0;  // input space
    int dim_b = 0;  // output space
    ComplexMatrix mat;
};

inline ChoiMatrix choi_of(const Superoperator& delta) {
    const int da = delta.dim_in, db = delta.dim_out;
    ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(da) * db,
                                          static_cast<Eigen::Index>(da) * db);
    for (int jj = 0; jj < da; ++jj) {
        for (int kk = 0; kk < da; ++kk) {
            // Delta(|j><k|) is the devectorized column (j + k*da) of the map.
            const ComplexMatrix block =
                devectorize(delta.mat.col(jj + static_cast<long>(kk) * da), db, db);
            for (int m = 0; m < db; ++m) {
                for (int n = 0; n < db; ++n) {
                    j(static_cast<long>(m) * da + jj, static_cast<long>(n) * da + kk) =
                        block(m, n);
                }
            }
        }
    }
    return {da, db, std::move(j)};
}

inline Superoperator superop_from_choi(const ChoiMatrix& c) {
    const int da = c.dim_a, db = c.dim_b;
    ComplexMatrix mat(static_cast<Eigen::Index>(db) * db,
                      static_cast<Eigen::Index>(da) * da);
    for (int jj = 0; jj < da; ++jj) {
        for (int kk = 0; kk < da; ++kk) {
            for (int m = 0; m < db; ++m) {
                for (int n = 0; n < db; ++n) {
                    mat(m + static_cast<long>(n) * db, jj + static_cast<long>(kk) * da) =
                        c.mat(static_cast<long>(m) * da + jj,
                              static_cast<long>(n) * da + kk);
                }
            }
        }
    }
    return {da, db, std::move(mat)};
}

// Complete positivity and trace preservation, at the repo-wide tolerances.
inline bool is_cptp(const Superoperator& f, double eig_floor = kPsdFloor,
                    double tp_tol = kChannelTol) {
    if (!is_trace_preserving(f, tp_tol)) return false;
    const ChoiMatrix j = choi_of(f);
    return min_eigenvalue(j.mat) >= eig_floor;
}

}  // namespace mbqc
