#pragma once

// Self-contained dense semidefinite solver for the diamond-norm problem
// family:
//
//   Primal: maximize <J, W>  subject to  W <= rho (x) I_dB, Tr(rho) = 1,
//           W, rho PSD
//   Dual:   minimize ||Tr_B(Z)||_inf  subject to  Z >= J, Z PSD
//
// The optimum lambda of both problems equals half the diamond norm of the
// difference map whose Choi matrix is J. Internally the Choi matrix (given
// in output-first layout) is reordered so the reference (input-copy) factor
// comes first; rho lives on that factor and the dual partial trace runs over
// the output factor. Complex Hermitian data is lifted to the real symmetric
// embedding [[Re, -Im], [Im, Re]] (the A-side dimension doubles, the inner
// product doubles, and the trace normalization restores the scale), and a
// primal-dual path-following interior-point method with Mehrotra
// predictor-corrector steps and Nesterov-Todd scaling solves the embedded
// problem. Certificates are projected back to complex Hermitian form and
// re-verified by the callers.

#include "mbqc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbqc::sdp {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kMaxIterations = 200;
inline constexpr double kFractionToBoundary = 0.98;

// Complex Hermitian h -> real symmetric [[Re, -Im], [Im, Re]]; the spectrum
// is preserved with doubled multiplicity.
inline RealMatrix embed_real(const ComplexMatrix& h) {
    if (!is_hermitian(h, 1e-10)) {
        throw std::invalid_argument("embed_real: input is not Hermitian");
    }
    const Eigen::Index n = h.rows();
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.bottomRightCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    return out;
}

inline ComplexMatrix extract_complex(const RealMatrix& s) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0) {
        throw std::invalid_argument("extract_complex: bad shape");
    }
    const Eigen::Index n = s.rows() / 2;
    RealMatrix re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
    RealMatrix im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
    return re.cast<cplx>() + cplx(0, 1) * im.cast<cplx>();
}

// Reorders an output-first Choi matrix J in L(B (x) A) to the solver layout
// L(A (x) B) with the reference factor first.
inline ComplexMatrix reference_first_objective(const ChoiMatrix& j) {
    const int da = j.dim_a, db = j.dim_b;
    if (j.mat.rows() != static_cast<long>(da) * db || j.mat.rows() != j.mat.cols()) {
        throw std::invalid_argument("reference_first_objective: shape mismatch");
    }
    ComplexMatrix k(j.mat.rows(), j.mat.cols());
    for (int i = 0; i < da; ++i) {
        for (int m = 0; m < db; ++m) {
            for (int jj = 0; jj < da; ++jj) {
                for (int n = 0; n < db; ++n) {
                    k(static_cast<long>(i) * db + m, static_cast<long>(jj) * db + n) =
                        j.mat(static_cast<long>(m) * da + i,
                              static_cast<long>(n) * da + jj);
                }
            }
        }
    }
    return k;
}

struct SdpProblem {
    ChoiMatrix objective;  // J(Delta), Eq.-(A1) output-first layout
};

struct SdpSolution {
    double primal_value = 0.0;  // <J, W> at the returned W
    double dual_value = 0.0;    // ||Tr_B(Z_cert)||_inf
    double gap = 0.0;           // |primal - dual|
    ComplexMatrix W;            // reference-first layout, PSD, W <= rho (x) I
    DensityMatrix rho;
    ComplexMatrix Z_cert;       // reference-first layout, Z >= reordered J
    int iterations = 0;
};

namespace detail {

struct Blocks {
    RealMatrix w, p, s;  // order: W (n), rho (a), slack S (n)
};

inline double inner(const Blocks& x, const Blocks& z) {
    return (x.w.array() * z.w.array()).sum() + (x.p.array() * z.p.array()).sum() +
           (x.s.array() * z.s.array()).sum();
}

// Max alpha in (0, 1] with X + alpha * dX staying positive definite,
// shortened by the fraction-to-boundary factor.
inline double max_step(const RealMatrix& x, const RealMatrix& dx) {
    Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> es(dx, x,
                                                            Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, -kFractionToBoundary / lmin);
}

inline RealMatrix sym(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

// Nesterov-Todd scaling point G with G Z G = X.
inline RealMatrix nt_scaling(const RealMatrix& x, const RealMatrix& z) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> ez(z);
    const RealMatrix zh = ez.operatorSqrt();
    const RealMatrix zih = ez.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<RealMatrix> et(sym(zh * x * zh));
    return sym(zih * et.operatorSqrt() * zih);
}

inline RealMatrix inverse_psd(const RealMatrix& z) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> ez(z);
    return sym(ez.eigenvectors() *
               ez.eigenvalues().cwiseInverse().asDiagonal() *
               ez.eigenvectors().transpose());
}

// Symplectic-conjugation average: projects onto the image of the complex
// embedding (exact for embedded data, cleans roundoff drift).
inline RealMatrix embed_project(const RealMatrix& m) {
    const Eigen::Index h = m.rows() / 2;
    RealMatrix out(m.rows(), m.cols());
    out.topLeftCorner(h, h) = 0.5 * (m.topLeftCorner(h, h) + m.bottomRightCorner(h, h));
    out.bottomRightCorner(h, h) = out.topLeftCorner(h, h);
    out.topRightCorner(h, h) = 0.5 * (m.topRightCorner(h, h) - m.bottomLeftCorner(h, h));
    out.bottomLeftCorner(h, h) = -out.topRightCorner(h, h);
    return sym(out);
}

// The diamond SDP in standard conic form. Variables X = diag(W, rho, S) with
// one linking constraint per symmetric entry of the slack block,
//     W_pq + S_pq - (rho (x) I)_pq = 0,
// plus Tr(rho) = 1. Constraint matrices touch at most three entries, so the
// Schur complement assembles in O(m^2) scalar work.
class DiamondIpm {
  public:
    DiamondIpm(RealMatrix j_embedded, int a, int b)
        : j_(std::move(j_embedded)), a_(a), b_(b), n_(a * b) {
        ci_.reserve(n_ * (n_ + 1) / 2);
        for (int q = 0; q < n_; ++q) {
            for (int p = 0; p <= q; ++p) {
                cp_.push_back(p);
                cq_.push_back(q);
                ci_.push_back(p / b_);
                cj_.push_back(q / b_);
                cdelta_.push_back(p % b_ == q % b_);
            }
        }
        m_ = static_cast<int>(cp_.size()) + 1;
    }

    struct Result {
        Blocks x, z;
        double y_tr = 0.0;
        int iterations = 0;
    };

    Result solve(double tol) {
        Blocks x, z;
        Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);

        // Strictly feasible interior start on both sides: W, S, rho are
        // scaled identities; the dual slack is the objective shifted PSD.
        const double eps = 0.5 / a_;
        x.w = eps * RealMatrix::Identity(n_, n_);
        x.s = eps * RealMatrix::Identity(n_, n_);
        x.p = (1.0 / a_) * RealMatrix::Identity(a_, a_);

        Eigen::SelfAdjointEigenSolver<RealMatrix> ej(j_, Eigen::EigenvaluesOnly);
        const double shift = std::max(0.0, -ej.eigenvalues().minCoeff()) + 1.0 +
                             0.1 * j_.cwiseAbs().maxCoeff();
        z.s = j_ + shift * RealMatrix::Identity(n_, n_);
        const RealMatrix tbz = trace_out_b(z.s);
        Eigen::SelfAdjointEigenSolver<RealMatrix> et(tbz, Eigen::EigenvaluesOnly);
        const double ytr0 = -(et.eigenvalues().maxCoeff() + 1.0);
        set_y_from(y, -z.s, ytr0);
        z.w = shift * RealMatrix::Identity(n_, n_);
        z.p = sym(-tbz - ytr0 * RealMatrix::Identity(a_, a_));

        const double nu = 2.0 * n_ + a_;
        std::vector<std::string> history;
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            // Residuals (zero at the start by construction; tracked anyway).
            Eigen::VectorXd rp = primal_residual(x);
            Blocks rd = dual_residual(y, z);
            const double mu = inner(x, z) / nu;
            const double pobj = -(j_.array() * x.w.array()).sum();
            const double dobj = y(m_ - 1);
            const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
            const double pinf = rp.cwiseAbs().maxCoeff();
            const double dinf = std::max({rd.w.cwiseAbs().maxCoeff(),
                                          rd.p.cwiseAbs().maxCoeff(),
                                          rd.s.cwiseAbs().maxCoeff()});
            {
                std::ostringstream line;
                line << "iter " << iter << ": mu=" << mu << " gap=" << gap
                     << " pinf=" << pinf << " dinf=" << dinf;
                history.push_back(line.str());
            }
            if (gap < tol && mu < tol && pinf < tol && dinf < tol) {
                return {x, z, y(m_ - 1), iter};
            }

            Blocks g;
            g.w = nt_scaling(x.w, z.w);
            g.p = nt_scaling(x.p, z.p);
            g.s = nt_scaling(x.s, z.s);
            Blocks zinv;
            zinv.w = inverse_psd(z.w);
            zinv.p = inverse_psd(z.p);
            zinv.s = inverse_psd(z.s);

            RealMatrix schur = build_schur(g);
            Eigen::LLT<RealMatrix> llt(schur);
            if (llt.info() != Eigen::Success) {
                schur += 1e-13 * schur.trace() / m_ * RealMatrix::Identity(m_, m_);
                llt.compute(schur);
                if (llt.info() != Eigen::Success) {
                    fail("interior-point Schur factorization failed", history);
                }
            }

            // Predictor (affine scaling).
            Blocks rc{-x.w, -x.p, -x.s};
            Eigen::VectorXd dy;
            Blocks dx, dz;
            newton_step(llt, g, rp, rd, rc, dy, dx, dz);
            const double ap = step_length(x, dx);
            const double ad = step_length(z, dz);
            Blocks xa{x.w + ap * dx.w, x.p + ap * dx.p, x.s + ap * dx.s};
            Blocks za{z.w + ad * dz.w, z.p + ad * dz.p, z.s + ad * dz.s};
            const double mu_aff = inner(xa, za) / nu;
            double sigma = std::pow(mu_aff / mu, 3.0);
            sigma = std::clamp(sigma, 1e-8, 1.0);

            // Corrector with the second-order Mehrotra term.
            rc.w = sigma * mu * zinv.w - x.w - sym(dx.w * dz.w * zinv.w);
            rc.p = sigma * mu * zinv.p - x.p - sym(dx.p * dz.p * zinv.p);
            rc.s = sigma * mu * zinv.s - x.s - sym(dx.s * dz.s * zinv.s);
            newton_step(llt, g, rp, rd, rc, dy, dx, dz);
            const double ap2 = step_length(x, dx);
            const double ad2 = step_length(z, dz);

            x.w = sym(x.w + ap2 * dx.w);
            x.p = sym(x.p + ap2 * dx.p);
            x.s = sym(x.s + ap2 * dx.s);
            y += ad2 * dy;
            z.w = sym(z.w + ad2 * dz.w);
            z.p = sym(z.p + ad2 * dz.p);
            z.s = sym(z.s + ad2 * dz.s);

            if (ap2 < 1e-10 && ad2 < 1e-10) {
                fail("interior-point step collapsed before convergence", history);
            }
        }
        std::vector<std::string> history_tail;
        fail("interior-point iteration cap exceeded", history);
        return {};  // unreachable
    }

    RealMatrix trace_out_b(const RealMatrix& m) const {
        RealMatrix out = RealMatrix::Zero(a_, a_);
        for (int i = 0; i < a_; ++i) {
            for (int j = 0; j < a_; ++j) {
                double acc = 0.0;
                for (int beta = 0; beta < b_; ++beta) {
                    acc += m(i * b_ + beta, j * b_ + beta);
                }
                out(i, j) = acc;
            }
        }
        return out;
    }

  private:
    [[noreturn]] void fail(const std::string& what,
                           const std::vector<std::string>& history) const {
        std::ostringstream msg;
        msg << "solve_diamond: " << what << "\n";
        const size_t start = history.size() > 12 ? history.size() - 12 : 0;
        for (size_t i = start; i < history.size(); ++i) msg << history[i] << "\n";
        throw std::runtime_error(msg.str());
    }

    // y layout: one entry per (p <= q) pair, then the trace multiplier.
    // A*(y) places y_k on the diagonal and y_k / 2 on symmetric off-diagonal
    // entries of the W and S blocks.
    void set_y_from(Eigen::VectorXd& y, const RealMatrix& y_mat, double y_tr) const {
        for (size_t k = 0; k < cp_.size(); ++k) {
            y(k) = cp_[k] == cq_[k] ? y_mat(cp_[k], cq_[k])
                                    : 2.0 * y_mat(cp_[k], cq_[k]);
        }
        y(m_ - 1) = y_tr;
    }

    Eigen::VectorXd primal_residual(const Blocks& x) const {
        Eigen::VectorXd rp(m_);
        for (size_t k = 0; k < cp_.size(); ++k) {
            const double lhs = x.w(cp_[k], cq_[k]) + x.s(cp_[k], cq_[k]) -
                               (cdelta_[k] ? x.p(ci_[k], cj_[k]) : 0.0);
            rp(k) = -lhs;
        }
        rp(m_ - 1) = 1.0 - x.p.trace();
        return rp;
    }

    Blocks adjoint(const Eigen::VectorXd& y) const {
        Blocks out;
        out.w = RealMatrix::Zero(n_, n_);
        out.p = RealMatrix::Zero(a_, a_);
        out.s = RealMatrix::Zero(n_, n_);
        for (size_t k = 0; k < cp_.size(); ++k) {
            const int p = cp_[k], q = cq_[k];
            if (p == q) {
                out.w(p, p) += y(k);
                out.s(p, p) += y(k);
                if (cdelta_[k]) out.p(ci_[k], ci_[k]) -= y(k);
            } else {
                out.w(p, q) += 0.5 * y(k);
                out.w(q, p) += 0.5 * y(k);
                out.s(p, q) += 0.5 * y(k);
                out.s(q, p) += 0.5 * y(k);
                if (cdelta_[k]) {
                    out.p(ci_[k], cj_[k]) -= 0.5 * y(k);
                    out.p(cj_[k], ci_[k]) -= 0.5 * y(k);
                }
            }
        }
        out.p += y(m_ - 1) * RealMatrix::Identity(a_, a_);
        return out;
    }

    Blocks dual_residual(const Eigen::VectorXd& y, const Blocks& z) const {
        Blocks ay = adjoint(y);
        Blocks rd;
        rd.w = -j_ - z.w - ay.w;  // C_W = -J in min form
        rd.p = -z.p - ay.p;
        rd.s = -z.s - ay.s;
        return rd;
    }

    Eigen::VectorXd apply_a(const Blocks& v) const {
        Eigen::VectorXd out(m_);
        for (size_t k = 0; k < cp_.size(); ++k) {
            out(k) = v.w(cp_[k], cq_[k]) + v.s(cp_[k], cq_[k]) -
                     (cdelta_[k] ? v.p(ci_[k], cj_[k]) : 0.0);
        }
        out(m_ - 1) = v.p.trace();
        return out;
    }

    // M_kl = <A_k, G A_l G> over the three blocks; the symmetric-unit pair
    // formula is f = (G(q,r) G(p,s) + G(q,s) G(p,r)) / 2 for every p<=q,
    // r<=s combination.
    RealMatrix build_schur(const Blocks& g) const {
        const auto f = [](const RealMatrix& gm, int p, int q, int r, int s) {
            return 0.5 * (gm(q, r) * gm(p, s) + gm(q, s) * gm(p, r));
        };
        RealMatrix schur(m_, m_);
        const size_t mc = cp_.size();
        const RealMatrix gp2 = g.p * g.p;
        for (size_t k = 0; k < mc; ++k) {
            for (size_t l = k; l < mc; ++l) {
                double v = f(g.w, cp_[k], cq_[k], cp_[l], cq_[l]) +
                           f(g.s, cp_[k], cq_[k], cp_[l], cq_[l]);
                if (cdelta_[k] && cdelta_[l]) {
                    v += f(g.p, ci_[k], cj_[k], ci_[l], cj_[l]);
                }
                schur(k, l) = v;
                schur(l, k) = v;
            }
            const double vtr = cdelta_[k] ? -gp2(ci_[k], cj_[k]) : 0.0;
            schur(k, m_ - 1) = vtr;
            schur(m_ - 1, k) = vtr;
        }
        schur(m_ - 1, m_ - 1) = gp2.trace();
        return schur;
    }

    void newton_step(const Eigen::LLT<RealMatrix>& llt, const Blocks& g,
                     const Eigen::VectorXd& rp, const Blocks& rd, const Blocks& rc,
                     Eigen::VectorXd& dy, Blocks& dx, Blocks& dz) const {
        Blocks v;
        v.w = rc.w - sym(g.w * rd.w * g.w);
        v.p = rc.p - sym(g.p * rd.p * g.p);
        v.s = rc.s - sym(g.s * rd.s * g.s);
        dy = llt.solve(rp - apply_a(v));
        const Blocks ady = adjoint(dy);
        dz.w = rd.w - ady.w;
        dz.p = rd.p - ady.p;
        dz.s = rd.s - ady.s;
        dx.w = v.w + sym(g.w * ady.w * g.w);
        dx.p = v.p + sym(g.p * ady.p * g.p);
        dx.s = v.s + sym(g.s * ady.s * g.s);
    }

    static double step_length(const Blocks& x, const Blocks& dx) {
        return std::min({max_step(x.w, dx.w), max_step(x.p, dx.p),
                         max_step(x.s, dx.s)});
    }

    RealMatrix j_;
    int a_, b_, n_, m_;
    std::vector<int> cp_, cq_, ci_, cj_;
    std::vector<bool> cdelta_;
};

}  // namespace detail

inline SdpSolution solve_diamond(const SdpProblem& problem, double tol = kDefaultTol) {
    if (tol <= 0.0) throw std::invalid_argument("solve_diamond: tol must be > 0");
    const ChoiMatrix& j = problem.objective;
    if (!is_hermitian(j.mat, 1e-10)) {
        throw std::invalid_argument("solve_diamond: objective is not Hermitian");
    }
    const int da = j.dim_a, db = j.dim_b;
    const ComplexMatrix k = reference_first_objective(j);

    SdpSolution out;
    if (k.cwiseAbs().maxCoeff() < 1e-15) {
        // Exact zero objective: the optimum is zero with trivial certificates.
        out.W = ComplexMatrix::Zero(k.rows(), k.cols());
        out.Z_cert = ComplexMatrix::Zero(k.rows(), k.cols());
        out.rho = DensityMatrix(ComplexMatrix::Identity(da, da) / da);
        return out;
    }

    detail::DiamondIpm ipm(embed_real(k), 2 * da, db);
    const auto res = ipm.solve(tol);

    const RealMatrix w_hat = detail::embed_project(res.x.w);
    const RealMatrix p_hat = detail::embed_project(res.x.p);
    const RealMatrix z_hat = detail::embed_project(res.z.s);
    out.W = 2.0 * extract_complex(w_hat);
    ComplexMatrix rho = 2.0 * extract_complex(p_hat);
    rho /= rho.trace().real();
    out.rho = DensityMatrix(0.5 * (rho + rho.adjoint()));
    out.Z_cert = extract_complex(z_hat);
    out.iterations = res.iterations;

    out.primal_value = (k.adjoint() * out.W).trace().real();
    const ComplexMatrix tbz = partial_trace(out.Z_cert, {da, db}, {0});
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (tbz + tbz.adjoint())), Eigen::EigenvaluesOnly);
    out.dual_value = es.eigenvalues().maxCoeff();
    out.gap = std::abs(out.primal_value - out.dual_value);
    return out;
}

}  // namespace mbqc::sdp
