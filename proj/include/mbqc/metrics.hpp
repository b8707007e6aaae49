#pragma once

// Figures of merit for (ideal, noisy) channel pairs: average gate infidelity
// over the Pauli operator basis, and the diamond distance computed by the
// semidefinite program on the Choi matrix of the difference map, certified
// by a pure-state lower bound.

#include "mbqc/channels.hpp"
#include "mbqc/linalg.hpp"
#include "mbqc/sdp.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mbqc {

struct MetricResult {
    double gate_infidelity = 0.0;
    double diamond_distance = 0.0;
    double diamond_gap = 0.0;   // SDP duality gap
    double lower_bound = 0.0;   // sampling certificate, never the reported value
};

inline constexpr int kLowerBoundSamples = 2000;
inline constexpr std::uint64_t kLowerBoundSeed = 0x6d62716373696d75ULL;

// Pauli strings in lexicographic order (I, X, Y, Z)^(x) n.
inline std::vector<ComplexMatrix> pauli_basis(int dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("pauli_basis: dimension must be a power of 2");
    }
    std::vector<ComplexMatrix> singles{pauli_i(), pauli_x(), pauli_y(), pauli_z()};
    std::vector<ComplexMatrix> basis{ComplexMatrix::Identity(1, 1)};
    for (int d = 1; d < dim; d *= 2) {
        std::vector<ComplexMatrix> next;
        next.reserve(basis.size() * 4);
        for (const auto& b : basis) {
            for (const auto& s : singles) next.push_back(kron(b, s));
        }
        basis = std::move(next);
    }
    return basis;
}

// 1 - [1/(d+1) + sum_j Tr(F(Uj^dag) E(Uj)) / (d^2 (d+1))] over the Pauli
// operator basis {Uj}; maps extend linearly to non-Hermitian operators via
// their superoperator representation.
inline double gate_infidelity(const Superoperator& ideal, const Superoperator& noisy,
                              int d) {
    if (ideal.dim_in != d || ideal.dim_out != d || noisy.dim_in != d ||
        noisy.dim_out != d) {
        throw std::invalid_argument("gate_infidelity: dimension mismatch");
    }
    cplx sum = 0.0;
    for (const auto& u : pauli_basis(d)) {
        const ComplexMatrix fu = superop_apply(ideal, u.adjoint());
        const ComplexMatrix eu = superop_apply(noisy, u);
        sum += (fu * eu).trace();
    }
    if (std::abs(sum.imag()) > 1e-10) {
        throw std::runtime_error("gate_infidelity: non-negligible imaginary residue");
    }
    const double dd = static_cast<double>(d);
    return 1.0 - (1.0 / (dd + 1.0) + sum.real() / (dd * dd * (dd + 1.0)));
}

// Entanglement-fidelity route to the same quantity, via the normalized
// cross-Choi matrix of adjoint(ideal) o noisy: an internal consistency
// oracle for Eq.-style Pauli summation.
inline double gate_infidelity_via_choi(const Superoperator& ideal,
                                       const Superoperator& noisy, int d) {
    const Superoperator cross = superop_compose(superop_adjoint(ideal), noisy);
    const ChoiMatrix j = choi_of(cross);
    ComplexVector phi = ComplexVector::Zero(static_cast<long>(d) * d);
    for (int i = 0; i < d; ++i) phi(static_cast<long>(i) * d + i) = 1.0 / std::sqrt(d);
    const double fe = (phi.adjoint() * j.mat * phi).value().real() / d;
    const double dd = static_cast<double>(d);
    return 1.0 - (dd * fe + 1.0) / (dd + 1.0);
}

namespace detail {

inline ComplexVector haar_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

// Monotone ascent for f(psi) = 0.5 ||(Psi (x) I)(psi psi^dag)||_1: alternate
// S = sign(M(psi)) and psi = top eigenvector of T^dag(S). Every iterate is a
// valid pure state, so the running value stays a true lower bound.
inline double polish_lower_bound(const Superoperator& t, ComplexVector psi,
                                 int max_iters) {
    double value = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const ComplexMatrix m = superop_apply(t, psi * psi.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> em(
            ComplexMatrix(0.5 * (m + m.adjoint())));
        const double f = 0.5 * em.eigenvalues().cwiseAbs().sum();
        if (f <= value + 1e-13) {
            value = std::max(value, f);
            break;
        }
        value = f;
        ComplexMatrix sign = ComplexMatrix::Zero(m.rows(), m.cols());
        for (Eigen::Index i = 0; i < em.eigenvalues().size(); ++i) {
            const double s = em.eigenvalues()(i) >= 0.0 ? 1.0 : -1.0;
            sign += s * em.eigenvectors().col(i) * em.eigenvectors().col(i).adjoint();
        }
        const ComplexMatrix back = superop_apply(superop_adjoint(t), sign);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eb(
            ComplexMatrix(0.5 * (back + back.adjoint())));
        psi = eb.eigenvectors().col(eb.eigenvectors().cols() - 1);
    }
    return value;
}

inline Superoperator difference_with_reference(const Superoperator& ideal,
                                               const Superoperator& noisy) {
    if (ideal.dim_in != noisy.dim_in || ideal.dim_out != noisy.dim_out) {
        throw std::invalid_argument("diamond metrics: channel dimension mismatch");
    }
    Superoperator psi{ideal.dim_in, ideal.dim_out, ideal.mat - noisy.mat};
    return superop_tensor(psi, superop_identity(ideal.dim_in));
}

}  // namespace detail

// Max over Haar-random pure states on the doubled space of
// 0.5 * trace_norm((Psi (x) I)(psi)), each start refined by a deterministic
// trace-norm ascent. Deterministic given the seed; nondecreasing in the
// sample count for a fixed stream.
inline double diamond_lower_bound(const Superoperator& ideal, const Superoperator& noisy,
                                  int samples, std::uint64_t seed,
                                  int refine_iters = 40) {
    if (samples < 1) {
        throw std::invalid_argument("diamond_lower_bound: samples must be >= 1");
    }
    const Superoperator t = detail::difference_with_reference(ideal, noisy);
    if (t.mat.cwiseAbs().maxCoeff() < 1e-15) return 0.0;
    std::mt19937_64 rng(seed);
    const int dim = ideal.dim_in * ideal.dim_in;
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const ComplexVector psi = detail::haar_state(dim, rng);
        double f;
        if (refine_iters > 0) {
            f = detail::polish_lower_bound(t, psi, refine_iters);
        } else {
            f = 0.5 * trace_norm(superop_apply(t, psi * psi.adjoint()));
        }
        best = std::max(best, f);
    }
    return best;
}

// Diamond distance of ideal - noisy via the primal/dual SDP on the Choi
// matrix, normalized so that D(E, E) = 0 and D(identity, X-unitary) = 1
// (the SDP optimum lambda hits both anchors directly).
inline MetricResult diamond_distance(const Superoperator& ideal,
                                     const Superoperator& noisy,
                                     int samples = kLowerBoundSamples,
                                     std::uint64_t seed = kLowerBoundSeed,
                                     double tol = sdp::kDefaultTol) {
    if (ideal.dim_in != noisy.dim_in || ideal.dim_out != noisy.dim_out) {
        throw std::invalid_argument("diamond_distance: channel dimension mismatch");
    }
    MetricResult res;
    res.gate_infidelity = gate_infidelity(ideal, noisy, ideal.dim_in);
    const Superoperator psi{ideal.dim_in, ideal.dim_out, ideal.mat - noisy.mat};
    const sdp::SdpSolution sol = sdp::solve_diamond({choi_of(psi)}, tol);
    res.diamond_distance = 0.5 * (sol.primal_value + sol.dual_value);
    res.diamond_gap = sol.gap;
    res.lower_bound = diamond_lower_bound(ideal, noisy, samples, seed);
    return res;
}

// ---------------------------------------------------------------------------
// Closed-form reference expressions

enum class GateKind { uz, cx };

// The eight closed-form G_seq - G_stan expressions, evaluated verbatim.
// The depolarizing rows are identical across the two complementation
// scenarios; the misfiring rows differ.
inline double eval_table_formula(GateKind gate, EntanglerModel model,
                                 Scenario scenario, double eta, double strength,
                                 double alpha) {
    if (eta < 0.0 || eta > 1.0 || strength < 0.0 || strength > 1.0) {
        throw std::invalid_argument("eval_table_formula: parameters outside [0, 1]");
    }
    const double p = strength;
    const double s = strength;
    const double ca = std::cos(alpha);
    if (gate == GateKind::uz) {
        if (model == EntanglerModel::depolarizing) {
            return (1.0 / 3.0) * eta * (p - 1.0) * ca * ca;
        }
        if (scenario == Scenario::perfect) {
            return (1.0 / 6.0) *
                   (eta * s - eta - s + eta * (s - 1.0) * std::cos(2.0 * alpha));
        }
        return (1.0 / 6.0) * (s + eta * (s - 2.0)) * ca * ca;
    }
    if (model == EntanglerModel::depolarizing) {
        const double q = 4.0 * eta * (eta - 2.0);
        return (1.0 / 20.0) * (p - 1.0) * (p - 1.0) * (q + p * (1.0 - q));
    }
    if (scenario == Scenario::perfect) {
        return (1.0 / 10.0) *
               (s * (s * (6.0 - s) - 2.0) -
                2.0 * eta * (2.0 - s * (6.0 - s * (7.0 - 2.0 * s))) -
                2.0 * eta * eta * (s - 1.0) * (s - 1.0) * (s - 1.0));
    }
    return (1.0 / 20.0) *
           (2.0 * s * (5.0 + s * (7.0 * s - 9.0)) -
            eta * (9.0 * s * s * s - 14.0 * s + 8.0) +
            2.0 * eta * eta * (s - 1.0) * (3.0 * s - 2.0));
}

// Zero level curve of the CX depolarizing difference: p = 4(2eta - eta^2) /
// (1 + 8 eta - 4 eta^2).
inline double cx_depolarizing_zero_curve(double eta) {
    return 4.0 * (2.0 * eta - eta * eta) / (1.0 + 8.0 * eta - 4.0 * eta * eta);
}

// Literal closed-form cavity infidelity G = (1/48) e^{-gamma^2} (a0 + a1 s).
// As printed this evaluates to 1 at zero noise, which conflicts with the
// zero-noise simulation (G = 0); callers report both values side by side and
// flag the discrepancy rather than reconciling it.
inline double eval_cavity_formula(double eta, double s, double gamma) {
    const double g2 = gamma * gamma;
    const double a0 = 4.0 * (2.0 + 6.0 * std::exp(g2) -
                             std::exp(g2 / 2.0) * (eta - 4.0) - eta);
    const double a1 = 4.0 * std::exp(g2 / 2.0) * (eta - 4.0) + 4.0 * (eta - 2.0) -
                      std::exp(g2) * (5.0 + eta);
    return (1.0 / 48.0) * std::exp(-g2) * (a0 + a1 * s);
}

}  // namespace mbqc
