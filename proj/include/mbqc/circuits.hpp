#pragma once

// Logical CPTP channels realized by the standard and sequential
// gate-teleportation circuits, with measurement branching and ideal
// feed-forward corrections.
//
// Qubit ordering is fixed as (registers first, ancillae appended in creation
// order); qubit 0 is the most significant tensor factor. Measurements,
// basis-change gates for measurement, and corrections are ideal in all
// models; noise enters only through ancilla preparation and the entangling
// steps.

#include "mbqc/channels.hpp"
#include "mbqc/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace mbqc {

// One measurement-outcome branch: a completely positive (generally
// trace-decreasing) piece of the full channel.
struct BranchMap {
    std::string label;
    Superoperator map;
};

struct LogicalChannel {
    Superoperator ideal;
    Superoperator noisy;
    std::string label;
    std::vector<BranchMap> branches;  // noisy equals the branch sum
};

namespace detail {

// Embed an operator acting on `targets` (in the given order; targets[0] is
// the most significant factor of `op`) into an n-qubit space.
inline ComplexMatrix embed_matrix(const ComplexMatrix& op,
                                  const std::vector<int>& targets, int n) {
    const int k = static_cast<int>(targets.size());
    const long dk = 1L << k;
    const long dn = 1L << n;
    if (op.rows() != dk || op.cols() != dk) {
        throw std::invalid_argument("embed_matrix: operator/target size mismatch");
    }
    std::vector<bool> is_target(n, false);
    for (int t : targets) {
        if (t < 0 || t >= n || is_target[t]) {
            throw std::invalid_argument("embed_matrix: bad target list");
        }
        is_target[t] = true;
    }
    auto target_bits = [&](long idx) {
        long r = 0;
        for (int t : targets) r = (r << 1) | ((idx >> (n - 1 - t)) & 1L);
        return r;
    };
    auto rest_bits = [&](long idx) {
        long r = 0;
        for (int q = 0; q < n; ++q) {
            if (!is_target[q]) r = (r << 1) | ((idx >> (n - 1 - q)) & 1L);
        }
        return r;
    };
    ComplexMatrix out = ComplexMatrix::Zero(dn, dn);
    for (long row = 0; row < dn; ++row) {
        const long tr = target_bits(row);
        const long rr = rest_bits(row);
        for (long col = 0; col < dn; ++col) {
            if (rest_bits(col) != rr) continue;
            out(row, col) = op(tr, target_bits(col));
        }
    }
    return out;
}

// Builds the superoperator of a circuit incrementally. Copyable, so a shared
// prefix can be forked at measurement branch points.
class ChannelAccumulator {
  public:
    explicit ChannelAccumulator(int logical_qubits)
        : nq_(logical_qubits), op_(superop_identity(1 << logical_qubits)) {}

    int qubits() const { return nq_; }
    const Superoperator& op() const { return op_; }

    // Kraus operators given on the target qubits; embedded and composed.
    void apply_kraus(const std::vector<ComplexMatrix>& ops,
                     const std::vector<int>& targets) {
        std::vector<ComplexMatrix> full;
        full.reserve(ops.size());
        for (const auto& k : ops) full.push_back(embed_matrix(k, targets, nq_));
        op_ = superop_compose(detail::superop_from_kraus_ops(full), op_);
    }

    void apply_unitary(const ComplexMatrix& u, const std::vector<int>& targets) {
        apply_kraus({u}, targets);
    }

    // Adds a fresh qubit in state sigma at the end of the register order.
    void append_ancilla(const DensityMatrix& sigma) {
        const int d = 1 << nq_;
        const int dd = 2 * d;
        ComplexMatrix mat = ComplexMatrix::Zero(static_cast<long>(dd) * dd,
                                                static_cast<long>(d) * d);
        for (int i1 = 0; i1 < d; ++i1) {
            for (int j1 = 0; j1 < d; ++j1) {
                for (int i2 = 0; i2 < 2; ++i2) {
                    for (int j2 = 0; j2 < 2; ++j2) {
                        mat((i1 * 2 + i2) + static_cast<long>(j1 * 2 + j2) * dd,
                            i1 + static_cast<long>(j1) * d) = sigma.mat(i2, j2);
                    }
                }
            }
        }
        op_ = superop_compose(Superoperator{d, dd, std::move(mat)}, op_);
        ++nq_;
    }

    // Projects `qubit` onto computational `outcome` after an ideal
    // basis-change unitary on that qubit, then removes it. The result is a CP
    // trace-decreasing map; summing over outcomes restores trace.
    void measure_remove(int qubit, int outcome, const ComplexMatrix& basis_change) {
        const int n = nq_;
        const long dn = 1L << n;
        const long dm = dn >> 1;
        const int shift = n - 1 - qubit;
        ComplexMatrix k = ComplexMatrix::Zero(dm, dn);
        for (long col = 0; col < dn; ++col) {
            const long bq = (col >> shift) & 1L;
            const long low = col & ((1L << shift) - 1L);
            const long high = col >> (shift + 1);
            k((high << shift) | low, col) += basis_change(outcome, bq);
        }
        op_ = superop_compose(detail::superop_from_kraus_ops({k}), op_);
        --nq_;
    }

    void measure_remove(int qubit, int outcome) {
        measure_remove(qubit, outcome, ComplexMatrix::Identity(2, 2));
    }

  private:
    int nq_;
    Superoperator op_;
};

// One noisy application of a 2-qubit entangling gate, per the binary
// stochastic models: depolarizing replaces the gate's output on its own
// 2-qubit support with I/4; misfiring leaves the input fully untouched.
inline void apply_entangler(ChannelAccumulator& acc, const ComplexMatrix& gate,
                            EntanglerModel model, double strength, int qa, int qb) {
    if (strength < 0.0 || strength > 1.0) {
        throw std::invalid_argument("apply_entangler: strength outside [0, 1]");
    }
    const std::vector<int> pair{qa, qb};
    if (model == EntanglerModel::none || strength == 0.0) {
        acc.apply_unitary(gate, pair);
        return;
    }
    std::vector<ComplexMatrix> ops;
    ops.push_back(std::sqrt(1.0 - strength) * gate);
    if (model == EntanglerModel::depolarizing) {
        const double w = std::sqrt(strength) / 2.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                ComplexMatrix e = ComplexMatrix::Zero(4, 4);
                e(i, j) = w;
                ops.push_back(std::move(e));
            }
        }
    } else {
        ops.push_back(std::sqrt(strength) * ComplexMatrix::Identity(4, 4));
    }
    acc.apply_kraus(ops, pair);
}

// Sequential entangling step on (register, ancilla). Perfect complementation:
// noisy CZ followed by ideal H (x) H. Imperfect: the complemented-CZ gate
// (H (x) H) CZ is one noisy block.
inline void entangle_sequential(ChannelAccumulator& acc, const NoiseSpec& noise,
                                int reg, int anc) {
    if (noise.scenario == Scenario::perfect) {
        apply_entangler(acc, cz_gate(), noise.model, noise.strength, reg, anc);
        acc.apply_unitary(hadamard(), {reg});
        acc.apply_unitary(hadamard(), {anc});
    } else {
        apply_entangler(acc, complemented_cz(), noise.model, noise.strength, reg, anc);
    }
}

// Cavity-QED sequential entangler: misfiring CZ, Raman-driven complementation
// Hadamard on the (atomic) register, ideal Hadamard on the (photonic) ancilla.
inline void entangle_cavity(ChannelAccumulator& acc, double s,
                            const KrausChannel& raman_h, int reg, int anc) {
    apply_entangler(acc, cz_gate(), EntanglerModel::misfiring, s, reg, anc);
    acc.apply_kraus(raman_h.ops, {reg});
    acc.apply_unitary(hadamard(), {anc});
}

inline Superoperator unitary_superop(const ComplexMatrix& u) {
    return superop_from_kraus(unitary_channel(u));
}

inline std::string outcome_label(const char* name, int value) {
    return std::string(name) + "=" + std::to_string(value);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-qubit teleportation circuits, logical target H Uz(alpha)

// Standard gate teleportation: input node entangled with a fresh ancilla via
// a noisy CZ; the input node is measured in the H Uz(alpha) basis and the
// operated state appears on the ancilla up to the by-product X^k.
inline LogicalChannel standard_uz(double alpha, const NoiseSpec& noise) {
    noise.validate();
    const ComplexMatrix v = hadamard() * rotation(Axis::Z, alpha);

    detail::ChannelAccumulator prefix(1);
    prefix.append_ancilla(prepare_plus(noise.eta));
    detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 0, 1);
    prefix.apply_unitary(v, {0});

    LogicalChannel out;
    out.label = "standard_uz";
    out.ideal = detail::unitary_superop(v);
    out.noisy = superop_zero(2, 2);
    for (int k = 0; k < 2; ++k) {
        detail::ChannelAccumulator b = prefix;
        b.measure_remove(0, k);
        if (k) b.apply_unitary(pauli_x(), {0});
        out.noisy.mat += b.op().mat;
        out.branches.push_back({detail::outcome_label("k", k), b.op()});
    }
    return out;
}

// Sequential gate teleportation: the gate only is teleported onto the input
// register itself; the ancilla is measured, the register never is.
inline LogicalChannel sequential_uz(double alpha, const NoiseSpec& noise) {
    noise.validate();
    const ComplexMatrix v = hadamard() * rotation(Axis::Z, alpha);

    detail::ChannelAccumulator prefix(1);
    prefix.append_ancilla(prepare_plus(noise.eta));
    detail::entangle_sequential(prefix, noise, 0, 1);
    prefix.apply_unitary(v, {1});

    LogicalChannel out;
    out.label = "sequential_uz";
    out.ideal = detail::unitary_superop(v);
    out.noisy = superop_zero(2, 2);
    for (int k = 0; k < 2; ++k) {
        detail::ChannelAccumulator b = prefix;
        b.measure_remove(1, k);
        if (k) b.apply_unitary(pauli_x(), {0});
        out.noisy.mat += b.op().mat;
        out.branches.push_back({detail::outcome_label("k", k), b.op()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// CX teleportation circuits, logical target CX(control, target)

// Standard MBQC CX over the 4-node cluster (c, t, a1, a2): three noisy CZ
// gates with supports (t,a1), (c,a1), (a1,a2); X-basis measurements on t and
// a1 give outcomes p, q; corrections Z^p on the control output (c) and
// X^q Z^p on the target output (a2).
inline LogicalChannel standard_cx(const NoiseSpec& noise) {
    noise.validate();

    detail::ChannelAccumulator prefix(2);  // qubits: c=0, t=1
    prefix.append_ancilla(prepare_plus(noise.eta));  // a1 = 2
    prefix.append_ancilla(prepare_plus(noise.eta));  // a2 = 3
    detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 1, 2);
    detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 0, 2);
    detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 2, 3);

    LogicalChannel out;
    out.label = "standard_cx";
    out.ideal = detail::unitary_superop(cx_gate());
    out.noisy = superop_zero(4, 4);
    const ComplexMatrix h = hadamard();
    for (int p = 0; p < 2; ++p) {
        detail::ChannelAccumulator bp = prefix;
        bp.measure_remove(1, p, h);  // X-measure t -> remaining (c, a1, a2)
        for (int q = 0; q < 2; ++q) {
            detail::ChannelAccumulator bq = bp;
            bq.measure_remove(1, q, h);  // X-measure a1 -> remaining (c, a2)
            if (p) {
                bq.apply_unitary(pauli_z(), {0});
                bq.apply_unitary(pauli_z(), {1});
            }
            if (q) bq.apply_unitary(pauli_x(), {1});
            out.noisy.mat += bq.op().mat;
            out.branches.push_back({detail::outcome_label("p", p) + "," +
                                        detail::outcome_label("q", q),
                                    bq.op()});
        }
    }
    return out;
}

// Sequential CX: the registers c and t never directly interact. Ancilla a1
// is entangled with t and X-measured (outcome p); ancilla a2 is entangled
// with t and then with c and Z-measured (outcome q). The circuit output is
// (X^p H (x) X^q Z^p) CX; the trailing H by-product on c is corrected so the
// logical gate is exactly CX.
inline LogicalChannel sequential_cx(const NoiseSpec& noise) {
    noise.validate();

    detail::ChannelAccumulator prefix(2);  // c=0, t=1
    prefix.append_ancilla(prepare_plus(noise.eta));  // a1 = 2
    detail::entangle_sequential(prefix, noise, 1, 2);

    LogicalChannel out;
    out.label = "sequential_cx";
    out.ideal = detail::unitary_superop(cx_gate());
    out.noisy = superop_zero(4, 4);
    const ComplexMatrix h = hadamard();
    for (int p = 0; p < 2; ++p) {
        detail::ChannelAccumulator bp = prefix;
        bp.measure_remove(2, p, h);  // X-measure a1 -> (c, t)
        bp.append_ancilla(prepare_plus(noise.eta));  // a2 = 2
        detail::entangle_sequential(bp, noise, 1, 2);
        detail::entangle_sequential(bp, noise, 0, 2);
        for (int q = 0; q < 2; ++q) {
            detail::ChannelAccumulator bq = bp;
            bq.measure_remove(2, q);  // Z-measure a2 -> (c, t)
            if (p) bq.apply_unitary(pauli_x(), {0});
            bq.apply_unitary(h, {0});
            if (p) bq.apply_unitary(pauli_z(), {1});
            if (q) bq.apply_unitary(pauli_x(), {1});
            out.noisy.mat += bq.op().mat;
            out.branches.push_back({detail::outcome_label("p", p) + "," +
                                        detail::outcome_label("q", q),
                                    bq.op()});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Three-measurement Euler chain, logical target H Uz(gamma) Ux(beta) Uz(alpha)

enum class ChainModel { standard, sequential };

// Three chained teleportation steps with outcome-adapted measurement angles
// (beta -> (-1)^k beta, gamma -> (-1)^l gamma) and the deferred by-product
// correction X^m Z^l X^k applied to the output node.
inline LogicalChannel euler_chain(ChainModel model, double alpha, double beta,
                                  double gamma_ang, const NoiseSpec& noise) {
    noise.validate();
    const ComplexMatrix h = hadamard();
    auto basis = [&](double angle) -> ComplexMatrix {
        return h * rotation(Axis::Z, angle);
    };

    LogicalChannel out;
    out.label = model == ChainModel::standard ? "standard_euler_chain"
                                              : "sequential_euler_chain";
    out.ideal = detail::unitary_superop(h * rotation(Axis::Z, gamma_ang) *
                                        rotation(Axis::X, beta) *
                                        rotation(Axis::Z, alpha));
    out.noisy = superop_zero(2, 2);

    auto finish = [&](detail::ChannelAccumulator b, int k, int l, int m) {
        if (k) b.apply_unitary(pauli_x(), {0});
        if (l) b.apply_unitary(pauli_z(), {0});
        if (m) b.apply_unitary(pauli_x(), {0});
        out.noisy.mat += b.op().mat;
        out.branches.push_back({detail::outcome_label("k", k) + "," +
                                    detail::outcome_label("l", l) + "," +
                                    detail::outcome_label("m", m),
                                b.op()});
    };

    if (model == ChainModel::standard) {
        // Linear cluster built first: nodes (input=0, 1, 2, 3), CZs on
        // consecutive pairs, then adaptive Z-axis measurements node by node.
        detail::ChannelAccumulator prefix(1);
        prefix.append_ancilla(prepare_plus(noise.eta));
        prefix.append_ancilla(prepare_plus(noise.eta));
        prefix.append_ancilla(prepare_plus(noise.eta));
        detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 0, 1);
        detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 1, 2);
        detail::apply_entangler(prefix, cz_gate(), noise.model, noise.strength, 2, 3);
        for (int k = 0; k < 2; ++k) {
            detail::ChannelAccumulator bk = prefix;
            bk.measure_remove(0, k, basis(alpha));
            for (int l = 0; l < 2; ++l) {
                detail::ChannelAccumulator bl = bk;
                bl.measure_remove(0, l, basis(k ? -beta : beta));
                for (int m = 0; m < 2; ++m) {
                    detail::ChannelAccumulator bm = bl;
                    bm.measure_remove(0, m, basis(l ? -gamma_ang : gamma_ang));
                    finish(std::move(bm), k, l, m);
                }
            }
        }
    } else {
        // Sequential cycles: one fresh ancilla per step, register reused.
        auto step = [&](detail::ChannelAccumulator& acc, double angle, int outcome) {
            acc.append_ancilla(prepare_plus(noise.eta));
            detail::entangle_sequential(acc, noise, 0, 1);
            acc.apply_unitary(basis(angle), {1});
            acc.measure_remove(1, outcome);
        };
        for (int k = 0; k < 2; ++k) {
            detail::ChannelAccumulator bk(1);
            step(bk, alpha, k);
            for (int l = 0; l < 2; ++l) {
                detail::ChannelAccumulator bl = bk;
                step(bl, k ? -beta : beta, l);
                for (int m = 0; m < 2; ++m) {
                    detail::ChannelAccumulator bm = bl;
                    step(bm, l ? -gamma_ang : gamma_ang, m);
                    finish(std::move(bm), k, l, m);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cavity-QED sequential circuits: misfiring CZ entanglers, Raman-driven
// Hadamards on register (atomic) qubits, ideal operations on photonic
// ancillae. Corrections are ideal by default; raman_correction applies the
// Raman channel also to the by-product Hadamard on the control register.

inline LogicalChannel cavity_sequential_uz(double alpha, double s, double eta,
                                           double gamma) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("cavity_sequential_uz: s outside [0, 1]");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("cavity_sequential_uz: eta outside [0, 1]");
    const RamanSpec raman{gamma};
    raman.validate();
    const KrausChannel raman_h = raman_hadamard(raman);
    const ComplexMatrix v = hadamard() * rotation(Axis::Z, alpha);

    detail::ChannelAccumulator prefix(1);
    prefix.append_ancilla(prepare_plus(eta));
    detail::entangle_cavity(prefix, s, raman_h, 0, 1);
    prefix.apply_unitary(v, {1});

    LogicalChannel out;
    out.label = "cavity_sequential_uz";
    out.ideal = detail::unitary_superop(v);
    out.noisy = superop_zero(2, 2);
    for (int k = 0; k < 2; ++k) {
        detail::ChannelAccumulator b = prefix;
        b.measure_remove(1, k);
        if (k) b.apply_unitary(pauli_x(), {0});
        out.noisy.mat += b.op().mat;
        out.branches.push_back({detail::outcome_label("k", k), b.op()});
    }
    return out;
}

inline LogicalChannel cavity_sequential_cx(double s, double eta, double gamma,
                                           bool raman_correction = false) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("cavity_sequential_cx: s outside [0, 1]");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("cavity_sequential_cx: eta outside [0, 1]");
    const RamanSpec raman{gamma};
    raman.validate();
    const KrausChannel raman_h = raman_hadamard(raman);
    const ComplexMatrix h = hadamard();

    detail::ChannelAccumulator prefix(2);  // c=0, t=1
    prefix.append_ancilla(prepare_plus(eta));
    detail::entangle_cavity(prefix, s, raman_h, 1, 2);

    LogicalChannel out;
    out.label = "cavity_sequential_cx";
    out.ideal = detail::unitary_superop(cx_gate());
    out.noisy = superop_zero(4, 4);
    for (int p = 0; p < 2; ++p) {
        detail::ChannelAccumulator bp = prefix;
        bp.measure_remove(2, p, h);
        bp.append_ancilla(prepare_plus(eta));
        detail::entangle_cavity(bp, s, raman_h, 1, 2);
        detail::entangle_cavity(bp, s, raman_h, 0, 2);
        for (int q = 0; q < 2; ++q) {
            detail::ChannelAccumulator bq = bp;
            bq.measure_remove(2, q);
            if (p) bq.apply_unitary(pauli_x(), {0});
            if (raman_correction) {
                bq.apply_kraus(raman_h.ops, {0});
            } else {
                bq.apply_unitary(h, {0});
            }
            if (p) bq.apply_unitary(pauli_z(), {1});
            if (q) bq.apply_unitary(pauli_x(), {1});
            out.noisy.mat += bq.op().mat;
            out.branches.push_back({detail::outcome_label("p", p) + "," +
                                        detail::outcome_label("q", q),
                                    bq.op()});
        }
    }
    return out;
}

}  // namespace mbqc
