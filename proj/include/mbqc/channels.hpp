#pragma once

// Constructors for the gates and noise channels used by the teleportation
// circuits: Pauli/Hadamard/CZ matrices, axis rotations, noisy ancilla
// preparation, the two stochastic entangler noise models (depolarizing and
// misfiring), and Gaussian-averaged Raman pulse rotations.

#include "mbqc/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mbqc {

// ---------------------------------------------------------------------------
// Fixed gates

inline ComplexMatrix pauli_i() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline ComplexMatrix hadamard() {
    ComplexMatrix m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

inline ComplexMatrix cz_gate() {
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(3, 3) = -1;
    return m;
}

// CX with control on the first qubit, target on the second.
inline ComplexMatrix cx_gate() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return m;
}

// The complemented-CZ entangler of the sequential model: (H (x) H) CZ.
inline ComplexMatrix complemented_cz() {
    return kron(hadamard(), hadamard()) * cz_gate();
}

enum class Axis { X, Y, Z };

inline ComplexMatrix pauli(Axis axis) {
    switch (axis) {
        case Axis::X: return pauli_x();
        case Axis::Y: return pauli_y();
        case Axis::Z: return pauli_z();
    }
    throw std::invalid_argument("pauli: bad axis");
}

// exp(-i * angle * A / 2) for Pauli A.
inline ComplexMatrix rotation(Axis axis, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    return c * ComplexMatrix::Identity(2, 2) - cplx(0, 1) * s * pauli(axis);
}

// ---------------------------------------------------------------------------
// Noise specifications

enum class EntanglerModel { depolarizing, misfiring, none };
enum class Scenario { perfect, imperfect };

struct NoiseSpec {
    EntanglerModel model = EntanglerModel::none;
    double strength = 0.0;  // p (depolarizing) or s (misfiring)
    double eta = 0.0;       // ancilla preparation noise
    Scenario scenario = Scenario::perfect;

    void validate() const {
        if (strength < 0.0 || strength > 1.0) {
            throw std::invalid_argument("NoiseSpec: strength outside [0, 1]");
        }
        if (eta < 0.0 || eta > 1.0) {
            throw std::invalid_argument("NoiseSpec: eta outside [0, 1]");
        }
    }
};

// Standard deviation of the Gaussian pulse-angle offset, in radians.
struct RamanSpec {
    double gamma = 0.0;

    void validate() const {
        if (gamma < 0.0) {
            throw std::invalid_argument("RamanSpec: gamma must be >= 0");
        }
    }
};

// ---------------------------------------------------------------------------
// Channel constructors

inline KrausChannel unitary_channel(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) {
        throw std::invalid_argument("unitary_channel: matrix not square");
    }
    const ComplexMatrix gram = u.adjoint() * u;
    if (max_abs_diff(gram, ComplexMatrix::Identity(u.rows(), u.cols())) > kChannelTol) {
        throw std::invalid_argument("unitary_channel: matrix is not unitary");
    }
    return {static_cast<int>(u.rows()), {u}};
}

// (1 - eta)|+><+| + eta I/2.
inline DensityMatrix prepare_plus(double eta) {
    if (eta < 0.0 || eta > 1.0) {
        throw std::invalid_argument("prepare_plus: eta outside [0, 1]");
    }
    ComplexMatrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    return DensityMatrix((1.0 - eta) * plus +
                         eta * 0.5 * ComplexMatrix::Identity(2, 2));
}

// Constant map rho -> Tr(rho) I/dim.
inline Superoperator superop_replace_maximally_mixed(int dim) {
    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    ComplexMatrix mat = vectorize(id / static_cast<double>(dim)) *
                        vectorize(id).adjoint();
    return {dim, dim, std::move(mat)};
}

// Binary stochastic noise on a 2-qubit entangling gate. Depolarizing mixes
// the gate channel with the constant-I/4 replacement; misfiring mixes it
// with the identity channel (the gate simply does not act).
inline Superoperator noisy_entangler(const KrausChannel& gate, EntanglerModel model,
                                     double strength) {
    if (gate.dim != 4 || gate.ops.size() != 1) {
        throw std::invalid_argument("noisy_entangler: gate must be a 2-qubit unitary channel");
    }
    const ComplexMatrix& u = gate.ops.front();
    if (max_abs_diff(u.adjoint() * u, ComplexMatrix::Identity(4, 4)) > kChannelTol) {
        throw std::invalid_argument("noisy_entangler: gate Kraus operator is not unitary");
    }
    if (strength < 0.0 || strength > 1.0) {
        throw std::invalid_argument("noisy_entangler: strength outside [0, 1]");
    }
    Superoperator gate_op = superop_from_kraus(gate);
    switch (model) {
        case EntanglerModel::none:
            return gate_op;
        case EntanglerModel::depolarizing: {
            const Superoperator rep = superop_replace_maximally_mixed(4);
            return {4, 4, (1.0 - strength) * gate_op.mat + strength * rep.mat};
        }
        case EntanglerModel::misfiring: {
            return {4, 4, (1.0 - strength) * gate_op.mat +
                              strength * superop_identity(4).mat};
        }
    }
    throw std::invalid_argument("noisy_entangler: bad model");
}

// Exact Gaussian average of a rotation with a normally distributed angle
// offset: rho -> Int N(delta; 0, gamma^2) R(theta+delta) rho R(theta+delta)^dag.
// On the +/-1 eigenspaces of the axis Pauli A the average closes into two
// Kraus operators, sqrt((1+c)/2) R(theta) and sqrt((1-c)/2) A R(theta) with
// c = exp(-gamma^2/2), via the Gaussian characteristic function.
inline KrausChannel gaussian_rotation(Axis axis, double theta, const RamanSpec& spec) {
    spec.validate();
    const ComplexMatrix r = rotation(axis, theta);
    if (spec.gamma == 0.0) {
        return {2, {r}};
    }
    const double c = std::exp(-spec.gamma * spec.gamma / 2.0);
    const double w_keep = (1.0 + c) / 2.0;
    const double w_flip = (1.0 - c) / 2.0;
    KrausChannel out{2, {std::sqrt(w_keep) * r}};
    if (w_flip > 0.0) {
        out.ops.push_back(std::sqrt(w_flip) * (pauli(axis) * r));
    }
    return out;
}

// Hadamard realized by Raman pulses: a Z-rotation by pi followed by a
// Y-rotation by pi/2, each with an independent Gaussian angle offset.
inline KrausChannel raman_hadamard(const RamanSpec& spec) {
    const KrausChannel rz = gaussian_rotation(Axis::Z, M_PI, spec);
    const KrausChannel ry = gaussian_rotation(Axis::Y, M_PI / 2.0, spec);
    KrausChannel out{2, {}};
    for (const auto& a : ry.ops) {
        for (const auto& b : rz.ops) {
            out.ops.push_back(a * b);
        }
    }
    return out;
}

}  // namespace mbqc
