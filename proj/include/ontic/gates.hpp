/*
   Copyright 2026 The ontic-sim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Standard qubit operators and states.  Basis order is |0⟩ = |↑⟩, |1⟩ = |↓⟩.

#include <cmath>
#include <numbers>
#include <string>

#include "ontic/channels.hpp"
#include "ontic/qcore.hpp"

namespace ontic::gates {

inline HilbertSpace qubit(const std::string& label) { return HilbertSpace::single(label, 2); }

inline HilbertSpace qubits(const std::string& a, const std::string& b)
{
    return HilbertSpace({{a, 2}, {b, 2}});
}

inline Matrix pauli_x()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix pauli_y()
{
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

inline Matrix pauli_z()
{
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline Matrix hadamard()
{
    Matrix m(2, 2);
    m << 1.0, 1.0, 1.0, -1.0;
    return m / std::numbers::sqrt2;
}

// First factor controls, second is the target.
inline Matrix cnot()
{
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 3) = 1.0;
    m(3, 2) = 1.0;
    return m;
}

inline Matrix swap()
{
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 3) = 1.0;
    return m;
}

// |1⟩⟨1| ⊗ |−⟩⟨−|, a projector with exp(-iπH) = CNOT.
inline Matrix cnot_generator()
{
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1.0;
    Matrix minus(2, 2);
    minus << 0.5, -0.5, -0.5, 0.5;
    return kron(one, minus);
}

// (1 − SWAP) / 2, the projector onto the antisymmetric subspace;
// exp(-iπH) = SWAP.
inline Matrix swap_generator()
{
    return 0.5 * (Matrix::Identity(4, 4) - swap());
}

inline PureState up(const std::string& label) { return PureState::basis(qubit(label), 0); }
inline PureState down(const std::string& label) { return PureState::basis(qubit(label), 1); }

inline PureState plus(const std::string& label)
{
    Vector v(2);
    v << 1.0, 1.0;
    return PureState::normalized(qubit(label), v);
}

inline PureState minus(const std::string& label)
{
    Vector v(2);
    v << 1.0, -1.0;
    return PureState::normalized(qubit(label), v);
}

// c₁|00⟩ + c₂|11⟩ with real non-negative coefficients, |c₁|² = weight.
inline PureState schmidt_pair(const std::string& a, const std::string& b, double weight)
{
    Vector v = Vector::Zero(4);
    v(0) = std::sqrt(weight);
    v(3) = std::sqrt(1.0 - weight);
    return PureState::normalized(qubits(a, b), v);
}

inline PureState bell(const std::string& a, const std::string& b) { return schmidt_pair(a, b, 0.5); }

// p |Φ⁺⟩⟨Φ⁺| + (1 − p) 1/4; both marginals are 1/2 for every p.
inline DensityMatrix werner(const std::string& a, const std::string& b, double p)
{
    const Matrix m = p * bell(a, b).projector() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
    return DensityMatrix(qubits(a, b), m);
}

inline DensityMatrix projector_state(const PureState& psi) { return DensityMatrix::from_pure(psi); }

} // namespace ontic::gates
