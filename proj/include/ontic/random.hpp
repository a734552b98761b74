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

// Seedable, splittable random streams and random quantum objects.
//
// Rng wraps mt19937_64.  Independent streams are derived from (seed, id)
// through a SplitMix64 mix so parallel work stays reproducible no matter
// how it is scheduled.  Uniform and normal variates are produced from the
// raw 64-bit output directly, so sequences do not depend on the standard
// library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ontic/channels.hpp"
#include "ontic/qcore.hpp"

namespace ontic {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    // Stream `id` of the generator family rooted at `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t id)
    {
        return Rng(splitmix64(seed) ^ splitmix64(~id + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_normal() { return {normal(), normal()}; }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Matrix random_ginibre(Rng& rng, std::size_t rows, std::size_t cols)
{
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with phases of R's
// diagonal moved into Q.
inline UnitaryOperator random_unitary(Rng& rng, const HilbertSpace& space)
{
    const std::size_t d = space.dim();
    Eigen::HouseholderQR<Matrix> qr(random_ginibre(rng, d, d));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) {
            q.col(k) *= r(k, k) / mag;
        }
    }
    return UnitaryOperator(space, q);
}

inline PureState random_pure_state(Rng& rng, const HilbertSpace& space)
{
    return PureState::normalized(space, random_ginibre(rng, space.dim(), 1).col(0));
}

// Full-rank mixed state G G† / Tr[G G†] from a square Ginibre matrix.
inline DensityMatrix random_density(Rng& rng, const HilbertSpace& space)
{
    const Matrix g = random_ginibre(rng, space.dim(), space.dim());
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(space, hermitize(m));
}

// Random Hermitian matrix rescaled to unit spectral norm.
inline Matrix random_hermitian(Rng& rng, std::size_t dim)
{
    const Matrix g = random_ginibre(rng, dim, dim);
    Matrix h = hermitize(g);
    const double norm = hermitian_eigenvalues(h).cwiseAbs().maxCoeff();
    return h / norm;
}

// Channel on `system` obtained by dilating a Haar unitary on system ⊗ ancilla
// against a random mixed ancilla state.
inline QuantumChannel random_dilation_channel(Rng& rng, const HilbertSpace& system, std::size_t ancilla_dim = 2,
                                              const std::string& ancilla_label = "_anc")
{
    const HilbertSpace ancilla = HilbertSpace::single(ancilla_label, ancilla_dim);
    const HilbertSpace joint = system.concat(ancilla);
    const UnitaryOperator u = random_unitary(rng, joint);
    const DensityMatrix rho_a = random_density(rng, ancilla);
    return dilation_channel(u, rho_a, system.labels(), {ancilla_label});
}

} // namespace ontic
