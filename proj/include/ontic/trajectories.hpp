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

// Ontic trajectories on discrete time grids.
//
// Only coarse-grained trajectories carry a probability measure, and only
// through a MarkovKernelChain: the product of per-step conditional
// probabilities.  Nothing here assigns a measure to fine-grained
// trajectories.  Ontic indices are zero-based in memory; the file formats
// write them one-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ontic/channels.hpp"
#include "ontic/ontic.hpp"
#include "ontic/qcore.hpp"
#include "ontic/random.hpp"

namespace ontic {

struct OnticTrajectory {
    std::vector<double> times;
    std::vector<std::size_t> indices;
    std::vector<Matrix> frames;  // columns: possible ontic states at each time; may be empty

    void validate() const
    {
        if (times.size() != indices.size() || (!frames.empty() && frames.size() != times.size())) {
            throw Error(ErrorCode::InvalidArgument, "trajectory times, indices and frames differ in length");
        }
        for (std::size_t k = 1; k < times.size(); ++k) {
            if (!(times[k] > times[k - 1])) {
                throw Error(ErrorCode::InvalidArgument, "trajectory times must be strictly increasing");
            }
        }
        for (const auto& f : frames) {
            const Matrix gram = f.adjoint() * f;
            if (max_abs(gram - Matrix::Identity(gram.rows(), gram.cols())) > tolerances().derived) {
                throw Error(ErrorCode::InvalidState, "trajectory frame is not orthonormal");
            }
        }
    }
};

class MarkovKernelChain {
public:
    // `times` holds t_0..t_M; kernel k maps states at t_k to states at t_{k+1}.
    MarkovKernelChain(std::vector<double> times, std::vector<ConditionalProbabilityTable> kernels)
        : times_(std::move(times)), kernels_(std::move(kernels))
    {
        if (times_.size() != kernels_.size() + 1) {
            throw Error(ErrorCode::GridMismatch, "a chain with M kernels needs M + 1 times");
        }
        for (std::size_t k = 1; k < times_.size(); ++k) {
            if (!(times_[k] > times_[k - 1])) {
                throw Error(ErrorCode::GridMismatch, "chain times must be strictly increasing");
            }
        }
        for (std::size_t k = 0; k < kernels_.size(); ++k) {
            kernels_[k].validate();
            if (kernels_[k].column_shape().size() != 1) {
                throw Error(ErrorCode::InvalidArgument, "Markov kernels must have a single column subsystem");
            }
            if (k > 0 && kernels_[k].rows() != kernels_[k - 1].columns()) {
                throw Error(ErrorCode::InvalidArgument, "consecutive kernels disagree on the state count");
            }
        }
    }

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<ConditionalProbabilityTable>& kernels() const noexcept { return kernels_; }
    std::size_t steps() const noexcept { return kernels_.size(); }
    std::size_t initial_states() const { return kernels_.empty() ? 0 : kernels_.front().rows(); }

private:
    std::vector<double> times_;
    std::vector<ConditionalProbabilityTable> kernels_;
};

// Kernel with the given row-stochastic values and one column subsystem.
inline ConditionalProbabilityTable make_kernel(const Eigen::MatrixXd& values)
{
    return ConditionalProbabilityTable({{"S"}}, {static_cast<std::size_t>(values.cols())}, values);
}

inline std::vector<double> uniform_grid(double t0, double step, std::size_t steps)
{
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        t[k] = t0 + static_cast<double>(k) * step;
    }
    return t;
}

// Π_n p(i_n; t_n | i_{n-1}; t_{n-1})
inline double trajectory_probability(const OnticTrajectory& traj, const MarkovKernelChain& chain)
{
    const auto& times = chain.times();
    if (traj.times.size() != times.size() || traj.indices.size() != times.size()) {
        throw Error(ErrorCode::GridMismatch, "trajectory and chain have different time grids");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(traj.times[k] - times[k]) > 1e-12 * std::max(1.0, std::abs(times[k]))) {
            throw Error(ErrorCode::GridMismatch, "trajectory and chain have different time grids");
        }
    }
    double p = 1.0;
    for (std::size_t k = 0; k < chain.steps(); ++k) {
        const auto& kernel = chain.kernels()[k];
        const std::size_t from = traj.indices[k];
        const std::size_t to = traj.indices[k + 1];
        if (from >= kernel.rows() || to >= kernel.columns()) {
            throw Error(ErrorCode::InvalidArgument, "trajectory index out of range");
        }
        p *= std::max(kernel(from, to), 0.0);
    }
    return p;
}

inline constexpr std::size_t max_enumerated_trajectories = 1'000'000;

// Every index sequence (i_0 = initial, i_1..i_M) with its probability.
inline std::map<std::vector<std::size_t>, double> enumerate_trajectory_measure(const MarkovKernelChain& chain,
                                                                              std::size_t n_states,
                                                                              std::size_t initial_index)
{
    for (const auto& k : chain.kernels()) {
        if (k.rows() != n_states || k.columns() != n_states) {
            throw Error(ErrorCode::InvalidArgument, "chain kernels are not N x N");
        }
    }
    if (initial_index >= n_states) {
        throw Error(ErrorCode::InvalidArgument, "initial index out of range");
    }
    const std::size_t m = chain.steps();
    double count = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        count *= static_cast<double>(n_states);
        if (count > static_cast<double>(max_enumerated_trajectories)) {
            throw Error(ErrorCode::TooManyTrajectories, "N^M exceeds the enumeration guard");
        }
    }

    std::map<std::vector<std::size_t>, double> measure;
    OnticTrajectory traj{chain.times(), std::vector<std::size_t>(m + 1, 0), {}};
    traj.indices[0] = initial_index;
    const auto total = static_cast<std::size_t>(count);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (std::size_t k = m; k >= 1; --k) {
            traj.indices[k] = rest % n_states;
            rest /= n_states;
        }
        measure.emplace(traj.indices, trajectory_probability(traj, chain));
    }
    return measure;
}

// Sequential draws from kernel rows on stream (seed, trajectory_id).
inline OnticTrajectory sample_trajectory(const MarkovKernelChain& chain, std::size_t initial_index,
                                         std::uint64_t seed, std::uint64_t trajectory_id = 0)
{
    if (chain.steps() > 0 && initial_index >= chain.initial_states()) {
        throw Error(ErrorCode::InvalidArgument, "initial index out of range");
    }
    Rng rng = Rng::stream(seed, trajectory_id);
    OnticTrajectory traj{chain.times(), {initial_index}, {}};
    std::size_t current = initial_index;
    for (const auto& kernel : chain.kernels()) {
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t next = kernel.columns() - 1;
        for (std::size_t j = 0; j < kernel.columns(); ++j) {
            acc += std::max(kernel(current, j), 0.0);
            if (u < acc) {
                next = j;
                break;
            }
        }
        traj.indices.push_back(next);
        current = next;
    }
    return traj;
}

// Dilation channel of one step of exp(-iHΔt) against a fresh environment copy.
inline QuantumChannel repeated_interaction_step(const GeneratorFamily& family, const DensityMatrix& rho_e_fresh,
                                                const std::vector<std::string>& s_labels, double step)
{
    std::vector<std::string> e_labels = rho_e_fresh.space().labels();
    return dilation_channel(family(step), rho_e_fresh, s_labels, e_labels);
}

// Kernel k is single_system_conditional of the step channel at ρ_S(t_k); the
// environment is replaced by a fresh copy every step.
inline MarkovKernelChain markov_chain_from_repeated_interaction(const GeneratorFamily& family,
                                                                const DensityMatrix& rho_e_fresh,
                                                                const DensityMatrix& rho_s0, double step,
                                                                std::size_t steps,
                                                                double degeneracy_gap = tolerances().degeneracy_gap)
{
    if (!(step > 0.0) || steps == 0) {
        throw Error(ErrorCode::InvalidArgument, "step must be positive and steps nonzero");
    }
    if (!(family.space().dim() == rho_s0.dim() * rho_e_fresh.dim())) {
        throw Error(ErrorCode::SpaceMismatch, "generator does not act on S ⊗ E");
    }
    const QuantumChannel channel = repeated_interaction_step(family, rho_e_fresh, rho_s0.space().labels(), step);
    if (!(channel.in_space() == rho_s0.space())) {
        throw Error(ErrorCode::SpaceMismatch, "system state does not match the generator's S factors");
    }
    std::vector<ConditionalProbabilityTable> kernels;
    kernels.reserve(steps);
    DensityMatrix rho = rho_s0;
    for (std::size_t k = 0; k < steps; ++k) {
        kernels.push_back(single_system_conditional(channel, rho, degeneracy_gap));
        rho = apply(channel, rho);
    }
    return MarkovKernelChain(uniform_grid(0.0, step, steps), std::move(kernels));
}

// ---------------------------------------------------------------------------
// Spin-1/2 double helix
// ---------------------------------------------------------------------------

struct BlochPoint {
    double theta = 0.0;  // from +z
    double phi = 0.0;    // from +x toward +y
};

// cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩
inline Vector bloch_state(const BlochPoint& p)
{
    Vector v(2);
    v(0) = std::cos(p.theta / 2.0);
    v(1) = std::exp(Complex(0.0, p.phi)) * std::sin(p.theta / 2.0);
    return v;
}

namespace detail {

// Point for the unit vector (x, 0, z).  The axis stays in the x-z plane, so
// φ is 0 on the +x side and π on the -x side; on the poles φ = 0.
inline BlochPoint xz_point(double x, double z)
{
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    const double pole_tol = 1e-12;
    const double phi = (x < 0.0 && std::abs(x) > pole_tol) ? std::numbers::pi : 0.0;
    return {theta, phi};
}

} // namespace detail

struct BlochHelix {
    std::vector<double> times;
    std::vector<BlochPoint> strand1;
    std::vector<BlochPoint> strand2;
};

// Possible ontic states of a qubit whose eigenbasis axis starts along +x and
// rotates toward +z at angular rate omega.  Strand 2 is the antipode.
inline BlochHelix bloch_helix(double omega, const std::vector<double>& times)
{
    BlochHelix helix{times, {}, {}};
    helix.strand1.reserve(times.size());
    helix.strand2.reserve(times.size());
    for (double t : times) {
        const double angle = omega * t;
        const double x = std::cos(angle);
        const double z = std::sin(angle);
        helix.strand1.push_back(detail::xz_point(x, z));
        helix.strand2.push_back(detail::xz_point(-x, -z));
    }
    return helix;
}

// ---------------------------------------------------------------------------
// Closed systems
// ---------------------------------------------------------------------------

// Orthonormal basis whose first column is `first`, completed by Gram-Schmidt
// against the standard basis in index order.
inline Matrix complete_frame(const Vector& first)
{
    const auto d = first.size();
    Matrix frame(d, d);
    frame.col(0) = first.normalized();
    Eigen::Index filled = 1;
    for (Eigen::Index j = 0; j < d && filled < d; ++j) {
        Vector v = Vector::Zero(d);
        v(j) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            v -= frame.leftCols(filled) * (frame.leftCols(filled).adjoint() * v);
        }
        const double n = v.norm();
        if (n > 1e-6) {
            frame.col(filled++) = v / n;
        }
    }
    return frame;
}

template <UnitaryFamily Family>
OnticTrajectory closed_system_trajectory(const Family& family, const PureState& psi0, const std::vector<double>& times)
{
    OnticTrajectory traj{times, std::vector<std::size_t>(times.size(), 0), {}};
    traj.frames.reserve(times.size());
    for (double t : times) {
        const UnitaryOperator u = family(t);
        if (!(u.space() == psi0.space())) {
            throw Error(ErrorCode::SpaceMismatch, "family and state live on different spaces");
        }
        traj.frames.push_back(complete_frame(u.matrix() * psi0.amplitudes()));
    }
    traj.validate();
    return traj;
}

// Kernels p(·; t_k | ·; t_{k-1}) of the unitary segments U(t_k) U(t_{k-1})†
// evaluated at the pure state |Ψ(t_{k-1})⟩.
template <UnitaryFamily Family>
MarkovKernelChain closed_system_chain(const Family& family, const PureState& psi0, const std::vector<double>& times,
                                      double degeneracy_gap = tolerances().degeneracy_gap)
{
    std::vector<ConditionalProbabilityTable> kernels;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const UnitaryOperator prev = family(times[k - 1]);
        const UnitaryOperator next = family(times[k]);
        const UnitaryOperator segment(psi0.space(), next.matrix() * prev.matrix().adjoint());
        const PureState psi = PureState::normalized(psi0.space(), prev.matrix() * psi0.amplitudes());
        kernels.push_back(single_system_conditional(unitary_channel(segment), DensityMatrix::from_pure(psi),
                                                    degeneracy_gap));
    }
    return MarkovKernelChain(times, std::move(kernels));
}

} // namespace ontic
