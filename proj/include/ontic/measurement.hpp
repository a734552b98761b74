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

// von Neumann measurement with a factorized apparatus and environment.
//
// The subject starts in Σ_m Ψ_m |m⟩; after the interaction each outcome m is
// correlated with product pointer states |A(m)⟩ = |a_1(m)⟩...|a_NA(m)⟩ and
// likewise |E(m)⟩.  The reduced subject state is
//
//     ρ_S(m1, m2) = Ψ_m1 Ψ*_m2 ⟨A(m2)|A(m1)⟩ ⟨E(m2)|E(m1)⟩
//
// and each pointer overlap is a product of per-factor overlaps.  The
// analytic path never materializes pointer states; materialized_measurement
// builds them explicitly for small factor counts as a cross-check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ontic/ontic.hpp"
#include "ontic/qcore.hpp"

namespace ontic {

// Per-factor overlap magnitude c(γ, Δt) ∈ [0, 1].
using OverlapFunction = std::function<double(double rate, double duration)>;

inline double exponential_overlap(double rate, double duration)
{
    return std::exp(-rate * duration);
}

enum class PointerSubsystem { apparatus, environment };

struct MeasurementModel {
    std::size_t subject_dim = 2;
    std::size_t n_apparatus = 0;
    std::size_t n_environment = 0;
    double rate_apparatus = 0.0;
    double rate_environment = 0.0;
    double duration = 0.0;
    OverlapFunction overlap = exponential_overlap;
    // Optional antisymmetric phase angles for ⟨A(m2)|A(m1)⟩⟨E(m2)|E(m1)⟩;
    // absent means real positive overlaps.
    std::optional<Eigen::MatrixXd> overlap_phases;

    std::size_t total_factors() const { return n_apparatus + n_environment; }

    // γ = (N_A γ_A + N_E γ_E) / N
    double mean_rate() const
    {
        const auto n = static_cast<double>(total_factors());
        return n == 0.0 ? 0.0
                        : (static_cast<double>(n_apparatus) * rate_apparatus +
                           static_cast<double>(n_environment) * rate_environment) / n;
    }

    void validate() const
    {
        if (subject_dim < 2) {
            throw Error(ErrorCode::InvalidArgument, "subject dimension must be at least 2");
        }
        if (!(rate_apparatus >= 0.0) || !(rate_environment >= 0.0) || !(duration >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "rates and duration must be non-negative");
        }
        if (!overlap) {
            throw Error(ErrorCode::InvalidArgument, "overlap function is empty");
        }
        for (double rate : {rate_apparatus, rate_environment}) {
            if (std::abs(overlap(rate, 0.0) - 1.0) > tolerances().construction) {
                throw Error(ErrorCode::InvalidArgument, "overlap function must equal 1 at zero duration");
            }
            const double c = overlap(rate, duration);
            if (!(c >= 0.0 && c <= 1.0)) {
                throw Error(ErrorCode::InvalidArgument, "overlap function left [0, 1]");
            }
        }
        if (overlap_phases) {
            const auto d = static_cast<Eigen::Index>(subject_dim);
            if (overlap_phases->rows() != d || overlap_phases->cols() != d) {
                throw Error(ErrorCode::SpaceMismatch, "phase table must be subject_dim square");
            }
            if ((*overlap_phases + overlap_phases->transpose()).cwiseAbs().maxCoeff() > tolerances().construction) {
                throw Error(ErrorCode::InvalidArgument, "phase table must be antisymmetric");
            }
        }
    }
};

inline double pointer_overlap(const MeasurementModel& model, PointerSubsystem which)
{
    const bool apparatus = which == PointerSubsystem::apparatus;
    const double per_factor = model.overlap(apparatus ? model.rate_apparatus : model.rate_environment, model.duration);
    const auto n = apparatus ? model.n_apparatus : model.n_environment;
    return std::pow(per_factor, static_cast<double>(n));
}

struct MeasurementOutcomeReport {
    DensityMatrix rho_s;
    OnticDecomposition ontic;
    std::vector<double> born_targets;        // |Ψ_m|²
    std::vector<std::size_t> outcome_of;     // m_s for each ontic state s
    double max_born_deviation = 0.0;         // max_s |p_s − |Ψ_{m_s}|²|
    double max_offdiag = 0.0;                // max_{m1≠m2} |ρ_S(m1, m2)|
    double overlap_apparatus = 1.0;
    double overlap_environment = 1.0;
};

namespace detail {

inline Matrix post_measurement_matrix(const MeasurementModel& model, const PureState& psi)
{
    model.validate();
    if (psi.dim() != model.subject_dim) {
        throw Error(ErrorCode::SpaceMismatch, "subject state dimension differs from the model");
    }
    const double coherence =
        pointer_overlap(model, PointerSubsystem::apparatus) * pointer_overlap(model, PointerSubsystem::environment);
    const Vector& a = psi.amplitudes();
    const auto d = a.size();
    Matrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) {
                rho(i, j) = std::norm(a(i));
                continue;
            }
            Complex factor(coherence, 0.0);
            if (model.overlap_phases) {
                factor *= std::exp(Complex(0.0, (*model.overlap_phases)(i, j)));
            }
            rho(i, j) = a(i) * std::conj(a(j)) * factor;
        }
    }
    return rho;
}

// Measurement-basis index with the largest weight in `state`; lowest index wins ties.
inline std::size_t dominant_outcome(const Vector& state)
{
    Eigen::Index best = 0;
    state.cwiseAbs2().maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

} // namespace detail

inline MeasurementOutcomeReport simulate_measurement(const MeasurementModel& model, const PureState& psi,
                                                     double degeneracy_gap = tolerances().degeneracy_gap)
{
    DensityMatrix rho(HilbertSpace::single("S", model.subject_dim), detail::post_measurement_matrix(model, psi));
    OnticDecomposition ontic = ontic_decomposition(rho, degeneracy_gap);

    std::vector<double> born(model.subject_dim);
    for (std::size_t m = 0; m < model.subject_dim; ++m) {
        born[m] = std::norm(psi.amplitudes()(static_cast<Eigen::Index>(m)));
    }

    std::vector<std::size_t> outcome_of;
    double deviation = 0.0;
    for (const auto& entry : ontic.entries()) {
        const std::size_t m = detail::dominant_outcome(entry.state.amplitudes());
        outcome_of.push_back(m);
        deviation = std::max(deviation, std::abs(entry.probability - born[m]));
    }

    double offdiag = 0.0;
    const auto d = static_cast<Eigen::Index>(model.subject_dim);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i != j) {
                offdiag = std::max(offdiag, std::abs(rho.matrix()(i, j)));
            }
        }
    }

    return MeasurementOutcomeReport{std::move(rho),
                                    std::move(ontic),
                                    std::move(born),
                                    std::move(outcome_of),
                                    deviation,
                                    offdiag,
                                    pointer_overlap(model, PointerSubsystem::apparatus),
                                    pointer_overlap(model, PointerSubsystem::environment)};
}

// max_s |⟨s|ρ_S|s⟩ − |Ψ_{m_s}|²| with the expectation evaluated directly
// rather than read off the eigenvalues.
inline double born_conditional_check(const MeasurementModel& model, const PureState& psi,
                                     double degeneracy_gap = tolerances().degeneracy_gap)
{
    const auto report = simulate_measurement(model, psi, degeneracy_gap);
    double worst = 0.0;
    for (const auto& entry : report.ontic.entries()) {
        const Vector& s = entry.state.amplitudes();
        const double p = (s.adjoint() * report.rho_s.matrix() * s)(0, 0).real();
        const std::size_t m = detail::dominant_outcome(s);
        worst = std::max(worst, std::abs(p - report.born_targets[m]));
    }
    return worst;
}

struct ErrorEntropyReport {
    double s_max = 0.0;
    double bound = 1.0;
    bool satisfied = true;
};

// S_max = N_A ln 2 for qubit apparatus factors; the minimum achievable error
// is of order e^{-S_max}.  `satisfied` holds when the observed deviation is
// no smaller than bound / slack.
inline ErrorEntropyReport error_entropy_bound(const MeasurementModel& model, double observed_deviation,
                                              double slack = 10.0)
{
    if (!(observed_deviation >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "observed deviation must be non-negative");
    }
    if (!(slack >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "slack factor must be at least 1");
    }
    ErrorEntropyReport r;
    r.s_max = static_cast<double>(model.n_apparatus) * std::numbers::ln2;
    r.bound = std::exp(-r.s_max);
    r.satisfied = observed_deviation >= r.bound / slack;
    return r;
}

// Natural-log Shannon entropy with 0 log 0 = 0.
inline double correlational_entropy(std::span<const double> probs)
{
    const auto& tol = tolerances();
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw Error(ErrorCode::NotADistribution, "negative probability");
        }
        sum += p;
    }
    if (probs.empty() || std::abs(sum - 1.0) > tol.derived) {
        throw Error(ErrorCode::NotADistribution, "probabilities do not sum to 1");
    }
    double s = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            s -= p * std::log(p);
        }
    }
    return s;
}

struct SweepRow {
    std::size_t n = 0;
    double overlap_apparatus = 1.0;
    double overlap_environment = 1.0;
    double max_offdiag = 0.0;
    double max_born_deviation = 0.0;
    double s_max = 0.0;
    double bound = 1.0;
};

// Runs simulate_measurement with the chosen factor count set to each N.
inline std::vector<SweepRow> decoherence_scaling_sweep(const MeasurementModel& model_template, const PureState& psi,
                                                       const std::vector<std::size_t>& n_values,
                                                       PointerSubsystem axis = PointerSubsystem::apparatus)
{
    std::vector<SweepRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t n : n_values) {
        MeasurementModel model = model_template;
        (axis == PointerSubsystem::apparatus ? model.n_apparatus : model.n_environment) = n;
        const auto report = simulate_measurement(model, psi);
        const auto entropy = error_entropy_bound(model, report.max_born_deviation);
        rows.push_back(SweepRow{n, report.overlap_apparatus, report.overlap_environment, report.max_offdiag,
                                report.max_born_deviation, entropy.s_max, entropy.bound});
    }
    return rows;
}

// Least-squares slope of ln(max_offdiag) against N.
inline double log_offdiag_slope(const std::vector<SweepRow>& rows)
{
    if (rows.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "slope fit needs at least two rows");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        if (!(r.max_offdiag > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "off-diagonal magnitude must be positive for a log fit");
        }
        const auto x = static_cast<double>(r.n);
        const double y = std::log(r.max_offdiag);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Explicit construction: Σ_m Ψ_m |m⟩|a(m)⟩^{⊗N} with d pointer states per
// factor whose pairwise overlaps all equal `per_factor_overlap`, followed by
// the partial trace over the N pointer factors.
inline DensityMatrix materialized_measurement(const PureState& psi, double per_factor_overlap, std::size_t n_factors)
{
    if (!(per_factor_overlap >= 0.0 && per_factor_overlap <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "per-factor overlap must lie in [0, 1]");
    }
    const auto d = static_cast<Eigen::Index>(psi.dim());
    // Gram matrix (1 − c) 1 + c J, factored as G = W Wᵀ; row m of W is |a(m)⟩.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Constant(d, d, per_factor_overlap);
    gram.diagonal().setOnes();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const Eigen::MatrixXd w = solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    std::vector<Factor> factors{{"S", static_cast<std::size_t>(d)}};
    for (std::size_t k = 0; k < n_factors; ++k) {
        factors.push_back({"a" + std::to_string(k + 1), static_cast<std::size_t>(d)});
    }
    HilbertSpace space(std::move(factors));

    Vector total = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    for (Eigen::Index m = 0; m < d; ++m) {
        Vector branch = Vector::Zero(d);
        branch(m) = psi.amplitudes()(m);
        const Vector pointer = w.row(m).transpose().cast<Complex>();
        for (std::size_t k = 0; k < n_factors; ++k) {
            branch = kron(branch, pointer);
        }
        total += branch;
    }
    const PureState global = PureState::normalized(space, total);
    if (n_factors == 0) {
        return DensityMatrix::from_pure(global);
    }
    return partial_trace(DensityMatrix::from_pure(global), {"S"});
}

} // namespace ontic
