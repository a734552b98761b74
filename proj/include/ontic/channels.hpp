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

// Linear CPTP maps stored as Kraus sets.
//
// Channel equality is Choi-matrix equality; Kraus lists are never compared
// directly since the decomposition is not unique.

#include <cmath>
#include <concepts>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ontic/qcore.hpp"

namespace ontic {

class UnitaryOperator {
public:
    UnitaryOperator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), u_(std::move(matrix))
    {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        if (u_.rows() != d || u_.cols() != d) {
            throw Error(ErrorCode::SpaceMismatch, "unitary side does not match the space dimension");
        }
        const double defect = max_abs(u_.adjoint() * u_ - Matrix::Identity(d, d));
        if (defect > tolerances().construction) {
            throw Error(ErrorCode::NotUnitary, "U^dagger U differs from identity by " + std::to_string(defect));
        }
    }

    static UnitaryOperator identity(HilbertSpace space)
    {
        const auto d = static_cast<Eigen::Index>(space.dim());
        return UnitaryOperator(std::move(space), Matrix::Identity(d, d));
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return u_; }

private:
    HilbertSpace space_;
    Matrix u_;
};

// exp(-iHt) for a fixed Hermitian generator, evaluated through the
// eigendecomposition of H so that no integrator error enters.
class GeneratorFamily {
public:
    GeneratorFamily(HilbertSpace space, const Matrix& generator) : space_(std::move(space))
    {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        if (generator.rows() != d || generator.cols() != d) {
            throw Error(ErrorCode::SpaceMismatch, "generator side does not match the space dimension");
        }
        if (hermiticity_defect(generator) > tolerances().construction) {
            throw Error(ErrorCode::InvalidArgument, "generator is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(generator));
        energies_ = solver.eigenvalues();
        basis_ = solver.eigenvectors();
    }

    UnitaryOperator operator()(double t) const
    {
        Vector phases(energies_.size());
        for (Eigen::Index k = 0; k < energies_.size(); ++k) {
            phases(k) = std::exp(Complex(0.0, -energies_(k) * t));
        }
        return UnitaryOperator(space_, basis_ * phases.asDiagonal() * basis_.adjoint());
    }

    const HilbertSpace& space() const noexcept { return space_; }
    double spectral_norm() const { return energies_.cwiseAbs().maxCoeff(); }

private:
    HilbertSpace space_;
    RealVector energies_;
    Matrix basis_;
};

template <typename F>
concept UnitaryFamily = requires(const F& f, double t) {
    { f(t) } -> std::convertible_to<UnitaryOperator>;
};

struct CptpReport {
    bool trace_preserving = false;
    bool completely_positive = false;
    double min_choi_eigenvalue = 0.0;
    double completeness_defect = 0.0;

    bool ok() const { return trace_preserving && completely_positive; }
};

class QuantumChannel {
public:
    // Validates shapes and the completeness relation Σ K†K = 1.
    QuantumChannel(HilbertSpace in_space, HilbertSpace out_space, std::vector<Matrix> kraus)
        : QuantumChannel(std::move(in_space), std::move(out_space), std::move(kraus), Unchecked{})
    {
        const double defect = completeness_defect();
        if (defect > tolerances().derived) {
            throw Error(ErrorCode::NotCPTP, "Kraus completeness defect " + std::to_string(defect));
        }
    }

    // Shape checks only; used to load and diagnose arbitrary Kraus sets.
    static QuantumChannel unchecked(HilbertSpace in_space, HilbertSpace out_space, std::vector<Matrix> kraus)
    {
        return QuantumChannel(std::move(in_space), std::move(out_space), std::move(kraus), Unchecked{});
    }

    const HilbertSpace& in_space() const noexcept { return in_; }
    const HilbertSpace& out_space() const noexcept { return out_; }
    const std::vector<Matrix>& kraus() const noexcept { return kraus_; }

    double completeness_defect() const
    {
        const auto d = static_cast<Eigen::Index>(in_.dim());
        Matrix sum = Matrix::Zero(d, d);
        for (const auto& k : kraus_) {
            sum += k.adjoint() * k;
        }
        return max_abs(sum - Matrix::Identity(d, d));
    }

    // Σ_α K_α X K_α† on a raw operator.
    Matrix map(const Matrix& x) const
    {
        const auto dout = static_cast<Eigen::Index>(out_.dim());
        Matrix out = Matrix::Zero(dout, dout);
        for (const auto& k : kraus_) {
            out.noalias() += k * x * k.adjoint();
        }
        return out;
    }

private:
    struct Unchecked {};
    QuantumChannel(HilbertSpace in_space, HilbertSpace out_space, std::vector<Matrix> kraus, Unchecked)
        : in_(std::move(in_space)), out_(std::move(out_space)), kraus_(std::move(kraus))
    {
        if (kraus_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "channel needs at least one Kraus operator");
        }
        const auto din = static_cast<Eigen::Index>(in_.dim());
        const auto dout = static_cast<Eigen::Index>(out_.dim());
        for (const auto& k : kraus_) {
            if (k.rows() != dout || k.cols() != din) {
                throw Error(ErrorCode::SpaceMismatch, "Kraus operator shape does not match channel spaces");
            }
        }
    }

    HilbertSpace in_;
    HilbertSpace out_;
    std::vector<Matrix> kraus_;
};

namespace detail {

inline std::vector<Matrix> prune_kraus(std::vector<Matrix> kraus)
{
    const double floor = tolerances().kraus_prune;
    std::vector<Matrix> kept;
    kept.reserve(kraus.size());
    for (auto& k : kraus) {
        if (k.norm() >= floor) {
            kept.push_back(std::move(k));
        }
    }
    if (kept.empty() && !kraus.empty()) {
        kept.push_back(std::move(kraus.front()));
    }
    return kept;
}

} // namespace detail

inline QuantumChannel unitary_channel(const UnitaryOperator& u)
{
    return QuantumChannel(u.space(), u.space(), {u.matrix()});
}

inline QuantumChannel identity_channel(const HilbertSpace& space)
{
    return unitary_channel(UnitaryOperator::identity(space));
}

inline DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& rho)
{
    if (!(rho.space() == ch.in_space())) {
        throw Error(ErrorCode::SpaceMismatch, "state does not live on the channel input space");
    }
    return DensityMatrix::from_trusted(ch.out_space(), ch.map(rho.matrix()));
}

inline QuantumChannel compose(const QuantumChannel& later, const QuantumChannel& earlier)
{
    if (!(earlier.out_space() == later.in_space())) {
        throw Error(ErrorCode::SpaceMismatch, "earlier output space differs from later input space");
    }
    std::vector<Matrix> products;
    products.reserve(later.kraus().size() * earlier.kraus().size());
    for (const auto& b : later.kraus()) {
        for (const auto& a : earlier.kraus()) {
            products.push_back(b * a);
        }
    }
    return QuantumChannel(earlier.in_space(), later.out_space(), detail::prune_kraus(std::move(products)));
}

// Product channel a ⊗ b on the concatenated spaces.
inline QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b)
{
    std::vector<Matrix> kraus;
    kraus.reserve(a.kraus().size() * b.kraus().size());
    for (const auto& ka : a.kraus()) {
        for (const auto& kb : b.kraus()) {
            kraus.push_back(kron(ka, kb));
        }
    }
    return QuantumChannel(a.in_space().concat(b.in_space()), a.out_space().concat(b.out_space()),
                          detail::prune_kraus(std::move(kraus)));
}

// Σ_ij |i⟩⟨j| ⊗ ch(|i⟩⟨j|), input index most significant.
inline Matrix choi_matrix(const QuantumChannel& ch)
{
    const auto din = static_cast<Eigen::Index>(ch.in_space().dim());
    const auto dout = static_cast<Eigen::Index>(ch.out_space().dim());
    Matrix choi = Matrix::Zero(din * dout, din * dout);
    Vector v(din * dout);
    for (const auto& k : ch.kraus()) {
        for (Eigen::Index i = 0; i < din; ++i) {
            v.segment(i * dout, dout) = k.col(i);
        }
        choi.noalias() += v * v.adjoint();
    }
    return choi;
}

inline double choi_distance(const QuantumChannel& a, const QuantumChannel& b)
{
    if (!(a.in_space() == b.in_space()) || !(a.out_space() == b.out_space())) {
        throw Error(ErrorCode::SpaceMismatch, "channels act between different spaces");
    }
    return max_abs(choi_matrix(a) - choi_matrix(b));
}

inline CptpReport verify_cptp(const QuantumChannel& ch)
{
    CptpReport report;
    report.completeness_defect = ch.completeness_defect();
    report.min_choi_eigenvalue = min_eigenvalue(choi_matrix(ch));
    report.trace_preserving = report.completeness_defect <= tolerances().derived;
    report.completely_positive = report.min_choi_eigenvalue >= -tolerances().psd_floor;
    return report;
}

// Kraus set √p_e ⟨e'|U_W|e⟩ over the eigenbasis of the environment's
// initial state.  The output channel acts on the S factors in the order
// given by `s_labels`.
inline QuantumChannel dilation_channel(const UnitaryOperator& u_w, const DensityMatrix& rho_e0,
                                       const std::vector<std::string>& s_labels,
                                       const std::vector<std::string>& e_labels)
{
    const HilbertSpace& w = u_w.space();
    require_bipartition(w, s_labels, e_labels);
    const std::vector<std::string> env_order = rho_e0.space().labels();
    {
        const std::set<std::string> a(e_labels.begin(), e_labels.end());
        const std::set<std::string> b(env_order.begin(), env_order.end());
        if (a != b || !(w.select(env_order) == rho_e0.space())) {
            throw Error(ErrorCode::SpaceMismatch, "environment state does not live on the E factors");
        }
    }
    std::vector<std::string> order = s_labels;
    order.insert(order.end(), env_order.begin(), env_order.end());
    const Matrix u = permute_factors(u_w.matrix(), w, order);
    const HilbertSpace s_space = w.select(s_labels);
    const auto ds = static_cast<Eigen::Index>(s_space.dim());
    const auto de = static_cast<Eigen::Index>(rho_e0.dim());

    Eigen::SelfAdjointEigenSolver<Matrix> env(hermitize(rho_e0.matrix()));
    const RealVector& p = env.eigenvalues();
    const Matrix& basis = env.eigenvectors();

    std::vector<Matrix> kraus;
    kraus.reserve(static_cast<std::size_t>(de * de));
    for (Eigen::Index e = 0; e < de; ++e) {
        const double weight = std::sqrt(std::max(p(e), 0.0));
        // U (1_S ⊗ |e⟩): (ds·de) × ds
        Matrix u_e = Matrix::Zero(ds * de, ds);
        for (Eigen::Index b = 0; b < ds; ++b) {
            u_e.col(b) = u.middleCols(b * de, de) * basis.col(e);
        }
        for (Eigen::Index f = 0; f < de; ++f) {
            Matrix k(ds, ds);
            for (Eigen::Index a = 0; a < ds; ++a) {
                // ⟨f| applied to the E digits of row block a
                k.row(a) = basis.col(f).adjoint() * u_e.middleRows(a * de, de);
            }
            kraus.push_back(weight * k);
        }
    }
    return QuantumChannel(s_space, s_space, detail::prune_kraus(std::move(kraus)));
}

// Trace distance between the two-segment composition and the direct
// channel, where the t₂←t₁ segment is dilated against the environment's
// reduced state at t₁ (correlations with S deliberately discarded).
template <UnitaryFamily Family>
double semigroup_defect(const Family& family, const DensityMatrix& rho_e0,
                        const std::vector<std::string>& s_labels,
                        const std::vector<std::string>& e_labels, double t1, double t2,
                        const DensityMatrix& probe)
{
    if (!(t1 > 0.0) || !(t2 > t1)) {
        throw Error(ErrorCode::BadInterval, "semigroup defect requires 0 < t1 < t2");
    }
    const UnitaryOperator u1 = family(t1);
    const UnitaryOperator u2 = family(t2);
    const HilbertSpace& w = u1.space();

    const QuantumChannel first = dilation_channel(u1, rho_e0, s_labels, e_labels);
    const QuantumChannel direct = dilation_channel(u2, rho_e0, s_labels, e_labels);

    // ρ_W(t₁) in (S..., E-state order) to read off the environment marginal.
    std::vector<std::string> order = s_labels;
    const auto env_order = rho_e0.space().labels();
    order.insert(order.end(), env_order.begin(), env_order.end());
    const Matrix u1_ordered = permute_factors(u1.matrix(), w, order);
    const Matrix rho_w1 = u1_ordered * kron(probe.matrix(), rho_e0.matrix()) * u1_ordered.adjoint();
    const HilbertSpace ordered = w.select(order);
    const std::set<std::string> env_set(env_order.begin(), env_order.end());
    const DensityMatrix rho_e1 =
        DensityMatrix::from_trusted(rho_e0.space(), partial_trace_matrix(rho_w1, ordered, env_set));

    const UnitaryOperator u21(w, u2.matrix() * u1.matrix().adjoint());
    const QuantumChannel second = dilation_channel(u21, rho_e1, s_labels, e_labels);

    return trace_distance(apply(compose(second, first), probe), apply(direct, probe));
}

} // namespace ontic
