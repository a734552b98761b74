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

// Dense complex linear algebra over labeled composite Hilbert spaces.
//
// A HilbertSpace is an ordered list of (label, dimension) factors.  Basis
// index arithmetic follows the Kronecker convention: the first factor is
// the most significant digit of a composite index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ontic/error.hpp"

namespace ontic {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Factor {
    std::string label;
    std::size_t dim = 1;

    bool operator==(const Factor&) const = default;
};

class HilbertSpace {
public:
    HilbertSpace() = default;

    explicit HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors))
    {
        std::set<std::string> seen;
        for (const auto& f : factors_) {
            if (f.dim == 0) {
                throw Error(ErrorCode::InvalidArgument, "factor '" + f.label + "' has dimension 0");
            }
            if (!seen.insert(f.label).second) {
                throw Error(ErrorCode::LabelClash, "duplicate factor label '" + f.label + "'");
            }
            dim_ *= f.dim;
        }
    }

    static HilbertSpace single(std::string label, std::size_t dim)
    {
        return HilbertSpace({Factor{std::move(label), dim}});
    }

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return factors_.size(); }

    std::vector<std::string> labels() const
    {
        std::vector<std::string> out;
        out.reserve(factors_.size());
        for (const auto& f : factors_) {
            out.push_back(f.label);
        }
        return out;
    }

    bool contains(const std::string& label) const
    {
        return std::any_of(factors_.begin(), factors_.end(),
                           [&](const Factor& f) { return f.label == label; });
    }

    std::size_t position(const std::string& label) const
    {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i].label == label) {
                return i;
            }
        }
        throw Error(ErrorCode::UnknownSubsystem, "no factor labeled '" + label + "'");
    }

    HilbertSpace concat(const HilbertSpace& other) const
    {
        for (const auto& f : other.factors_) {
            if (contains(f.label)) {
                throw Error(ErrorCode::LabelClash, "label '" + f.label + "' present in both spaces");
            }
        }
        std::vector<Factor> all = factors_;
        all.insert(all.end(), other.factors_.begin(), other.factors_.end());
        return HilbertSpace(std::move(all));
    }

    // Factors named in `labels`, in the order given.
    HilbertSpace select(const std::vector<std::string>& labels) const
    {
        std::vector<Factor> out;
        out.reserve(labels.size());
        for (const auto& l : labels) {
            out.push_back(factors_[position(l)]);
        }
        return HilbertSpace(std::move(out));
    }

    // Factors named in `labels`, in this space's order.
    HilbertSpace restrict_to(const std::set<std::string>& labels) const
    {
        std::vector<Factor> out;
        for (const auto& f : factors_) {
            if (labels.count(f.label) != 0) {
                out.push_back(f);
            }
        }
        return HilbertSpace(std::move(out));
    }

    bool operator==(const HilbertSpace& other) const { return factors_ == other.factors_; }

private:
    std::vector<Factor> factors_;
    std::size_t dim_ = 1;
};

// ---------------------------------------------------------------------------
// Raw matrix helpers
// ---------------------------------------------------------------------------

inline double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m)
{
    return max_abs(m - m.adjoint());
}

inline Matrix hermitize(const Matrix& m)
{
    return 0.5 * (m + m.adjoint());
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector kron(const Vector& a, const Vector& b)
{
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

// Ascending eigenvalues of a Hermitian matrix.
inline RealVector hermitian_eigenvalues(const Matrix& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

inline double min_eigenvalue(const Matrix& m)
{
    return m.rows() == 0 ? 0.0 : hermitian_eigenvalues(m)(0);
}

// Map from composite index in `space` to composite index in the space whose
// factors are reordered as `order` (a permutation of the labels).
inline std::vector<std::size_t> permutation_map(const HilbertSpace& space,
                                                const std::vector<std::string>& order)
{
    if (order.size() != space.size()) {
        throw Error(ErrorCode::BadPartition, "reordering must name every factor exactly once");
    }
    const auto& factors = space.factors();
    const std::size_t n = factors.size();
    std::vector<std::size_t> pos(n);
    std::set<std::string> seen;
    for (std::size_t k = 0; k < n; ++k) {
        pos[k] = space.position(order[k]);
        if (!seen.insert(order[k]).second) {
            throw Error(ErrorCode::BadPartition, "label '" + order[k] + "' repeated");
        }
    }
    // stride of original factor pos[k] inside the reordered index
    std::vector<std::size_t> new_stride(n);
    std::size_t stride = 1;
    for (std::size_t k = n; k-- > 0;) {
        new_stride[pos[k]] = stride;
        stride *= factors[pos[k]].dim;
    }
    std::vector<std::size_t> map(space.dim());
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        std::size_t target = 0;
        for (std::size_t f = 0; f < n; ++f) {
            target += digits[f] * new_stride[f];
        }
        map[idx] = target;
        for (std::size_t f = n; f-- > 0;) {
            if (++digits[f] < factors[f].dim) {
                break;
            }
            digits[f] = 0;
        }
    }
    return map;
}

inline Matrix permute_factors(const Matrix& m, const HilbertSpace& space,
                              const std::vector<std::string>& order)
{
    const auto map = permutation_map(space, order);
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (std::size_t j = 0; j < map.size(); ++j) {
            out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

inline Vector permute_factors(const Vector& v, const HilbertSpace& space,
                              const std::vector<std::string>& order)
{
    const auto map = permutation_map(space, order);
    Vector out(v.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        out(static_cast<Eigen::Index>(map[i])) = v(static_cast<Eigen::Index>(i));
    }
    return out;
}

// Trace over the trailing `traced_dim` digits of a (kept ⊗ traced) matrix.
inline Matrix trace_trailing(const Matrix& m, std::size_t kept_dim, std::size_t traced_dim)
{
    const auto dk = static_cast<Eigen::Index>(kept_dim);
    const auto dt = static_cast<Eigen::Index>(traced_dim);
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index c = 0; c < dt; ++c) {
                acc += m(a * dt + c, b * dt + c);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

// Labels of `space` that are not in `keep`, in space order.
inline std::vector<std::string> complement_labels(const HilbertSpace& space,
                                                  const std::set<std::string>& keep)
{
    std::vector<std::string> out;
    for (const auto& f : space.factors()) {
        if (keep.count(f.label) == 0) {
            out.push_back(f.label);
        }
    }
    return out;
}

// Raw partial trace keeping `keep` in space order.  An empty `keep` or a
// `keep` covering every factor is accepted here; the typed wrapper enforces
// the proper-subset precondition.
inline Matrix partial_trace_matrix(const Matrix& m, const HilbertSpace& space,
                                   const std::set<std::string>& keep)
{
    for (const auto& l : keep) {
        if (!space.contains(l)) {
            throw Error(ErrorCode::UnknownSubsystem, "no factor labeled '" + l + "'");
        }
    }
    const HilbertSpace kept = space.restrict_to(keep);
    const auto traced = complement_labels(space, keep);
    if (traced.empty()) {
        return m;
    }
    std::vector<std::string> order = kept.labels();
    order.insert(order.end(), traced.begin(), traced.end());
    const Matrix reordered = permute_factors(m, space, order);
    return trace_trailing(reordered, kept.dim(), space.dim() / kept.dim());
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

class PureState {
public:
    PureState(HilbertSpace space, Vector amplitudes) : space_(std::move(space)), amps_(std::move(amplitudes))
    {
        const auto& tol = tolerances();
        if (static_cast<std::size_t>(amps_.size()) != space_.dim()) {
            throw Error(ErrorCode::SpaceMismatch, "amplitude count does not match the space dimension");
        }
        if (std::abs(amps_.norm() - 1.0) > tol.construction) {
            throw Error(ErrorCode::InvalidState, "state vector is not normalized");
        }
        canonicalize_phase();
    }

    static PureState normalized(HilbertSpace space, Vector amplitudes)
    {
        const double n = amplitudes.norm();
        if (!(n > 0.0)) {
            throw Error(ErrorCode::InvalidState, "zero vector cannot be normalized");
        }
        return PureState(std::move(space), amplitudes / n);
    }

    static PureState basis(HilbertSpace space, std::size_t index)
    {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
        if (index >= space.dim()) {
            throw Error(ErrorCode::InvalidArgument, "basis index out of range");
        }
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return PureState(std::move(space), std::move(v));
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return amps_; }
    std::size_t dim() const noexcept { return space_.dim(); }

    Matrix projector() const { return amps_ * amps_.adjoint(); }

private:
    // First amplitude above the phase tolerance becomes real and positive.
    void canonicalize_phase()
    {
        const double threshold = tolerances().phase;
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            const double mag = std::abs(amps_(i));
            if (mag > threshold) {
                amps_ *= std::conj(amps_(i)) / mag;
                amps_(i) = Complex(mag, 0.0);
                return;
            }
        }
    }

    HilbertSpace space_;
    Vector amps_;
};

class DensityMatrix {
public:
    // Fully validated construction: Hermitian, unit trace, positive semidefinite.
    DensityMatrix(HilbertSpace space, Matrix matrix) : space_(std::move(space)), m_(std::move(matrix))
    {
        check_shape_and_trace(tolerances().construction);
        const double floor = min_eigenvalue(m_);
        if (floor < -tolerances().psd_floor) {
            throw Error(ErrorCode::InvalidState,
                        "density matrix has eigenvalue " + std::to_string(floor));
        }
    }

    // For results that are positive by construction (channel outputs, partial
    // traces, pure-state projectors).  Hermiticity and trace are still checked
    // at the derived tolerance; the eigenvalue check is skipped.
    static DensityMatrix from_trusted(HilbertSpace space, Matrix matrix)
    {
        DensityMatrix out(std::move(space), std::move(matrix), Trusted{});
        out.check_shape_and_trace(tolerances().derived);
        out.m_ = hermitize(out.m_);
        return out;
    }

    static DensityMatrix from_pure(const PureState& psi)
    {
        return DensityMatrix(psi.space(), psi.projector(), Trusted{});
    }

    static DensityMatrix maximally_mixed(HilbertSpace space)
    {
        const auto d = static_cast<Eigen::Index>(space.dim());
        Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
        return DensityMatrix(std::move(space), std::move(m), Trusted{});
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return space_.dim(); }

private:
    struct Trusted {};
    DensityMatrix(HilbertSpace space, Matrix matrix, Trusted)
        : space_(std::move(space)), m_(std::move(matrix))
    {
    }

    void check_shape_and_trace(double tol) const
    {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        if (m_.rows() != d || m_.cols() != d) {
            throw Error(ErrorCode::SpaceMismatch, "matrix side does not match the space dimension");
        }
        if (hermiticity_defect(m_) > tol) {
            throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
        }
        if (std::abs(m_.trace() - Complex(1.0, 0.0)) > tol) {
            throw Error(ErrorCode::InvalidState, "density matrix trace differs from 1");
        }
    }

    HilbertSpace space_;
    Matrix m_;
};

// ρ_W − Tr_E[ρ_W] ⊗ Tr_S[ρ_W], expressed in the (S..., E...) factor order.
struct CorrelationOperator {
    HilbertSpace space;
    std::vector<std::string> s_labels;
    std::vector<std::string> e_labels;
    Matrix matrix;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b)
{
    HilbertSpace space = a.space().concat(b.space());
    return DensityMatrix::from_trusted(std::move(space), kron(a.matrix(), b.matrix()));
}

inline PureState tensor(const PureState& a, const PureState& b)
{
    HilbertSpace space = a.space().concat(b.space());
    return PureState::normalized(std::move(space), kron(a.amplitudes(), b.amplitudes()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::string>& keep)
{
    if (keep.empty()) {
        throw Error(ErrorCode::UnknownSubsystem, "keep set is empty");
    }
    for (const auto& l : keep) {
        if (!rho.space().contains(l)) {
            throw Error(ErrorCode::UnknownSubsystem, "no factor labeled '" + l + "'");
        }
    }
    if (keep.size() == rho.space().size()) {
        throw Error(ErrorCode::NothingToTrace, "keep set names every factor");
    }
    return DensityMatrix::from_trusted(rho.space().restrict_to(keep),
                                       partial_trace_matrix(rho.matrix(), rho.space(), keep));
}

// Checks that `first` and `second` partition the labels of `space`.
inline void require_bipartition(const HilbertSpace& space, const std::vector<std::string>& first,
                                const std::vector<std::string>& second)
{
    if (first.empty() || second.empty()) {
        throw Error(ErrorCode::BadPartition, "both sides of a split must be nonempty");
    }
    std::set<std::string> all;
    for (const auto* side : {&first, &second}) {
        for (const auto& l : *side) {
            if (!space.contains(l)) {
                throw Error(ErrorCode::BadPartition, "split names unknown factor '" + l + "'");
            }
            if (!all.insert(l).second) {
                throw Error(ErrorCode::BadPartition, "factor '" + l + "' appears twice in split");
            }
        }
    }
    if (all.size() != space.size()) {
        throw Error(ErrorCode::BadPartition, "split does not cover every factor");
    }
}

inline CorrelationOperator correlation_operator(const DensityMatrix& rho_w,
                                                const std::vector<std::string>& s_labels,
                                                const std::vector<std::string>& e_labels)
{
    const HilbertSpace& w = rho_w.space();
    require_bipartition(w, s_labels, e_labels);

    std::vector<std::string> order = s_labels;
    order.insert(order.end(), e_labels.begin(), e_labels.end());
    HilbertSpace ordered = w.select(order);
    const Matrix m = permute_factors(rho_w.matrix(), w, order);

    const std::size_t ds = ordered.select(s_labels).dim();
    const std::size_t de = ordered.dim() / ds;
    const std::set<std::string> s_set(s_labels.begin(), s_labels.end());
    const std::set<std::string> e_set(e_labels.begin(), e_labels.end());
    const Matrix rho_s = trace_trailing(m, ds, de);
    const Matrix rho_e = partial_trace_matrix(m, ordered, e_set);

    CorrelationOperator out{ordered, s_labels, e_labels, hermitize(m - kron(rho_s, rho_e))};
    const double defect = std::max(max_abs(partial_trace_matrix(out.matrix, ordered, s_set)),
                                   max_abs(partial_trace_matrix(out.matrix, ordered, e_set)));
    if (defect > tolerances().derived) {
        throw Error(ErrorCode::ToleranceBreach,
                    "correlation operator partial traces do not vanish (" + std::to_string(defect) + ")");
    }
    return out;
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b)
{
    if (!(a.space() == b.space())) {
        throw Error(ErrorCode::SpaceMismatch, "trace distance between different spaces");
    }
    return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

} // namespace ontic
