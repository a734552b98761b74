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

// Ontic decompositions and quantum conditional probabilities.
//
// A system's possible ontic states are the eigenvectors of its (reduced)
// density matrix.  Conditional probabilities between the ontic states of a
// parent at t and those of its subsystems at t' are
//
//     p(i_1..i_n; t' | w; t) = Tr[(P_1(i_1) ⊗ ... ⊗ P_n(i_n)) E{P_W(w)}]
//
// where P are eigenprojectors and E is the parent's CPTP map.  Rows are
// indexed by parent ontic index w, columns by the tuple (i_1..i_n) in
// row-major order (i_1 most significant).

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ontic/channels.hpp"
#include "ontic/qcore.hpp"

namespace ontic {

struct OnticEntry {
    double probability = 0.0;
    PureState state;
    Matrix projector;
    bool null = false;  // probability below the null threshold; kept so tables stay square
};

class OnticDecomposition {
public:
    OnticDecomposition(HilbertSpace space, std::vector<OnticEntry> entries,
                       std::vector<std::vector<std::size_t>> degeneracy_groups)
        : space_(std::move(space)), entries_(std::move(entries)), groups_(std::move(degeneracy_groups))
    {
    }

    const HilbertSpace& source_space() const noexcept { return space_; }
    const std::vector<OnticEntry>& entries() const noexcept { return entries_; }
    const std::vector<std::vector<std::size_t>>& degeneracy_groups() const noexcept { return groups_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const OnticEntry& operator[](std::size_t i) const { return entries_[i]; }

    bool degenerate() const noexcept { return !groups_.empty(); }

    RealVector probabilities() const
    {
        RealVector p(static_cast<Eigen::Index>(entries_.size()));
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            p(static_cast<Eigen::Index>(i)) = entries_[i].probability;
        }
        return p;
    }

    // Columns are the ontic state vectors in entry order.
    Matrix basis() const
    {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        Matrix v(d, static_cast<Eigen::Index>(entries_.size()));
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            v.col(static_cast<Eigen::Index>(i)) = entries_[i].state.amplitudes();
        }
        return v;
    }

    // Σ p_i P_i
    Matrix reconstruct() const
    {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        Matrix m = Matrix::Zero(d, d);
        for (const auto& e : entries_) {
            m += e.probability * e.projector;
        }
        return m;
    }

private:
    HilbertSpace space_;
    std::vector<OnticEntry> entries_;
    std::vector<std::vector<std::size_t>> groups_;
};

namespace detail {

// Descending lexicographic order over (re_0, im_0, re_1, im_1, ...).
inline bool lexicographically_greater(const Vector& a, const Vector& b)
{
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (a(k).real() != b(k).real()) {
            return a(k).real() > b(k).real();
        }
        if (a(k).imag() != b(k).imag()) {
            return a(k).imag() > b(k).imag();
        }
    }
    return false;
}

} // namespace detail

// Full eigendecomposition sorted by descending probability.  Eigenvalues
// whose consecutive gaps fall below `degeneracy_gap` form a degeneracy group;
// inside a group the basis returned by the eigensolver is kept and ordered by
// the canonical-phase coordinates, largest first.
inline OnticDecomposition ontic_decomposition(const DensityMatrix& rho,
                                              double degeneracy_gap = tolerances().degeneracy_gap)
{
    const auto& tol = tolerances();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(rho.matrix()));
    const RealVector& values = solver.eigenvalues();
    const Matrix& vectors = solver.eigenvectors();
    const auto d = static_cast<std::size_t>(values.size());

    std::vector<PureState> states;
    states.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
        states.push_back(PureState::normalized(rho.space(), vectors.col(static_cast<Eigen::Index>(k))));
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values(static_cast<Eigen::Index>(a)) > values(static_cast<Eigen::Index>(b));
    });

    // cluster consecutive near-equal eigenvalues
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t k = 0; k < d; ++k) {
        const double v = values(static_cast<Eigen::Index>(order[k]));
        if (k > 0 && values(static_cast<Eigen::Index>(order[k - 1])) - v < degeneracy_gap) {
            clusters.back().push_back(order[k]);
        } else {
            clusters.push_back({order[k]});
        }
    }

    std::vector<OnticEntry> entries;
    std::vector<std::vector<std::size_t>> groups;
    entries.reserve(d);
    for (auto& cluster : clusters) {
        std::stable_sort(cluster.begin(), cluster.end(), [&](std::size_t a, std::size_t b) {
            return detail::lexicographically_greater(states[a].amplitudes(), states[b].amplitudes());
        });
        if (cluster.size() > 1) {
            std::vector<std::size_t> g(cluster.size());
            std::iota(g.begin(), g.end(), entries.size());
            groups.push_back(std::move(g));
        }
        for (std::size_t k : cluster) {
            const double raw = values(static_cast<Eigen::Index>(k));
            if (raw < -tol.psd_floor) {
                throw Error(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(raw));
            }
            const double p = std::clamp(raw, 0.0, 1.0);
            Matrix proj = states[k].projector();
            entries.push_back(OnticEntry{p, states[k], std::move(proj), p < tol.null_probability});
        }
    }

    OnticDecomposition out(rho.space(), std::move(entries), std::move(groups));
    const double sum = out.probabilities().sum();
    if (std::abs(sum - 1.0) > tol.derived) {
        throw Error(ErrorCode::ToleranceBreach, "ontic probabilities sum to " + std::to_string(sum));
    }
    if (max_abs(out.reconstruct() - rho.matrix()) > tol.derived) {
        throw Error(ErrorCode::ToleranceBreach, "ontic decomposition does not reconstruct its source");
    }
    return out;
}

class ConditionalProbabilityTable {
public:
    ConditionalProbabilityTable(std::vector<std::vector<std::string>> splits,
                                std::vector<std::size_t> column_shape, Eigen::MatrixXd values)
        : splits_(std::move(splits)), shape_(std::move(column_shape)), values_(std::move(values))
    {
        std::size_t cols = 1;
        for (auto s : shape_) {
            cols *= s;
        }
        if (shape_.size() != splits_.size() || static_cast<std::size_t>(values_.cols()) != cols) {
            throw Error(ErrorCode::InvalidArgument, "table column shape does not match its values");
        }
    }

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t columns() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const std::vector<std::size_t>& column_shape() const noexcept { return shape_; }
    const std::vector<std::vector<std::string>>& splits() const noexcept { return splits_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    double operator()(std::size_t w, std::size_t col) const
    {
        return values_(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(col));
    }

    double at(std::size_t w, const std::vector<std::size_t>& tuple) const
    {
        return (*this)(w, column_index(tuple));
    }

    std::size_t column_index(const std::vector<std::size_t>& tuple) const
    {
        if (tuple.size() != shape_.size()) {
            throw Error(ErrorCode::InvalidArgument, "column tuple has the wrong arity");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            if (tuple[k] >= shape_[k]) {
                throw Error(ErrorCode::InvalidArgument, "column tuple entry out of range");
            }
            idx = idx * shape_[k] + tuple[k];
        }
        return idx;
    }

    std::vector<std::size_t> column_tuple(std::size_t col) const
    {
        std::vector<std::size_t> tuple(shape_.size());
        for (std::size_t k = shape_.size(); k-- > 0;) {
            tuple[k] = col % shape_[k];
            col /= shape_[k];
        }
        return tuple;
    }

    double row_sum(std::size_t w) const { return values_.row(static_cast<Eigen::Index>(w)).sum(); }
    double min_value() const { return values_.size() == 0 ? 0.0 : values_.minCoeff(); }

    double max_row_sum_defect() const
    {
        double worst = 0.0;
        for (std::size_t w = 0; w < rows(); ++w) {
            worst = std::max(worst, std::abs(row_sum(w) - 1.0));
        }
        return worst;
    }

    // Values with round-off negatives clamped to zero, for output.
    Eigen::MatrixXd clamped() const { return values_.cwiseMax(0.0); }

    // Throws ToleranceBreach when a value or a row sum is out of bounds.
    void validate() const
    {
        const auto& tol = tolerances();
        if (min_value() < -tol.derived) {
            throw Error(ErrorCode::ToleranceBreach, "negative conditional probability " + std::to_string(min_value()));
        }
        if (max_row_sum_defect() > tol.row_sum) {
            throw Error(ErrorCode::ToleranceBreach, "conditional probability row does not sum to 1");
        }
    }

private:
    std::vector<std::vector<std::string>> splits_;
    std::vector<std::size_t> shape_;
    Eigen::MatrixXd values_;
};

namespace detail {

struct ConditionalEvaluation {
    OnticDecomposition parent;
    std::vector<OnticDecomposition> subsystems;  // at t', one per group
    Matrix evolved;                              // parent state at t'
    ConditionalProbabilityTable table;
};

// Groups name label sets of the channel's output space; each group keeps the
// space's factor order.  Factors not in any group are traced out.
inline ConditionalEvaluation evaluate_conditional(const QuantumChannel& ch, const DensityMatrix& rho_t,
                                                  const std::vector<std::vector<std::string>>& groups,
                                                  double degeneracy_gap, bool require_partition)
{
    if (!(rho_t.space() == ch.in_space())) {
        throw Error(ErrorCode::SpaceMismatch, "parent state does not live on the channel input space");
    }
    const HilbertSpace& out = ch.out_space();
    if (groups.empty()) {
        throw Error(ErrorCode::BadPartition, "at least one subsystem is required");
    }
    std::set<std::string> covered;
    std::vector<std::vector<std::string>> ordered_groups;
    for (const auto& g : groups) {
        if (g.empty()) {
            throw Error(ErrorCode::BadPartition, "empty subsystem in split");
        }
        for (const auto& l : g) {
            if (!out.contains(l)) {
                throw Error(ErrorCode::BadPartition, "split names unknown factor '" + l + "'");
            }
            if (!covered.insert(l).second) {
                throw Error(ErrorCode::BadPartition, "factor '" + l + "' appears in two subsystems");
            }
        }
        ordered_groups.push_back(out.restrict_to(std::set<std::string>(g.begin(), g.end())).labels());
    }
    if (require_partition && covered.size() != out.size()) {
        throw Error(ErrorCode::BadPartition, "subsystems do not cover every factor");
    }

    OnticDecomposition parent = ontic_decomposition(rho_t, degeneracy_gap);
    Matrix evolved = ch.map(rho_t.matrix());

    std::vector<OnticDecomposition> subs;
    std::vector<std::size_t> shape;
    std::vector<std::string> order;
    Matrix frame = Matrix::Identity(1, 1);
    for (const auto& g : ordered_groups) {
        const std::set<std::string> keep(g.begin(), g.end());
        HilbertSpace sub_space = out.select(g);
        Matrix reduced = partial_trace_matrix(evolved, out, keep);
        subs.push_back(ontic_decomposition(DensityMatrix::from_trusted(std::move(sub_space), std::move(reduced)),
                                           degeneracy_gap));
        shape.push_back(subs.back().size());
        frame = kron(frame, subs.back().basis());
        order.insert(order.end(), g.begin(), g.end());
    }
    const std::size_t kept_dim = static_cast<std::size_t>(frame.rows());
    const std::size_t rest_dim = out.dim() / kept_dim;
    const auto rest = complement_labels(out, covered);
    order.insert(order.end(), rest.begin(), rest.end());

    Eigen::MatrixXd values(static_cast<Eigen::Index>(parent.size()), frame.cols());
    for (std::size_t w = 0; w < parent.size(); ++w) {
        const Matrix evolved_projector = ch.map(parent[w].projector);
        const Matrix reduced = trace_trailing(permute_factors(evolved_projector, out, order), kept_dim, rest_dim);
        const Matrix in_frame = frame.adjoint() * reduced * frame;
        values.row(static_cast<Eigen::Index>(w)) = in_frame.diagonal().real().transpose();
    }
    ConditionalProbabilityTable table(ordered_groups, std::move(shape), std::move(values));
    return ConditionalEvaluation{std::move(parent), std::move(subs), std::move(evolved), std::move(table)};
}

} // namespace detail

inline ConditionalProbabilityTable conditional_probabilities(const QuantumChannel& ch_w, const DensityMatrix& rho_w_t,
                                                             const std::vector<std::vector<std::string>>& splits,
                                                             double degeneracy_gap = tolerances().degeneracy_gap)
{
    auto eval = detail::evaluate_conditional(ch_w, rho_w_t, splits, degeneracy_gap, true);
    eval.table.validate();
    return std::move(eval.table);
}

// p(w'; t' | w; t) = Tr[P(w'; t') E{P(w; t)}]
inline ConditionalProbabilityTable single_system_conditional(const QuantumChannel& ch, const DensityMatrix& rho_t,
                                                             double degeneracy_gap = tolerances().degeneracy_gap)
{
    return conditional_probabilities(ch, rho_t, {ch.out_space().labels()}, degeneracy_gap);
}

// Max discrepancy between each subsystem's ontic probabilities at t' taken
// directly, Tr[(P_k(i) ⊗ 1) ρ_W(t')], and propagated through the table,
// Σ_{w, other indices} p(..., i, ... | w) p(w).
inline double bayesian_propagation_check(const QuantumChannel& ch_w, const DensityMatrix& rho_w_t,
                                         const std::vector<std::vector<std::string>>& splits,
                                         double degeneracy_gap = tolerances().degeneracy_gap)
{
    const auto eval = detail::evaluate_conditional(ch_w, rho_w_t, splits, degeneracy_gap, true);
    const auto& table = eval.table;
    const RealVector p_w = eval.parent.probabilities();
    const HilbertSpace& out = ch_w.out_space();

    double worst = 0.0;
    for (std::size_t k = 0; k < eval.subsystems.size(); ++k) {
        const auto& groups = table.splits();
        const std::set<std::string> keep(groups[k].begin(), groups[k].end());
        const Matrix reduced = partial_trace_matrix(eval.evolved, out, keep);
        const Matrix basis = eval.subsystems[k].basis();
        const RealVector direct = (basis.adjoint() * reduced * basis).diagonal().real();

        RealVector propagated = RealVector::Zero(direct.size());
        for (std::size_t w = 0; w < table.rows(); ++w) {
            for (std::size_t col = 0; col < table.columns(); ++col) {
                const auto i = static_cast<Eigen::Index>(table.column_tuple(col)[k]);
                propagated(i) += table(w, col) * p_w(static_cast<Eigen::Index>(w));
            }
        }
        worst = std::max(worst, (direct - propagated).cwiseAbs().maxCoeff());
    }
    return worst;
}

// Tr[AB] for positive semidefinite A, B.
inline double psd_pairing_check(const Matrix& a, const Matrix& b)
{
    const auto& tol = tolerances();
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw Error(ErrorCode::SpaceMismatch, "operands must be square and of equal size");
    }
    for (const Matrix* m : {&a, &b}) {
        if (hermiticity_defect(*m) > tol.construction || min_eigenvalue(*m) < -tol.psd_floor) {
            throw Error(ErrorCode::NotPSD, "operand is not positive semidefinite");
        }
    }
    return (a * b).trace().real();
}

} // namespace ontic
