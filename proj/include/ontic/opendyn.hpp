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

// Open-system dynamics of a subsystem S inside a parent W = S + E when S and
// E need not start uncorrelated.

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ontic/channels.hpp"
#include "ontic/gates.hpp"
#include "ontic/ontic.hpp"
#include "ontic/qcore.hpp"

namespace ontic {

namespace detail {

inline void require_projector(const Matrix& p, double tol)
{
    if (p.rows() != p.cols() || hermiticity_defect(p) > tol || max_abs(p * p - p) > tol) {
        throw Error(ErrorCode::NotAProjector, "operator is not an orthogonal projector");
    }
}

} // namespace detail

struct ConditionalChannel {
    QuantumChannel channel;
    CptpReport report;
};

// X ↦ Tr_E[E_W{X ⊗ |e⟩⟨e|}] for a rank-1 environment projector.  Kraus
// operators are (1 ⊗ ⟨f|) K_α (1 ⊗ |e⟩) over the standard basis f of E.
inline ConditionalChannel conditional_channel_given_env(const QuantumChannel& ch_w, const HilbertSpace& e_space,
                                                        const Matrix& p_e, const std::vector<std::string>& s_labels)
{
    const auto& tol = tolerances();
    const HilbertSpace& w = ch_w.in_space();
    if (!(ch_w.out_space() == w)) {
        throw Error(ErrorCode::SpaceMismatch, "parent channel must map W to itself");
    }
    const std::vector<std::string> e_labels = e_space.labels();
    require_bipartition(w, s_labels, e_labels);
    if (!(w.select(e_labels) == e_space)) {
        throw Error(ErrorCode::SpaceMismatch, "environment space does not match the parent's E factors");
    }
    const auto de = static_cast<Eigen::Index>(e_space.dim());
    if (p_e.rows() != de) {
        throw Error(ErrorCode::SpaceMismatch, "environment projector has the wrong size");
    }
    detail::require_projector(p_e, tol.derived);
    if (std::abs(p_e.trace().real() - 1.0) > tol.derived) {
        throw Error(ErrorCode::NotAProjector, "environment projector is not rank one");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(p_e));
    const Vector e = solver.eigenvectors().col(de - 1);

    std::vector<std::string> order = s_labels;
    order.insert(order.end(), e_labels.begin(), e_labels.end());
    const HilbertSpace s_space = w.select(s_labels);
    const auto ds = static_cast<Eigen::Index>(s_space.dim());

    std::vector<Matrix> kraus;
    for (const auto& k_w : ch_w.kraus()) {
        const Matrix k = permute_factors(k_w, w, order);
        Matrix k_e(ds * de, ds);  // K (1 ⊗ |e⟩)
        for (Eigen::Index b = 0; b < ds; ++b) {
            k_e.col(b) = k.middleCols(b * de, de) * e;
        }
        for (Eigen::Index f = 0; f < de; ++f) {
            Matrix out(ds, ds);
            for (Eigen::Index a = 0; a < ds; ++a) {
                out.row(a) = k_e.row(a * de + f);
            }
            kraus.push_back(std::move(out));
        }
    }
    QuantumChannel channel(s_space, s_space, detail::prune_kraus(std::move(kraus)));
    CptpReport report = verify_cptp(channel);
    return ConditionalChannel{std::move(channel), report};
}

// p_{S|W}(s'; t' | w; t) = Tr[(P_S(s'; t') ⊗ 1_E) E_W{P_W(w; t)}]
inline ConditionalProbabilityTable parent_conditioned_probabilities(const QuantumChannel& ch_w,
                                                                    const DensityMatrix& rho_w_t,
                                                                    const std::vector<std::string>& s_labels,
                                                                    double degeneracy_gap = tolerances().degeneracy_gap)
{
    auto eval = detail::evaluate_conditional(ch_w, rho_w_t, {s_labels}, degeneracy_gap, false);
    eval.table.validate();
    return std::move(eval.table);
}

struct FactorizationResult {
    bool factorizes = false;
    double defect = 0.0;  // Frobenius norm of P_W − P_S ⊗ P_E, (S, E) factor order
    Matrix p_s;
    Matrix p_e;
};

// Candidates are the support projectors of Tr_E[P_W] and Tr_S[P_W].  Exact
// for product projectors; otherwise the defect bounds the best product
// approximation from above.
inline FactorizationResult projector_factorization_check(const HilbertSpace& space, const Matrix& p_w,
                                                         const std::vector<std::string>& s_labels,
                                                         const std::vector<std::string>& e_labels)
{
    require_bipartition(space, s_labels, e_labels);
    if (p_w.rows() != static_cast<Eigen::Index>(space.dim())) {
        throw Error(ErrorCode::SpaceMismatch, "projector side does not match the space dimension");
    }
    detail::require_projector(p_w, tolerances().derived);

    std::vector<std::string> order = s_labels;
    order.insert(order.end(), e_labels.begin(), e_labels.end());
    const HilbertSpace ordered = space.select(order);
    const Matrix p = permute_factors(p_w, space, order);

    auto support = [](const Matrix& m) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
        const auto& vals = solver.eigenvalues();
        const auto& vecs = solver.eigenvectors();
        const double cut = 1e-8 * std::max(1.0, vals.cwiseAbs().maxCoeff());
        Matrix proj = Matrix::Zero(m.rows(), m.cols());
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            if (vals(k) > cut) {
                proj += vecs.col(k) * vecs.col(k).adjoint();
            }
        }
        return proj;
    };

    const std::set<std::string> s_set(s_labels.begin(), s_labels.end());
    const std::set<std::string> e_set(e_labels.begin(), e_labels.end());
    FactorizationResult r;
    r.p_s = support(partial_trace_matrix(p, ordered, s_set));
    r.p_e = support(partial_trace_matrix(p, ordered, e_set));
    r.defect = (p - kron(r.p_s, r.p_e)).norm();
    r.factorizes = r.defect <= 1e-8;
    return r;
}

struct NonlinearityWitnessReport {
    double distance_before = 0.0;  // trace distance of the two S marginals at t
    double distance_after = 0.0;   // trace distance of the two S marginals at t'
    DensityMatrix rho_s_1;
    DensityMatrix rho_s_2;
};

// Two parents with the same S marginal evolved under one channel.  A
// positive distance_after shows that the reduced dynamics is not a function
// of the S marginal alone.
inline NonlinearityWitnessReport nonlinearity_witness(const QuantumChannel& ch_w, const DensityMatrix& rho_w_1,
                                                      const DensityMatrix& rho_w_2,
                                                      const std::vector<std::string>& s_labels,
                                                      const std::vector<std::string>& e_labels)
{
    const HilbertSpace& w = ch_w.in_space();
    require_bipartition(w, s_labels, e_labels);
    if (!(rho_w_1.space() == w) || !(rho_w_2.space() == w) || !(ch_w.out_space() == w)) {
        throw Error(ErrorCode::SpaceMismatch, "witness states and channel must share the parent space");
    }
    const std::set<std::string> keep(s_labels.begin(), s_labels.end());
    const double before = trace_distance(partial_trace(rho_w_1, keep), partial_trace(rho_w_2, keep));
    if (before > tolerances().derived) {
        throw Error(ErrorCode::NotAWitnessPair, "the two parents have different S marginals");
    }
    DensityMatrix after_1 = partial_trace(apply(ch_w, rho_w_1), keep);
    DensityMatrix after_2 = partial_trace(apply(ch_w, rho_w_2), keep);
    const double after = trace_distance(after_1, after_2);
    return NonlinearityWitnessReport{before, after, std::move(after_1), std::move(after_2)};
}

// ---------------------------------------------------------------------------
// Curated witness pairs on qubits "S", "E"
// ---------------------------------------------------------------------------

struct WitnessPair {
    std::string id;
    DensityMatrix first;
    DensityMatrix second;
};

inline WitnessPair bell_vs_product_pair()
{
    const HilbertSpace w = gates::qubits("S", "E");
    return {"bell_vs_product", DensityMatrix::from_pure(gates::bell("S", "E")), DensityMatrix::maximally_mixed(w)};
}

// Werner state of weight p against the product of maximally mixed qubits.
inline WitnessPair werner_vs_product_pair(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Werner weight must lie in [0, 1]");
    }
    const HilbertSpace w = gates::qubits("S", "E");
    return {"werner_vs_product", gates::werner("S", "E", p), DensityMatrix::maximally_mixed(w)};
}

} // namespace ontic
