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


#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ontic/gates.hpp"
#include "ontic/opendyn.hpp"
#include "ontic/random.hpp"

using namespace ontic;

namespace {

Matrix basis_projector(std::size_t dim, std::size_t i)
{
    return PureState::basis(HilbertSpace::single("x", dim), i).projector();
}

// X ↦ Tr_E[E_W(X ⊗ |e⟩⟨e|)], S first, by explicit loops.
Matrix conditional_oracle(const QuantumChannel& ch_w, const Matrix& x, const Matrix& p_e)
{
    const Matrix out = oracle::apply_kraus(ch_w.kraus(), oracle::kron(x, p_e));
    return oracle::partial_trace(out, {static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(p_e.rows())},
                                 {true, false});
}

QuantumChannel cnot_channel(bool s_controls)
{
    const HilbertSpace w = gates::qubits("S", "E");
    const Matrix u = s_controls ? gates::cnot() : gates::swap() * gates::cnot() * gates::swap();
    return unitary_channel(UnitaryOperator(w, u));
}

} // namespace

TEST(ConditionalChannel, IdentityParent)
{
    const HilbertSpace w({{"S", 2}, {"E", 3}});
    const auto r = conditional_channel_given_env(identity_channel(w), HilbertSpace::single("E", 3),
                                                 basis_projector(3, 2), {"S"});
    EXPECT_LT(choi_distance(r.channel, identity_channel(gates::qubit("S"))), 1e-15);
    EXPECT_TRUE(r.report.ok());
}

TEST(ConditionalChannel, FactorizedParentGivesSubsystemChannel)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto es = random_dilation_channel(rng, gates::qubit("S"));
        const auto ee = random_dilation_channel(rng, HilbertSpace::single("E", 3));
        const auto psi_e = random_pure_state(rng, HilbertSpace::single("E", 3));
        const auto r =
            conditional_channel_given_env(tensor(es, ee), HilbertSpace::single("E", 3), psi_e.projector(), {"S"});
        EXPECT_LT(choi_distance(r.channel, es), 1e-13);
        EXPECT_TRUE(r.report.ok());
    }
}

TEST(ConditionalChannel, CnotWithSystemControl)
{
    // Tr_E[CNOT (X ⊗ |1⟩⟨1|) CNOT] keeps the control populations but the
    // target records which branch occurred, so coherences vanish.
    const auto ch = cnot_channel(true);
    const auto r = conditional_channel_given_env(ch, gates::qubit("E"), basis_projector(2, 1), {"S"});
    const QuantumChannel dephasing(gates::qubit("S"), gates::qubit("S"), {basis_projector(2, 0), basis_projector(2, 1)});
    EXPECT_LT(choi_distance(r.channel, dephasing), 1e-15);
    Rng rng(3);
    for (int k = 0; k < 5; ++k) {
        const auto x = random_density(rng, gates::qubit("S"));
        EXPECT_LT(max_abs(r.channel.map(x.matrix()) - conditional_oracle(ch, x.matrix(), basis_projector(2, 1))),
                  1e-15);
    }
}

TEST(ConditionalChannel, CnotWithEnvironmentControl)
{
    const auto ch = cnot_channel(false);
    const auto flipped = conditional_channel_given_env(ch, gates::qubit("E"), basis_projector(2, 1), {"S"});
    const auto kept = conditional_channel_given_env(ch, gates::qubit("E"), basis_projector(2, 0), {"S"});
    EXPECT_LT(choi_distance(flipped.channel, unitary_channel(UnitaryOperator(gates::qubit("S"), gates::pauli_x()))),
              1e-15);
    EXPECT_LT(choi_distance(kept.channel, identity_channel(gates::qubit("S"))), 1e-15);
}

TEST(ConditionalChannel, AgreesWithOracleOnRandomParents)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const HilbertSpace w({{"S", 2}, {"E", 3}});
        const auto ch = random_dilation_channel(rng, w);
        const auto psi_e = random_pure_state(rng, HilbertSpace::single("E", 3));
        const auto r = conditional_channel_given_env(ch, HilbertSpace::single("E", 3), psi_e.projector(), {"S"});
        const auto x = random_density(rng, gates::qubit("S"));
        EXPECT_LT(max_abs(r.channel.map(x.matrix()) - conditional_oracle(ch, x.matrix(), psi_e.projector())), 1e-13);
        EXPECT_TRUE(r.report.ok());
    }
}

TEST(ConditionalChannel, RejectsNonProjectors)
{
    const auto ch = identity_channel(gates::qubits("S", "E"));
    auto code_of = [&](const Matrix& p) {
        try {
            (void)conditional_channel_given_env(ch, gates::qubit("E"), p, {"S"});
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of(Matrix::Identity(2, 2)), ErrorCode::NotAProjector);      // rank 2
    EXPECT_EQ(code_of(0.5 * Matrix::Identity(2, 2)), ErrorCode::NotAProjector);  // not idempotent
    EXPECT_EQ(code_of(Matrix::Identity(3, 3)), ErrorCode::SpaceMismatch);
}

TEST(ParentConditioned, IdentityOnProduct)
{
    Matrix ms = Matrix::Zero(2, 2);
    ms(0, 0) = 0.8;
    ms(1, 1) = 0.2;
    Matrix me = Matrix::Zero(2, 2);
    me(0, 0) = 0.35;
    me(1, 1) = 0.65;
    const auto rho = tensor(DensityMatrix(gates::qubit("S"), ms), DensityMatrix(gates::qubit("E"), me));
    const auto eval = detail::evaluate_conditional(identity_channel(rho.space()), rho, {{"S"}}, 1e-8, false);
    const auto& t = eval.table;
    ASSERT_EQ(t.rows(), 4u);
    ASSERT_EQ(t.columns(), 2u);
    for (std::size_t w = 0; w < 4; ++w) {
        // parent w = |s⟩|e⟩ lands on the S ontic state equal to s
        const Matrix p_s = partial_trace_matrix(eval.parent[w].projector, rho.space(), {"S"});
        for (std::size_t c = 0; c < 2; ++c) {
            const Vector& s = eval.subsystems[0][c].state.amplitudes();
            const double expected = std::abs((s.adjoint() * p_s * s)(0, 0).real());
            EXPECT_NEAR(t(w, c), expected, 1e-12);
            EXPECT_TRUE(std::abs(t(w, c)) < 1e-12 || std::abs(t(w, c) - 1.0) < 1e-12);
        }
    }
}

TEST(ParentConditioned, UncorrelatedMatchesConditionalChannelRoute)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const HilbertSpace w = gates::qubits("S", "E");
        const auto rho = tensor(random_density(rng, gates::qubit("S")), random_density(rng, gates::qubit("E")));
        const auto ch = random_dilation_channel(rng, w);
        const auto table = parent_conditioned_probabilities(ch, rho, {"S"});
        const auto eval = detail::evaluate_conditional(ch, rho, {{"S"}}, 1e-8, false);
        for (std::size_t k = 0; k < eval.parent.size(); ++k) {
            const Matrix& pw = eval.parent[k].projector;
            const Matrix p_s = partial_trace_matrix(pw, w, {"S"});
            const Matrix p_e = partial_trace_matrix(pw, w, {"E"});
            const auto cond = conditional_channel_given_env(ch, gates::qubit("E"), p_e, {"S"});
            const Matrix evolved = cond.channel.map(p_s);
            for (std::size_t c = 0; c < table.columns(); ++c) {
                const Vector& s = eval.subsystems[0][c].state.amplitudes();
                EXPECT_NEAR(table(k, c), (s.adjoint() * evolved * s)(0, 0).real(), 1e-10);
            }
        }
    }
}

TEST(Factorization, ProductProjector)
{
    const HilbertSpace w = gates::qubits("S", "E");
    const auto r = projector_factorization_check(w, kron(basis_projector(2, 0), basis_projector(2, 1)), {"S"}, {"E"});
    EXPECT_TRUE(r.factorizes);
    EXPECT_LE(r.defect, 1e-12);
}

TEST(Factorization, BellProjectorFails)
{
    const HilbertSpace w = gates::qubits("S", "E");
    const auto r = projector_factorization_check(w, gates::bell("S", "E").projector(), {"S"}, {"E"});
    EXPECT_FALSE(r.factorizes);
    // both reduced supports are the full qubit, so the residual is ‖P − 1‖ = √3
    EXPECT_NEAR(r.defect, std::sqrt(3.0), 1e-12);
    EXPECT_GE(r.defect, 0.4);
}

TEST(Factorization, RandomProductVectors)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const HilbertSpace w({{"E", 3}, {"S", 2}});
        const auto psi = tensor(random_pure_state(rng, HilbertSpace::single("E", 3)),
                                random_pure_state(rng, gates::qubit("S")));
        const auto r = projector_factorization_check(w, psi.projector(), {"S"}, {"E"});
        EXPECT_TRUE(r.factorizes);
        EXPECT_LE(r.defect, 1e-10);
    }
}

TEST(Factorization, RejectsNonProjector)
{
    try {
        (void)projector_factorization_check(gates::qubits("S", "E"), 0.5 * Matrix::Identity(4, 4), {"S"}, {"E"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAProjector);
    }
}

TEST(Nonlinearity, IdenticalParentsStayTogether)
{
    Rng rng(1);
    const HilbertSpace w = gates::qubits("S", "E");
    const auto rho = random_density(rng, w);
    const auto r = nonlinearity_witness(random_dilation_channel(rng, w), rho, rho, {"S"}, {"E"});
    EXPECT_EQ(r.distance_before, 0.0);
    EXPECT_NEAR(r.distance_after, 0.0, 1e-15);
}

TEST(Nonlinearity, BellVersusProductUnderCnot)
{
    const auto pair = bell_vs_product_pair();
    const auto r = nonlinearity_witness(cnot_channel(true), pair.first, pair.second, {"S"}, {"E"});
    EXPECT_NEAR(r.distance_before, 0.0, 1e-15);
    EXPECT_NEAR(r.distance_after, 0.5, 1e-12);
    // CNOT|Φ⁺⟩ = |+⟩|0⟩
    EXPECT_LT(max_abs(r.rho_s_1.matrix() - gates::plus("S").projector()), 1e-15);
    EXPECT_LT(max_abs(r.rho_s_2.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Nonlinearity, WernerDistanceIsHalfTheWeight)
{
    for (double p : {0.0, 0.2, 0.5, 0.9}) {
        const auto pair = werner_vs_product_pair(p);
        const auto r = nonlinearity_witness(cnot_channel(true), pair.first, pair.second, {"S"}, {"E"});
        EXPECT_NEAR(r.distance_after, p / 2.0, 1e-12);
    }
    EXPECT_THROW((void)werner_vs_product_pair(1.5), Error);
}

TEST(Nonlinearity, FactorizedChannelsAreBlind)
{
    const auto pair = bell_vs_product_pair();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto ch = tensor(random_dilation_channel(rng, gates::qubit("S")),
                               random_dilation_channel(rng, gates::qubit("E")));
        const auto r = nonlinearity_witness(ch, pair.first, pair.second, {"S"}, {"E"});
        EXPECT_LE(r.distance_after, 1e-12);
    }
}

TEST(Nonlinearity, RejectsDifferentMarginals)
{
    const HilbertSpace w = gates::qubits("S", "E");
    const auto a = DensityMatrix::from_pure(tensor(gates::up("S"), gates::up("E")));
    const auto b = DensityMatrix::maximally_mixed(w);
    try {
        (void)nonlinearity_witness(identity_channel(w), a, b, {"S"}, {"E"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAWitnessPair);
    }
}
