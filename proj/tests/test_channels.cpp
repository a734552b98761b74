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
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ontic/channels.hpp"
#include "ontic/gates.hpp"
#include "ontic/random.hpp"

using namespace ontic;

namespace {

Matrix projector(std::size_t dim, std::size_t i)
{
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

QuantumChannel dephasing(const std::string& label)
{
    return QuantumChannel(gates::qubit(label), gates::qubit(label), {projector(2, 0), projector(2, 1)});
}

// Tr_E[U (ρ_S ⊗ ρ_E) U†] with S first, by explicit loops.
Matrix stinespring_oracle(const Matrix& u, const Matrix& rho_s, const Matrix& rho_e)
{
    const Matrix joint = u * oracle::kron(rho_s, rho_e) * u.adjoint();
    return oracle::partial_trace(joint, {static_cast<std::size_t>(rho_s.rows()), static_cast<std::size_t>(rho_e.rows())},
                                 {true, false});
}

} // namespace

TEST(Unitary, RejectsNonUnitary)
{
    try {
        UnitaryOperator(gates::qubit("q"), 2.0 * gates::pauli_x());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotUnitary);
    }
    EXPECT_NO_THROW(UnitaryOperator(gates::qubit("q"), gates::hadamard()));
}

TEST(GeneratorFamily, MatchesClosedForm)
{
    const GeneratorFamily fam(gates::qubit("q"), gates::pauli_x());
    for (double t : {0.0, 0.3, 1.7}) {
        const Matrix expected = std::cos(t) * Matrix::Identity(2, 2) - Complex(0.0, std::sin(t)) * gates::pauli_x();
        EXPECT_LT(max_abs(fam(t).matrix() - expected), 1e-14);
    }
    EXPECT_NEAR(fam.spectral_norm(), 1.0, 1e-14);
}

TEST(GeneratorFamily, GatesAtPi)
{
    const GeneratorFamily cnot(gates::qubits("a", "b"), gates::cnot_generator());
    const GeneratorFamily swap(gates::qubits("a", "b"), gates::swap_generator());
    EXPECT_LT(max_abs(cnot(std::numbers::pi).matrix() - gates::cnot()), 1e-14);
    EXPECT_LT(max_abs(swap(std::numbers::pi).matrix() - gates::swap()), 1e-14);
}

TEST(UnitaryChannel, GateActions)
{
    const auto up = DensityMatrix::from_pure(gates::up("q"));
    const auto x = unitary_channel(UnitaryOperator(gates::qubit("q"), gates::pauli_x()));
    const auto h = unitary_channel(UnitaryOperator(gates::qubit("q"), gates::hadamard()));
    EXPECT_LT(max_abs(apply(x, up).matrix() - gates::down("q").projector()), 1e-15);
    EXPECT_LT(max_abs(apply(h, up).matrix() - gates::plus("q").projector()), 1e-15);
}

TEST(UnitaryChannel, ConjugatesAndPreservesTrace)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const HilbertSpace s = HilbertSpace::single("q", 3);
        const auto u = random_unitary(rng, s);
        const auto rho = random_density(rng, s);
        const auto out = apply(unitary_channel(u), rho);
        EXPECT_LT(max_abs(out.matrix() - u.matrix() * rho.matrix() * u.matrix().adjoint()), 1e-14);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-13);
    }
}

TEST(IdentityChannel, LeavesStatesUnchanged)
{
    Rng rng(1);
    const auto rho = random_density(rng, HilbertSpace({{"a", 2}, {"b", 3}}));
    EXPECT_LT(max_abs(apply(identity_channel(rho.space()), rho).matrix() - rho.matrix()), 1e-15);
}

TEST(Apply, AgreesWithOracleKrausSum)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const HilbertSpace s = HilbertSpace::single("q", 3);
        const auto ch = random_dilation_channel(rng, s, 2);
        const auto rho = random_density(rng, s);
        EXPECT_LT(max_abs(apply(ch, rho).matrix() - oracle::apply_kraus(ch.kraus(), rho.matrix())), 1e-14);
    }
}

TEST(Apply, RejectsWrongSpace)
{
    const auto ch = identity_channel(gates::qubit("a"));
    EXPECT_THROW((void)apply(ch, DensityMatrix::maximally_mixed(gates::qubit("b"))), Error);
}

TEST(Dilation, FactorizedUnitaryActsAsSubsystemUnitary)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto us = random_unitary(rng, gates::qubit("S"));
        const auto ue = random_unitary(rng, HilbertSpace::single("E", 3));
        const UnitaryOperator uw(HilbertSpace({{"S", 2}, {"E", 3}}), kron(us.matrix(), ue.matrix()));
        const auto rho_e = random_density(rng, HilbertSpace::single("E", 3));
        const auto ch = dilation_channel(uw, rho_e, {"S"}, {"E"});
        EXPECT_LT(choi_distance(ch, unitary_channel(us)), 1e-13);
        for (int k = 0; k < 3; ++k) {
            const auto rho = random_density(rng, gates::qubit("S"));
            EXPECT_LT(max_abs(apply(ch, rho).matrix() - us.matrix() * rho.matrix() * us.matrix().adjoint()), 1e-13);
        }
    }
}

TEST(Dilation, IdentityUnitaryGivesWeightedIdentities)
{
    Matrix pe = Matrix::Zero(3, 3);
    pe(0, 0) = 0.5;
    pe(1, 1) = 0.3;
    pe(2, 2) = 0.2;
    const DensityMatrix rho_e(HilbertSpace::single("E", 3), pe);
    const auto ch = dilation_channel(UnitaryOperator::identity(HilbertSpace({{"S", 2}, {"E", 3}})), rho_e, {"S"}, {"E"});
    // only the e = e' blocks survive pruning: √p_e · 1
    ASSERT_EQ(ch.kraus().size(), 3u);
    std::vector<double> weights;
    for (const auto& k : ch.kraus()) {
        const Complex c = k(0, 0);
        EXPECT_LT(max_abs(k - c * Matrix::Identity(2, 2)), 1e-15);
        weights.push_back(std::norm(c));
    }
    std::sort(weights.begin(), weights.end());
    EXPECT_NEAR(weights[0], 0.2, 1e-15);
    EXPECT_NEAR(weights[1], 0.3, 1e-15);
    EXPECT_NEAR(weights[2], 0.5, 1e-15);
    EXPECT_LT(choi_distance(ch, identity_channel(gates::qubit("S"))), 1e-15);
}

TEST(Dilation, CnotWithEnvironmentZeroIsFullDephasing)
{
    const UnitaryOperator cnot(gates::qubits("S", "E"), gates::cnot());
    const auto ch = dilation_channel(cnot, DensityMatrix::from_pure(gates::up("E")), {"S"}, {"E"});
    ASSERT_EQ(ch.kraus().size(), 2u);
    // ⟨0|CNOT|0⟩ = diag(1, 0) and ⟨1|CNOT|0⟩ = diag(0, 1), in either order
    const bool direct = max_abs(ch.kraus()[0] - projector(2, 0)) < 1e-15;
    EXPECT_LT(max_abs(ch.kraus()[direct ? 0 : 1] - projector(2, 0)), 1e-15);
    EXPECT_LT(max_abs(ch.kraus()[direct ? 1 : 0] - projector(2, 1)), 1e-15);
    EXPECT_LT(choi_distance(ch, dephasing("S")), 1e-15);
}

TEST(Dilation, AgreesWithStinespringOracle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const HilbertSpace w({{"S", 3}, {"E", 2}});
        const auto u = random_unitary(rng, w);
        const auto rho_e = random_density(rng, HilbertSpace::single("E", 2));
        const auto ch = dilation_channel(u, rho_e, {"S"}, {"E"});
        const auto rho = random_density(rng, HilbertSpace::single("S", 3));
        EXPECT_LT(max_abs(apply(ch, rho).matrix() - stinespring_oracle(u.matrix(), rho.matrix(), rho_e.matrix())),
                  1e-13);
    }
}

TEST(Dilation, EnvironmentFirstInParentOrder)
{
    Rng rng(9);
    const HilbertSpace w({{"E", 2}, {"S", 2}});
    const auto u = random_unitary(rng, w);
    const auto rho_e = random_density(rng, HilbertSpace::single("E", 2));
    const auto ch = dilation_channel(u, rho_e, {"S"}, {"E"});
    const Matrix u_se = permute_factors(u.matrix(), w, {"S", "E"});
    const auto rho = random_density(rng, HilbertSpace::single("S", 2));
    EXPECT_LT(max_abs(apply(ch, rho).matrix() - stinespring_oracle(u_se, rho.matrix(), rho_e.matrix())), 1e-13);
}

TEST(Dilation, OutputIsAlwaysCptp)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto ch = random_dilation_channel(rng, HilbertSpace({{"a", 2}, {"b", 2}}), 3);
        const auto r = verify_cptp(ch);
        EXPECT_TRUE(r.trace_preserving);
        EXPECT_TRUE(r.completely_positive);
        EXPECT_GE(r.min_choi_eigenvalue, -1e-10);
    }
}

TEST(Dephasing, PlusBecomesMaximallyMixed)
{
    const auto out = apply(dephasing("q"), DensityMatrix::from_pure(gates::plus("q")));
    EXPECT_LT(max_abs(out.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Compose, IdentityIsNeutral)
{
    Rng rng(4);
    const HilbertSpace s = HilbertSpace::single("q", 2);
    const auto ch = random_dilation_channel(rng, s);
    EXPECT_LT(choi_distance(compose(identity_channel(s), ch), ch), 1e-14);
    EXPECT_LT(choi_distance(compose(ch, identity_channel(s)), ch), 1e-14);
}

TEST(Compose, UnitariesMultiplyInOrder)
{
    Rng rng(6);
    const HilbertSpace s = HilbertSpace::single("q", 3);
    const auto u = random_unitary(rng, s);
    const auto v = random_unitary(rng, s);
    const auto vu = compose(unitary_channel(v), unitary_channel(u));
    EXPECT_LT(choi_distance(vu, unitary_channel(UnitaryOperator(s, v.matrix() * u.matrix()))), 1e-13);
}

TEST(Compose, DephasingIsIdempotent)
{
    const auto d = dephasing("q");
    const auto dd = compose(d, d);
    EXPECT_EQ(dd.kraus().size(), 2u);  // cross products P0 P1 are pruned
    EXPECT_LT(choi_distance(dd, d), 1e-15);
}

TEST(Compose, RejectsMismatchedSpaces)
{
    EXPECT_THROW((void)compose(identity_channel(gates::qubit("a")), identity_channel(gates::qubit("b"))), Error);
}

TEST(TensorChannel, ActsFactorwise)
{
    Rng rng(8);
    const auto a = random_dilation_channel(rng, gates::qubit("a"));
    const auto b = random_dilation_channel(rng, HilbertSpace::single("b", 3));
    const auto ab = tensor(a, b);
    const auto ra = random_density(rng, gates::qubit("a"));
    const auto rb = random_density(rng, HilbertSpace::single("b", 3));
    const Matrix expected = oracle::kron(oracle::apply_kraus(a.kraus(), ra.matrix()),
                                         oracle::apply_kraus(b.kraus(), rb.matrix()));
    EXPECT_LT(max_abs(apply(ab, tensor(ra, rb)).matrix() - expected), 1e-14);
}

TEST(Choi, IdentityIsUnnormalizedMaximallyEntangled)
{
    const Matrix c = choi_matrix(identity_channel(gates::qubit("q")));
    Matrix expected = Matrix::Zero(4, 4);
    for (int i : {0, 3}) {
        for (int j : {0, 3}) {
            expected(i, j) = 1.0;
        }
    }
    EXPECT_LT(max_abs(c - expected), 1e-15);
}

TEST(VerifyCptp, UnitaryPasses)
{
    Rng rng(2);
    const auto r = verify_cptp(unitary_channel(random_unitary(rng, HilbertSpace::single("q", 4))));
    EXPECT_TRUE(r.ok());
    EXPECT_GE(r.min_choi_eigenvalue, -1e-10);
}

TEST(VerifyCptp, HalfIdentityFailsCompleteness)
{
    const auto q = gates::qubit("q");
    const auto ch = QuantumChannel::unchecked(q, q, {0.5 * Matrix::Identity(2, 2)});
    const auto r = verify_cptp(ch);
    EXPECT_FALSE(r.trace_preserving);
    EXPECT_TRUE(r.completely_positive);
    EXPECT_NEAR(r.completeness_defect, 0.75, 1e-15);  // Σ K†K = 0.25·1
    try {
        QuantumChannel(q, q, {0.5 * Matrix::Identity(2, 2)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotCPTP);
    }
}

// All four matrix units: Σ K†K = 2·1, positive Choi matrix.
TEST(VerifyCptp, MatrixUnitsOvershootCompleteness)
{
    const auto q = gates::qubit("q");
    std::vector<Matrix> units;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Matrix e = Matrix::Zero(2, 2);
            e(i, j) = 1.0;
            units.push_back(e);
        }
    }
    const auto r = verify_cptp(QuantumChannel::unchecked(q, q, units));
    EXPECT_TRUE(r.completely_positive);
    EXPECT_FALSE(r.trace_preserving);
    EXPECT_NEAR(r.completeness_defect, 1.0, 1e-15);
}

TEST(Semigroup, FactorizedFamilyHasNoDefect)
{
    const Matrix id = Matrix::Identity(2, 2);
    const GeneratorFamily fam(gates::qubits("S", "E"), kron(gates::pauli_x(), id) + kron(id, gates::pauli_y()));
    const auto rho_e = DensityMatrix::from_pure(gates::up("E"));
    Rng rng(12);
    for (int k = 0; k < 10; ++k) {
        const auto probe = random_density(rng, gates::qubit("S"));
        EXPECT_LE(semigroup_defect(fam, rho_e, {"S"}, {"E"}, 0.4 + 0.1 * k, 1.3 + 0.2 * k, probe), 1e-10);
    }
}

TEST(Semigroup, SwapRefactorizationRestoresComposability)
{
    const GeneratorFamily fam(gates::qubits("S", "E"), gates::swap_generator());
    const auto rho_e = DensityMatrix::from_pure(gates::up("E"));
    const auto probe = DensityMatrix::from_pure(gates::plus("S"));
    for (double t2 : {3.5, 4.0, 1.5 * std::numbers::pi, 6.0}) {
        EXPECT_LE(semigroup_defect(fam, rho_e, {"S"}, {"E"}, std::numbers::pi, t2, probe), 1e-8);
    }
}

TEST(Semigroup, EntanglingFamilyFrozenValues)
{
    // Brute-force values on 2⊗2 for H = |1⟩⟨1| ⊗ |−⟩⟨−|, E in |0⟩, probe |+⟩.
    const GeneratorFamily fam(gates::qubits("S", "E"), gates::cnot_generator());
    const auto rho_e = DensityMatrix::from_pure(gates::up("E"));
    const auto probe = DensityMatrix::from_pure(gates::plus("S"));
    EXPECT_NEAR(semigroup_defect(fam, rho_e, {"S"}, {"E"}, std::numbers::pi / 2, std::numbers::pi, probe), 0.25,
                1e-12);
    EXPECT_NEAR(semigroup_defect(fam, rho_e, {"S"}, {"E"}, 1.0, 2.0, probe), 0.114924423532965, 1e-12);
    EXPECT_NEAR(semigroup_defect(fam, rho_e, {"S"}, {"E"}, std::numbers::pi / 4, std::numbers::pi / 2, probe),
                0.07322330470336313, 1e-12);
}

TEST(Semigroup, RejectsBadInterval)
{
    const GeneratorFamily fam(gates::qubits("S", "E"), gates::swap_generator());
    const auto rho_e = DensityMatrix::from_pure(gates::up("E"));
    const auto probe = DensityMatrix::from_pure(gates::plus("S"));
    for (auto [t1, t2] : {std::pair{0.0, 1.0}, std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
        try {
            (void)semigroup_defect(fam, rho_e, {"S"}, {"E"}, t1, t2, probe);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadInterval);
        }
    }
}
