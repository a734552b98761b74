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

// Named experiments driven by a ScenarioConfig.  Each scenario renders its
// artifact as text; `run` writes it atomically and prints one summary line.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ontic/channels.hpp"
#include "ontic/cli/config.hpp"
#include "ontic/error.hpp"
#include "ontic/gates.hpp"
#include "ontic/io.hpp"
#include "ontic/measurement.hpp"
#include "ontic/opendyn.hpp"
#include "ontic/random.hpp"
#include "ontic/trajectories.hpp"

namespace ontic::cli {

struct ScenarioOutput {
    std::string content;
    std::string summary;
    ExitCode status = ExitCode::ok;
};

inline ExitCode exit_code_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::ToleranceBreach:
    case ErrorCode::NotCPTP:
        return ExitCode::tolerance;
    default:
        return ExitCode::validation;
    }
}

namespace detail {

[[noreturn]] inline void invalid(const ScenarioConfig& c, const std::string& key, const std::string& message)
{
    std::size_t line = 0;
    std::size_t column = 0;
    if (auto it = c.params.find(key); it != c.params.end()) {
        line = it->second.line;
        column = it->second.column;
    }
    throw ConfigError(ExitCode::validation, {Diagnostic{line, column, message}});
}

inline std::string fmt(double v) { return io::format_double(v); }

inline PureState subject_state(const ScenarioConfig& c)
{
    const std::size_t d = c.count("subject_dim");
    const HilbertSpace space = HilbertSpace::single("S", d);
    Vector v(static_cast<Eigen::Index>(d));
    if (c.has("weights")) {
        const auto w = c.reals("weights");
        if (w.size() != d) {
            invalid(c, "weights", "'weights' needs subject_dim = " + std::to_string(d) + " entries");
        }
        double sum = 0.0;
        for (double x : w) {
            if (!(x >= 0.0)) {
                invalid(c, "weights", "'weights' must be non-negative");
            }
            sum += x;
        }
        if (!(sum > 0.0)) {
            invalid(c, "weights", "'weights' must not all be zero");
        }
        for (std::size_t m = 0; m < d; ++m) {
            v(static_cast<Eigen::Index>(m)) = std::sqrt(w[m] / sum);
        }
    } else {
        const auto re = c.reals("amplitudes");
        const auto im = c.has("amplitudes_im") ? c.reals("amplitudes_im") : std::vector<double>(re.size(), 0.0);
        if (re.size() != d) {
            invalid(c, "amplitudes", "'amplitudes' needs subject_dim = " + std::to_string(d) + " entries");
        }
        if (im.size() != d) {
            invalid(c, "amplitudes_im", "'amplitudes_im' needs subject_dim = " + std::to_string(d) + " entries");
        }
        for (std::size_t m = 0; m < d; ++m) {
            v(static_cast<Eigen::Index>(m)) = Complex(re[m], im[m]);
        }
        if (!(v.norm() > 0.0)) {
            invalid(c, "amplitudes", "'amplitudes' must not all be zero");
        }
    }
    return PureState::normalized(space, v);
}

inline MeasurementModel measurement_model(const ScenarioConfig& c)
{
    MeasurementModel m;
    m.subject_dim = c.count("subject_dim");
    m.rate_apparatus = c.real("rate_apparatus");
    m.rate_environment = c.real("rate_environment");
    m.duration = c.real("duration");
    if (c.has("n_apparatus")) {
        m.n_apparatus = c.count("n_apparatus");
        m.n_environment = c.count("n_environment");
    }
    return m;
}

} // namespace detail

inline ScenarioOutput run_measure(const ScenarioConfig& c)
{
    const PureState psi = detail::subject_state(c);
    const MeasurementModel model = detail::measurement_model(c);
    model.validate();
    const auto report = simulate_measurement(model, psi);
    const auto entropy = error_entropy_bound(model, report.max_born_deviation, c.real("slack"));
    const SweepRow row{model.total_factors(),       report.overlap_apparatus, report.overlap_environment,
                       report.max_offdiag,          report.max_born_deviation, entropy.s_max,
                       entropy.bound};

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = io::sweep_csv({row});
    } else {
        io::json j = io::to_json(report);
        j["S_max"] = entropy.s_max;
        j["bound"] = entropy.bound;
        j["bound_satisfied"] = entropy.satisfied;
        out.content = j.dump(2) + "\n";
    }
    out.summary = "measure: N=" + std::to_string(row.n) + " max_offdiag=" + detail::fmt(row.max_offdiag) +
                  " max_born_deviation=" + detail::fmt(row.max_born_deviation);
    return out;
}

inline ScenarioOutput run_sweep(const ScenarioConfig& c)
{
    const PureState psi = detail::subject_state(c);
    MeasurementModel model = detail::measurement_model(c);
    const bool apparatus = c.text("axis") == "apparatus";
    (apparatus ? model.n_environment : model.n_apparatus) = c.count("n_other");
    model.validate();

    const std::size_t lo = c.count("n_min");
    const std::size_t hi = c.count("n_max");
    const std::size_t step = c.count("n_step");
    if (hi < lo) {
        detail::invalid(c, "n_max", "'n_max' must not be below 'n_min'");
    }
    if ((hi - lo) / step >= 100000) {
        detail::invalid(c, "n_step", "sweep would produce more than 100000 rows");
    }
    std::vector<std::size_t> ns;
    for (std::size_t n = lo; n <= hi; n += step) {
        ns.push_back(n);
    }
    const auto rows = decoherence_scaling_sweep(model, psi, ns,
                                                apparatus ? PointerSubsystem::apparatus : PointerSubsystem::environment);

    std::optional<double> slope;
    try {
        slope = log_offdiag_slope(rows);
    } catch (const Error&) {
        // fewer than two rows or a vanishing coherence
    }

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = io::sweep_csv(rows);
    } else {
        io::json j;
        j["axis"] = c.text("axis");
        j["rows"] = io::json::array();
        for (const auto& r : rows) {
            j["rows"].push_back(io::to_json(r));
        }
        j["log_offdiag_slope"] = slope ? io::json(*slope) : io::json(nullptr);
        out.content = j.dump(2) + "\n";
    }
    out.summary = "sweep: " + std::to_string(rows.size()) + " rows along " + c.text("axis") +
                  (slope ? " slope=" + detail::fmt(*slope) : std::string());
    return out;
}

// Two-qubit families on (S, E) with E starting in |0⟩.
//   entangling  H = |1⟩⟨1| ⊗ |−⟩⟨−|, defaults t1 = π/2, t2 = π
//   factorized  H = X ⊗ 1 + 1 ⊗ Y,     defaults t1 = 1,   t2 = 2
//   swap        H = (1 − SWAP)/2,      defaults t1 = π,   t2 = 3π/2
struct SemigroupFamily {
    GeneratorFamily family;
    double t1;
    double t2;
};

inline SemigroupFamily semigroup_family(const std::string& name)
{
    using namespace gates;
    const HilbertSpace w = qubits("S", "E");
    const Matrix id = Matrix::Identity(2, 2);
    if (name == "entangling") {
        return {GeneratorFamily(w, cnot_generator()), std::numbers::pi / 2.0, std::numbers::pi};
    }
    if (name == "factorized") {
        return {GeneratorFamily(w, kron(pauli_x(), id) + kron(id, pauli_y())), 1.0, 2.0};
    }
    if (name == "swap") {
        return {GeneratorFamily(w, swap_generator()), std::numbers::pi, 1.5 * std::numbers::pi};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown semigroup family '" + name + "'");
}

inline ScenarioOutput run_semigroup(const ScenarioConfig& c)
{
    const std::string name = c.text("family");
    const SemigroupFamily fam = semigroup_family(name);
    const double t1 = c.has("t1") ? c.real("t1") : fam.t1;
    const double t2 = c.has("t2") ? c.real("t2") : fam.t2;
    if (!(t1 > 0.0)) {
        detail::invalid(c, "t1", "'t1' must be positive");
    }
    if (!(t2 > t1)) {
        detail::invalid(c, "t2", "'t2' must exceed t1 = " + detail::fmt(t1));
    }

    const std::string probe_name = c.text("probe");
    DensityMatrix probe = DensityMatrix::from_pure(gates::plus("S"));
    if (probe_name == "zero") {
        probe = DensityMatrix::from_pure(gates::up("S"));
    } else if (probe_name == "one") {
        probe = DensityMatrix::from_pure(gates::down("S"));
    } else if (probe_name == "random") {
        Rng rng = Rng::stream(c.seed, 0);
        probe = random_density(rng, gates::qubit("S"));
    }
    const DensityMatrix rho_e0 = DensityMatrix::from_pure(gates::up("E"));
    const double defect = semigroup_defect(fam.family, rho_e0, {"S"}, {"E"}, t1, t2, probe);

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = "family,t1,t2,probe,defect\n" + name + "," + detail::fmt(t1) + "," + detail::fmt(t2) + "," +
                      probe_name + "," + detail::fmt(defect) + "\n";
    } else {
        io::json j{{"family", name}, {"t1", t1}, {"t2", t2}, {"probe", probe_name}, {"defect", defect}};
        out.content = j.dump(2) + "\n";
    }
    out.summary = "semigroup: family=" + name + " t1=" + detail::fmt(t1) + " t2=" + detail::fmt(t2) +
                  " defect=" + detail::fmt(defect);
    return out;
}

// Repeated interaction of S with fresh copies of E in |0⟩ under a random
// generator of spectral norm `coupling`; ρ_S(0) is a random mixed state.
inline MarkovKernelChain random_repeated_interaction_chain(const ScenarioConfig& c)
{
    const std::size_t ds = c.count("system_dim");
    const std::size_t de = c.count("env_dim");
    Rng rng = Rng::stream(c.seed, 0);
    const Matrix h = c.real("coupling") * random_hermitian(rng, ds * de);
    const GeneratorFamily family(HilbertSpace({{"S", ds}, {"E", de}}), h);
    const DensityMatrix rho_s0 = random_density(rng, HilbertSpace::single("S", ds));
    const DensityMatrix rho_e = DensityMatrix::from_pure(PureState::basis(HilbertSpace::single("E", de), 0));
    if (!(c.real("step") > 0.0)) {
        detail::invalid(c, "step", "'step' must be positive");
    }
    return markov_chain_from_repeated_interaction(family, rho_e, rho_s0, c.real("step"), c.count("steps"));
}

inline ScenarioOutput run_trajectories(const ScenarioConfig& c)
{
    const std::size_t ds = c.count("system_dim");
    if (c.count("initial") > ds) {
        detail::invalid(c, "initial", "'initial' must not exceed system_dim = " + std::to_string(ds));
    }
    const std::size_t initial = c.count("initial") - 1;
    const MarkovKernelChain chain = random_repeated_interaction_chain(c);
    const std::size_t samples = c.count("samples");

    ScenarioOutput out;
    std::ostringstream summary;
    summary << "trajectories: N=" << ds << " M=" << chain.steps();
    if (c.format == Format::json) {
        const auto measure = enumerate_trajectory_measure(chain, ds, initial);
        double total = 0.0;
        for (const auto& [path, p] : measure) {
            total += p;
        }
        io::json j = io::measure_to_json(chain.times(), measure);
        j["initial"] = initial + 1;
        out.content = j.dump(2) + "\n";
        summary << " enumerated=" << measure.size() << " total=" << detail::fmt(total);
    } else {
        std::ostringstream os;
        os << "sample,t,index\n";
        for (std::size_t s = 0; s < samples; ++s) {
            const OnticTrajectory traj = sample_trajectory(chain, initial, c.seed, s);
            for (std::size_t k = 0; k < traj.times.size(); ++k) {
                os << s << ',' << detail::fmt(traj.times[k]) << ',' << (traj.indices[k] + 1) << '\n';
            }
        }
        out.content = os.str();
        summary << " samples=" << samples;
    }
    out.summary = summary.str();
    return out;
}

// Qubit whose state axis starts on +x and turns toward +z at rate omega,
// generated by H = −(omega/2) Y.  The index column is the strand occupied by
// the closed-system ontic state at each time.
inline ScenarioOutput run_helix(const ScenarioConfig& c)
{
    const double omega = c.real("omega");
    const std::size_t points = c.count("points");
    const double t0 = c.real("t0");
    const double t_end = c.real("t_end");
    if (!(t_end > t0)) {
        detail::invalid(c, "t_end", "'t_end' must exceed t0");
    }
    std::vector<double> times(points);
    for (std::size_t k = 0; k < points; ++k) {
        times[k] = t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    const BlochHelix helix = bloch_helix(omega, times);

    const std::size_t strand = c.count("strand");
    const GeneratorFamily family(gates::qubit("S"), -0.5 * omega * gates::pauli_y());
    const PureState psi0 = strand == 1 ? gates::plus("S") : gates::minus("S");
    OnticTrajectory traj = closed_system_trajectory(family, psi0, times);
    for (std::size_t k = 0; k < points; ++k) {
        const Vector occupied = traj.frames[k].col(0);
        const double on_first = std::norm(bloch_state(helix.strand1[k]).dot(occupied));
        traj.indices[k] = on_first > 0.5 ? 0 : 1;
    }

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = io::trajectory_csv(traj, &helix);
    } else {
        io::json j;
        j["times"] = times;
        auto strand_json = [](const std::vector<BlochPoint>& s) {
            io::json a = io::json::array();
            for (const auto& p : s) {
                a.push_back({{"theta", p.theta}, {"phi", p.phi}});
            }
            return a;
        };
        j["strand1"] = strand_json(helix.strand1);
        j["strand2"] = strand_json(helix.strand2);
        io::json idx = io::json::array();
        for (auto i : traj.indices) {
            idx.push_back(i + 1);
        }
        j["index"] = std::move(idx);
        out.content = j.dump(2) + "\n";
    }
    out.summary = "helix: omega=" + detail::fmt(omega) + " points=" + std::to_string(points) +
                  " strand=" + std::to_string(strand);
    return out;
}

inline ScenarioOutput run_nonlinear(const ScenarioConfig& c)
{
    const std::string pair_name = c.text("pair");
    const WitnessPair pair =
        pair_name == "bell_vs_product" ? bell_vs_product_pair() : werner_vs_product_pair(c.real("werner_p"));

    const std::string channel_name = c.text("channel");
    QuantumChannel channel = identity_channel(gates::qubits("S", "E"));
    if (channel_name == "cnot") {
        channel = unitary_channel(UnitaryOperator(gates::qubits("S", "E"), gates::cnot()));
    } else {
        Rng rng = Rng::stream(c.seed, 0);
        const QuantumChannel on_s = random_dilation_channel(rng, gates::qubit("S"));
        const QuantumChannel on_e = random_dilation_channel(rng, gates::qubit("E"));
        channel = tensor(on_s, on_e);
    }
    const auto report = nonlinearity_witness(channel, pair.first, pair.second, {"S"}, {"E"});

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = "pair_id,channel,distance_before,distance_after\n" + pair.id + "," + channel_name + "," +
                      detail::fmt(report.distance_before) + "," + detail::fmt(report.distance_after) + "\n";
    } else {
        out.content = io::witness_to_json(report, channel, pair.id).dump(2) + "\n";
    }
    out.summary = "nonlinear: pair=" + pair.id + " channel=" + channel_name +
                  " distance_after=" + detail::fmt(report.distance_after);
    return out;
}

// Loads a channel JSON without trusting it and reports its CPTP checks.
// A failing channel still produces the report, with ExitCode::tolerance.
inline ScenarioOutput run_verify(const ScenarioConfig& c)
{
    const std::string path = c.text("channel_file");
    io::json j;
    try {
        j = io::json::parse(io::read_file(path));
    } catch (const io::json::exception& e) {
        const auto& entry = c.params.at("channel_file");
        throw ConfigError(ExitCode::parse, {Diagnostic{entry.line, entry.column, path + ": " + e.what()}});
    } catch (const std::runtime_error& e) {
        const auto& entry = c.params.at("channel_file");
        throw ConfigError(ExitCode::parse, {Diagnostic{entry.line, entry.column, e.what()}});
    }
    const QuantumChannel channel = io::channel_from_json(j);
    const CptpReport report = verify_cptp(channel);

    ScenarioOutput out;
    if (c.format == Format::csv) {
        out.content = std::string("trace_preserving,completely_positive,min_choi_eigenvalue,completeness_defect\n") +
                      (report.trace_preserving ? "true" : "false") + "," +
                      (report.completely_positive ? "true" : "false") + "," +
                      detail::fmt(report.min_choi_eigenvalue) + "," + detail::fmt(report.completeness_defect) + "\n";
    } else {
        io::json r = io::to_json(report);
        r["channel_file"] = path;
        out.content = r.dump(2) + "\n";
    }
    out.status = report.ok() ? ExitCode::ok : ExitCode::tolerance;
    out.summary = std::string("verify: ") + (report.ok() ? "CPTP" : "NOT CPTP") +
                  " completeness_defect=" + detail::fmt(report.completeness_defect) +
                  " min_choi_eigenvalue=" + detail::fmt(report.min_choi_eigenvalue);
    return out;
}

inline ScenarioOutput run_scenario(const ScenarioConfig& c)
{
    switch (c.scenario) {
    case Scenario::measure: return run_measure(c);
    case Scenario::sweep: return run_sweep(c);
    case Scenario::semigroup: return run_semigroup(c);
    case Scenario::trajectories: return run_trajectories(c);
    case Scenario::helix: return run_helix(c);
    case Scenario::nonlinear: return run_nonlinear(c);
    case Scenario::verify: return run_verify(c);
    }
    throw std::logic_error("unhandled scenario");
}

inline std::string default_output_path(const ScenarioConfig& c)
{
    return std::string(to_string(c.scenario)) + "." + to_string(c.format);
}

// Runs the scenario, writes its artifact and prints the summary line.
// Returns the process exit status; diagnostics go to `err`.
inline int run(const ScenarioConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        const ScenarioOutput result = run_scenario(c);
        const std::string path = c.output_path.value_or(default_output_path(c));
        io::write_atomic(path, result.content);
        out << result.summary << " seed=" << c.seed << " out=" << path << '\n';
        return static_cast<int>(result.status);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(exit_code_for(e));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::failure);
    }
}

} // namespace ontic::cli
