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

// File formats.
//
//   matrix    { "space": [{"label", "dim"}...], "re": [[...]], "im": [[...]] }
//   channel   { "in_space": [...], "out_space": [...], "kraus": [{"re", "im"}...] }
//   table     CSV `w,i1,...,in,p` or { "parent_indices", "splits", "values" }
//   trajectory CSV `t,index[,theta1,phi1,theta2,phi2]`
//   measure   { "times": [...], "trajectories": [{"indices": [...], "p"}...] }
//   witness   { "distance_before", "distance_after", "channel", "pair_id" }
//   sweep     CSV `N,overlap_A,overlap_E,max_offdiag,max_born_deviation,S_max,bound`
//
// Matrices are row-major.  Ontic indices are written one-based.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ontic/channels.hpp"
#include "ontic/measurement.hpp"
#include "ontic/ontic.hpp"
#include "ontic/opendyn.hpp"
#include "ontic/qcore.hpp"
#include "ontic/trajectories.hpp"

namespace ontic::io {

using json = nlohmann::json;

// Shortest text that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

inline json space_to_json(const HilbertSpace& space)
{
    json out = json::array();
    for (const auto& f : space.factors()) {
        out.push_back({{"label", f.label}, {"dim", f.dim}});
    }
    return out;
}

inline HilbertSpace space_from_json(const json& j)
{
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidArgument, "space must be an array of {label, dim}");
    }
    std::vector<Factor> factors;
    for (const auto& f : j) {
        if (!f.is_object() || !f.contains("label") || !f.contains("dim") || !f["label"].is_string() ||
            !f["dim"].is_number_unsigned()) {
            throw Error(ErrorCode::InvalidArgument, "space factor must be {\"label\": string, \"dim\": positive integer}");
        }
        factors.push_back({f["label"].get<std::string>(), f["dim"].get<std::size_t>()});
    }
    return HilbertSpace(std::move(factors));
}

inline json matrix_parts_to_json(const Matrix& m)
{
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ii = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ii.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return {{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_parts_from_json(const json& j, Eigen::Index rows, Eigen::Index cols)
{
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw Error(ErrorCode::InvalidArgument, "matrix needs \"re\" and \"im\" arrays");
    }
    const json& re = j["re"];
    const json& im = j["im"];
    if (!re.is_array() || !im.is_array() || static_cast<Eigen::Index>(re.size()) != rows ||
        static_cast<Eigen::Index>(im.size()) != rows) {
        throw Error(ErrorCode::SpaceMismatch, "matrix row count does not match its space");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& rr = re[static_cast<std::size_t>(i)];
        const json& ii = im[static_cast<std::size_t>(i)];
        if (!rr.is_array() || !ii.is_array() || static_cast<Eigen::Index>(rr.size()) != cols ||
            static_cast<Eigen::Index>(ii.size()) != cols) {
            throw Error(ErrorCode::SpaceMismatch, "matrix column count does not match its space");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& a = rr[static_cast<std::size_t>(c)];
            const json& b = ii[static_cast<std::size_t>(c)];
            if (!a.is_number() || !b.is_number()) {
                throw Error(ErrorCode::InvalidArgument, "matrix entries must be numbers");
            }
            m(i, c) = Complex(a.get<double>(), b.get<double>());
        }
    }
    return m;
}

inline json matrix_to_json(const HilbertSpace& space, const Matrix& m)
{
    json out = matrix_parts_to_json(m);
    out["space"] = space_to_json(space);
    return out;
}

inline json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.space(), rho.matrix()); }

inline DensityMatrix density_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("space")) {
        throw Error(ErrorCode::InvalidArgument, "density matrix needs a \"space\"");
    }
    HilbertSpace space = space_from_json(j["space"]);
    const auto d = static_cast<Eigen::Index>(space.dim());
    return DensityMatrix(std::move(space), matrix_parts_from_json(j, d, d));
}

inline json to_json(const QuantumChannel& ch)
{
    json kraus = json::array();
    for (const auto& k : ch.kraus()) {
        kraus.push_back(matrix_parts_to_json(k));
    }
    return {{"in_space", space_to_json(ch.in_space())},
            {"out_space", space_to_json(ch.out_space())},
            {"kraus", std::move(kraus)}};
}

// Loads without the completeness check so broken Kraus sets can be diagnosed.
inline QuantumChannel channel_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("in_space") || !j.contains("out_space") || !j.contains("kraus") ||
        !j["kraus"].is_array()) {
        throw Error(ErrorCode::InvalidArgument, "channel needs \"in_space\", \"out_space\" and \"kraus\"");
    }
    HilbertSpace in = space_from_json(j["in_space"]);
    HilbertSpace out = space_from_json(j["out_space"]);
    std::vector<Matrix> kraus;
    for (const auto& k : j["kraus"]) {
        kraus.push_back(matrix_parts_from_json(k, static_cast<Eigen::Index>(out.dim()),
                                               static_cast<Eigen::Index>(in.dim())));
    }
    return QuantumChannel::unchecked(std::move(in), std::move(out), std::move(kraus));
}

inline json to_json(const CptpReport& r)
{
    return {{"trace_preserving", r.trace_preserving},
            {"completely_positive", r.completely_positive},
            {"min_choi_eigenvalue", r.min_choi_eigenvalue},
            {"completeness_defect", r.completeness_defect}};
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

inline std::string table_csv(const ConditionalProbabilityTable& table)
{
    std::ostringstream os;
    os << "w";
    for (std::size_t k = 0; k < table.column_shape().size(); ++k) {
        os << ",i" << (k + 1);
    }
    os << ",p\n";
    const Eigen::MatrixXd values = table.clamped();
    for (std::size_t w = 0; w < table.rows(); ++w) {
        for (std::size_t col = 0; col < table.columns(); ++col) {
            os << (w + 1);
            for (std::size_t i : table.column_tuple(col)) {
                os << ',' << (i + 1);
            }
            os << ',' << format_double(values(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(col))) << '\n';
        }
    }
    return os.str();
}

inline json to_json(const ConditionalProbabilityTable& table)
{
    json parents = json::array();
    for (std::size_t w = 0; w < table.rows(); ++w) {
        parents.push_back(w + 1);
    }
    json values = json::array();
    const Eigen::MatrixXd v = table.clamped();
    for (Eigen::Index w = 0; w < v.rows(); ++w) {
        json row = json::array();
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            row.push_back(v(w, c));
        }
        values.push_back(std::move(row));
    }
    return {{"parent_indices", std::move(parents)}, {"splits", table.splits()}, {"values", std::move(values)}};
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

inline std::string trajectory_csv(const OnticTrajectory& traj, const BlochHelix* helix = nullptr)
{
    if (helix != nullptr && helix->times.size() != traj.times.size()) {
        throw Error(ErrorCode::GridMismatch, "helix and trajectory have different time grids");
    }
    std::ostringstream os;
    os << (helix != nullptr ? "t,index,theta1,phi1,theta2,phi2\n" : "t,index\n");
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << format_double(traj.times[k]) << ',' << (traj.indices[k] + 1);
        if (helix != nullptr) {
            os << ',' << format_double(helix->strand1[k].theta) << ',' << format_double(helix->strand1[k].phi) << ','
               << format_double(helix->strand2[k].theta) << ',' << format_double(helix->strand2[k].phi);
        }
        os << '\n';
    }
    return os.str();
}

inline json measure_to_json(const std::vector<double>& times,
                            const std::map<std::vector<std::size_t>, double>& measure)
{
    json trajectories = json::array();
    for (const auto& [indices, p] : measure) {
        json idx = json::array();
        for (std::size_t i : indices) {
            idx.push_back(i + 1);
        }
        trajectories.push_back({{"indices", std::move(idx)}, {"p", p}});
    }
    return {{"times", times}, {"trajectories", std::move(trajectories)}};
}

// ---------------------------------------------------------------------------
// Measurement and witnesses
// ---------------------------------------------------------------------------

inline constexpr const char* sweep_header = "N,overlap_A,overlap_E,max_offdiag,max_born_deviation,S_max,bound";

inline std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    os << sweep_header << '\n';
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.overlap_apparatus) << ',' << format_double(r.overlap_environment) << ','
           << format_double(r.max_offdiag) << ',' << format_double(r.max_born_deviation) << ','
           << format_double(r.s_max) << ',' << format_double(r.bound) << '\n';
    }
    return os.str();
}

inline json to_json(const SweepRow& r)
{
    return {{"N", r.n},
            {"overlap_A", r.overlap_apparatus},
            {"overlap_E", r.overlap_environment},
            {"max_offdiag", r.max_offdiag},
            {"max_born_deviation", r.max_born_deviation},
            {"S_max", r.s_max},
            {"bound", r.bound}};
}

inline json to_json(const MeasurementOutcomeReport& r)
{
    json ontic = json::array();
    for (std::size_t s = 0; s < r.ontic.size(); ++s) {
        ontic.push_back({{"p", r.ontic[s].probability},
                         {"outcome", r.outcome_of[s] + 1},
                         {"state", matrix_parts_to_json(r.ontic[s].state.amplitudes())}});
    }
    return {{"rho_s", to_json(r.rho_s)},
            {"ontic", std::move(ontic)},
            {"born_targets", r.born_targets},
            {"max_born_deviation", r.max_born_deviation},
            {"max_offdiag", r.max_offdiag},
            {"overlap_A", r.overlap_apparatus},
            {"overlap_E", r.overlap_environment}};
}

inline json witness_to_json(const NonlinearityWitnessReport& r, const QuantumChannel& channel,
                            const std::string& pair_id)
{
    return {{"distance_before", r.distance_before},
            {"distance_after", r.distance_after},
            {"channel", to_json(channel)},
            {"pair_id", pair_id}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

// Writes to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace ontic::io
