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

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ontic {

enum class ErrorCode {
    LabelClash,
    UnknownSubsystem,
    NothingToTrace,
    BadPartition,
    SpaceMismatch,
    InvalidState,
    NotUnitary,
    NotCPTP,
    BadInterval,
    NotPSD,
    NotADistribution,
    GridMismatch,
    TooManyTrajectories,
    NotAProjector,
    NotAWitnessPair,
    ToleranceBreach,
    InvalidArgument,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::LabelClash: return "LabelClash";
    case ErrorCode::UnknownSubsystem: return "UnknownSubsystem";
    case ErrorCode::NothingToTrace: return "NothingToTrace";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotCPTP: return "NotCPTP";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TooManyTrajectories: return "TooManyTrajectories";
    case ErrorCode::NotAProjector: return "NotAProjector";
    case ErrorCode::NotAWitnessPair: return "NotAWitnessPair";
    case ErrorCode::ToleranceBreach: return "ToleranceBreach";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// Every failure in the library surfaces as an Error carrying a code, so
// callers (the CLI in particular) can map kinds onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Numerical thresholds shared by every module.  The defaults can be
// scaled for debugging through ONTIC_SIM_TOLERANCE_SCALE; the scale is
// read once and never changes afterwards.
struct Tolerances {
    double construction = 1e-12;   // invariants checked when a value is built
    double derived = 1e-10;        // invariants of computed results
    double psd_floor = 1e-10;      // smallest admissible eigenvalue magnitude below zero
    double phase = 1e-10;          // amplitude magnitude that fixes the global phase
    double kraus_prune = 1e-12;    // Frobenius norm below which a Kraus operator is dropped
    double null_probability = 1e-12;
    double row_sum = 1e-9;
    double degeneracy_gap = 1e-8;  // default gap below which eigenvalues are grouped

    Tolerances scaled(double factor) const
    {
        Tolerances t = *this;
        t.construction *= factor;
        t.derived *= factor;
        t.psd_floor *= factor;
        t.phase *= factor;
        t.kraus_prune *= factor;
        t.null_probability *= factor;
        t.row_sum *= factor;
        t.degeneracy_gap *= factor;
        return t;
    }
};

inline double tolerance_scale_from_env()
{
    const char* raw = std::getenv("ONTIC_SIM_TOLERANCE_SCALE");
    if (raw == nullptr || *raw == '\0') {
        return 1.0;
    }
    char* end = nullptr;
    const double value = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(value > 0.0)) {
        return 1.0;
    }
    return value;
}

inline const Tolerances& tolerances()
{
    static const Tolerances instance = Tolerances{}.scaled(tolerance_scale_from_env());
    return instance;
}

} // namespace ontic
