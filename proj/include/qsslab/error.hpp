// Copyright 2026 The qsslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QSSLAB_ERROR_HPP
#define QSSLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsslab {

enum class errc {
    dimension_mismatch,
    not_hermitian,
    not_symmetric,
    bad_parameter_count,
    bad_weights,
    not_isometry,
    non_unitary,
    zero_probability,
    bad_parameters,
    parse_error,
    invalid_state,
    io_error,
};

inline std::string_view to_string(errc code) {
    switch (code) {
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::not_hermitian: return "NotHermitian";
        case errc::not_symmetric: return "NotSymmetric";
        case errc::bad_parameter_count: return "BadParameterCount";
        case errc::bad_weights: return "BadWeights";
        case errc::not_isometry: return "NotIsometry";
        case errc::non_unitary: return "NonUnitary";
        case errc::zero_probability: return "ZeroProbability";
        case errc::bad_parameters: return "BadParameters";
        case errc::parse_error: return "ParseError";
        case errc::invalid_state: return "InvalidState";
        case errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the contract that was violated.
class error : public std::runtime_error {
   public:
    error(errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

   private:
    errc code_;
};

}  // namespace qsslab

#endif  // QSSLAB_ERROR_HPP
