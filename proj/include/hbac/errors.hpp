// Copyright 2026 The hbac Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace hbac {

/// A requested computation exceeds a configured size cap (qubit count, pair grid, enumeration).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative cooling loop hit its iteration cap before converging.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (circuit files, bias lists).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hbac
