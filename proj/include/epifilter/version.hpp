//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_VERSION_HPP
#define EPIFILTER_VERSION_HPP

namespace epi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace epi

#endif  // EPIFILTER_VERSION_HPP
