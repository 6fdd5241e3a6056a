// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

// Small lattice models and random states shared by the balance and solver tests.

#ifndef PERIPORE_TESTS_FIXTURES_HPP
#define PERIPORE_TESTS_FIXTURES_HPP

#include "peripore/checks.hpp"

namespace fixtures {

using namespace peripore;
using namespace peripore::checks;

}  // namespace fixtures

#endif  // PERIPORE_TESTS_FIXTURES_HPP
