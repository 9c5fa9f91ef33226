// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "drsim/arbiter.hpp"

namespace drsim {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2 };

/// Injection points for tests.
struct CliHooks {
    Combiner combiner = combine;
};

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliHooks& hooks = {});

}  // namespace drsim
