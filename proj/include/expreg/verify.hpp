#pragma once

#include <string>
#include <vector>

namespace expreg {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;     // measured quantity
    double tolerance = 0.0; // pass threshold
    std::string detail;
};

struct VerifyOptions {
    /// Flip the sign of every off-diagonal stencil entry before checking.
    bool flip_offdiagonal = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    double seconds = 0.0;
    bool all_pass() const;
};

/// Invariant suite on small built-in instances: operator symmetry, M-matrix
/// sign pattern, Green positivity, expm vs dense, elliptic vs parabolic
/// identity, energy monotonicity, dissipation bound, Green ordering.
VerifyReport run_verify(const VerifyOptions& opts = {});

} // namespace expreg
