#pragma once

#include "expreg/grid.hpp"

#include <array>
#include <vector>

namespace expreg {

/// Removes every discrete Fourier mode with |omega| <= omega0, where the grid
/// box is treated as periodic with period R = (n-1) h (the last node on each
/// axis is identified with the first) and omega = 2 pi k / R.
/// Throws CutoffAboveNyquist when omega0 >= pi / h.
GridFunction band_filter(const GridFunction& g, double omega0);

/// Euclidean norm of the normalized DFT coefficients of g with |omega| <= omega0.
double band_energy(const GridFunction& g, double omega0);

struct Moment {
    std::array<int, 3> gamma{0, 0, 0}; // exponents per axis; unused axes are 0
    double value = 0.0;
};

/// Multi-indices with |gamma| <= k in graded lexicographic order.
std::vector<std::array<int, 3>> multi_indices(int dim, int k);

/// Lumped-quadrature moments h^d sum_j g_j x_j^gamma for |gamma| <= k (k <= 4).
std::vector<Moment> moments(const GridFunction& g, int k);

/// Default template width: the RMS radius of |g| about the origin per axis,
/// clamped to [2h, R/10].
double moment_template_width(const GridFunction& g);

/// g minus a combination of derivative-of-Gaussian templates centred at the
/// origin (width 0 selects moment_template_width) chosen so that every
/// discrete moment of order <= k vanishes.
/// Throws IllConditionedMoments when the template system's condition exceeds 1e8.
GridFunction remove_moments(const GridFunction& g, int k, double width = 0.0);

} // namespace expreg
