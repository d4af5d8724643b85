#pragma once

#include "expreg/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

namespace expreg {

using PointFn = std::function<double(std::span<const double>)>;

namespace coeff {
struct Constant {
    double value = 1.0;
};
/// exp(1 / (|x|^2 + 1)); bounds (1, e).
struct RadialBump {};
/// 0.25 * prod_i exp(sin(2 sqrt(2) pi x_i) + sin(2 pi x_i)); bounds 0.25 e^{-2d}, 0.25 e^{2d}.
struct QuasiPeriodic {};
/// 2 + prod_i cos(2 pi x_i / epsilon); bounds (1, 3).
struct Periodic {
    double epsilon = 0.1;
};
/// Arbitrary field with caller-declared ellipticity bounds.
struct Custom {
    PointFn fn;
    double alpha = 1.0;
    double beta = 1.0;
    std::string name = "custom";
};
} // namespace coeff

/// Scalar (isotropic) coefficient a(x) I_d with ellipticity bounds 0 < alpha <= beta.
class CoefficientSpec {
public:
    using Variant = std::variant<coeff::Constant, coeff::RadialBump, coeff::QuasiPeriodic, coeff::Periodic,
                                 coeff::Custom>;

    CoefficientSpec() : v_(coeff::Constant{1.0}) {}
    CoefficientSpec(Variant v);
    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, CoefficientSpec> && std::is_constructible_v<Variant, T>)
    CoefficientSpec(T&& alt) : CoefficientSpec(Variant(std::forward<T>(alt)))
    {
    }

    double operator()(std::span<const double> x) const;
    /// Closed-form lower ellipticity bound over R^dim.
    double alpha(int dim) const;
    /// Closed-form upper ellipticity bound over R^dim.
    double beta(int dim) const;
    std::string name() const;
    const Variant& variant() const noexcept { return v_; }

private:
    Variant v_;
};

namespace solution {
struct Zero {};
/// (sin 2pi x1 + sin 2pi x2 + sin 2pi x3)(exp(1/(|x|^2+1)) - 1), d = 3.
struct Sine3DBump {};
/// sin(2pi x1)(exp(1/(|x|^2+1)) - 1), d = 2.
struct Sine2DBump {};
/// sin(10pi x1) sin(10pi x2)(exp(1/(|x|^2+1)) - 1), d = 2. Vanishes on dK_R for R = 0.2n.
struct HighFreq2DBump {};
/// exp(1/(|x|^2+1)) - 1, any d. Decays like |x|^{-2} without oscillation.
struct Bump {};
/// 1 / sqrt(|x|^2 + s^2). Its source has nonzero mass and decays like |x|^{-5}.
struct Plummer {
    double scale = 0.5;
};
/// prod_i cos(freq * x_i).
struct Cosine {
    double freq = 3.14159265358979323846;
};
struct Custom {
    PointFn fn;
    std::string name = "custom";
};
} // namespace solution

/// Closed-form exact solution, evaluable everywhere on R^d.
class SolutionSpec {
public:
    using Variant = std::variant<solution::Zero, solution::Sine3DBump, solution::Sine2DBump,
                                 solution::HighFreq2DBump, solution::Bump, solution::Plummer, solution::Cosine, solution::Custom>;

    SolutionSpec() : v_(solution::Zero{}) {}
    SolutionSpec(Variant v) : v_(std::move(v)) {}
    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, SolutionSpec> && std::is_constructible_v<Variant, T>)
    SolutionSpec(T&& alt) : SolutionSpec(Variant(std::forward<T>(alt)))
    {
    }

    double operator()(std::span<const double> x) const;
    std::string name() const;
    const Variant& variant() const noexcept { return v_; }

private:
    Variant v_;
};

namespace source {
/// g := discrete -div(a grad u) of the exact solution (see stencil_source).
struct FromSolution {
    SolutionSpec solution;
};
/// (sin 10pi x1 + sin 10pi x2)(exp(1/(|x|^2+1)) - 1), d = 2.
struct QuasiSource {};
/// amplitude * exp(-|x|^2 / (2 sigma^2)).
struct Gaussian {
    double sigma = 0.25;
    double amplitude = 1.0;
};
struct ClosedForm {
    PointFn fn;
    std::string name = "closed_form";
};
/// Values bound to a lattice, e.g. the output of band_filter or remove_moments.
struct GridValues {
    GridFunction values;
};
} // namespace source

class SourceSpec {
public:
    using Variant = std::variant<source::FromSolution, source::QuasiSource, source::Gaussian, source::ClosedForm,
                                 source::GridValues>;

    SourceSpec() : v_(source::FromSolution{}) {}
    SourceSpec(Variant v) : v_(std::move(v)) {}
    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, SourceSpec> && std::is_constructible_v<Variant, T>)
    SourceSpec(T&& alt) : SourceSpec(Variant(std::forward<T>(alt)))
    {
    }

    std::string name() const;
    const Variant& variant() const noexcept { return v_; }
    /// Exact solution behind a FromSolution source.
    std::optional<SolutionSpec> solution() const;

private:
    Variant v_;
};

GridFunction sample(const CoefficientSpec& a, const Grid& grid);
GridFunction sample(const SolutionSpec& u, const Grid& grid);
GridFunction sample(const PointFn& f, const Grid& grid);

struct CoefficientBounds {
    double alpha;
    double beta;
};

/// Sampled min / max of a on the probe grid.
CoefficientBounds coefficient_bounds(const CoefficientSpec& a, const Grid& probe);

/// Manufactured source: the flux stencil of the operator applied to exact
/// samples at every node (ghost neighbours evaluated from the closed form).
GridFunction stencil_source(const SolutionSpec& u_exact, const CoefficientSpec& a, const Grid& grid);

/// Source values on `grid`. GridValues sources must nest (or coincide) with it.
GridFunction source_values(const SourceSpec& g, const CoefficientSpec& a, const Grid& grid);

} // namespace expreg
