#pragma once

#include <cmath>
#include <stdexcept>

#include "ccx/envelope.hpp"
#include "ccx/grid.hpp"

namespace ccx {

enum class TransformKind { lower, upper, mixed_ul, mixed_lu };

/// Error budget for comparing discrete transform output against continuum
/// identities: c * (lambda * h^2 + L * h). Property tests pin c = 4.
inline double transform_tolerance(double lambda, double h, double lipschitz, double c = 4.0) {
    return c * (lambda * h * h + lipschitz * h);
}

namespace detail {

inline void require_lambda(double lambda, const char* who) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument(std::string(who) + ": lambda must be positive");
}

inline bool is_padded(const ScalarGrid& f) {
    for (std::size_t m : f.valid_margin)
        if (m > 0) return true;
    return false;
}

/// Lower transform on data that is already a trustworthy Lipschitz extension
/// near the boundary: erode then dilate with the quadratic kernel at the same
/// curvature. The composition never exceeds f and touches it wherever f + the
/// compensating parabola is locally convex.
inline ScalarGrid lower_core(const ScalarGrid& g, double lambda) {
    return moreau(moreau(g, MoreauKind::lower, lambda), MoreauKind::upper, lambda);
}

template <class Core>
ScalarGrid with_locality_pad(const ScalarGrid& f, double reach_lambda, Core&& core) {
    if (is_padded(f)) return core(f);
    const double L = estimate_lipschitz(f);
    const ScalarGrid p = pad_for_locality(f, L, reach_lambda);
    std::vector<std::size_t> width(f.dims.size());
    for (std::size_t a = 0; a < f.dims.size(); ++a) width[a] = (p.dims[a] - f.dims[a]) / 2;
    ScalarGrid out = crop(core(p), width);
    out.valid_margin = f.valid_margin;
    return out;
}

}  // namespace detail

/// C-lower transform of the sampled function. Unpadded input is extended
/// automatically by the locality radius and cropped back, so every returned
/// node is trustworthy; pre-padded input is transformed in place and keeps its
/// margin.
inline ScalarGrid lower_transform(const ScalarGrid& f, double lambda) {
    detail::require_lambda(lambda, "lower_transform");
    validate_grid(f);
    return detail::with_locality_pad(f, lambda, [&](const ScalarGrid& g) { return detail::lower_core(g, lambda); });
}

/// C-upper transform, defined as the negated lower transform of -f so the two
/// are bitwise duals.
inline ScalarGrid upper_transform(const ScalarGrid& f, double lambda) {
    detail::require_lambda(lambda, "upper_transform");
    validate_grid(f);
    ScalarGrid n = map_values(f, [](double v) { return -v; });
    ScalarGrid t = lower_transform(n, lambda);
    for (double& v : t.values) v = -v;
    return t;
}

/// Mixed transforms: upper-after-lower (mixed_ul) or lower-after-upper
/// (mixed_lu), with independent curvatures for the two stages. Unpadded input
/// is padded once with the combined reach of both stages.
inline ScalarGrid mixed_transform(const ScalarGrid& f, double lambda, double tau, TransformKind kind) {
    detail::require_lambda(lambda, "mixed_transform");
    detail::require_lambda(tau, "mixed_transform");
    if (kind != TransformKind::mixed_ul && kind != TransformKind::mixed_lu)
        throw std::invalid_argument("mixed_transform: kind must be mixed_ul or mixed_lu");
    validate_grid(f);

    auto run = [&](const ScalarGrid& g) {
        ScalarGrid stage = g;
        if (kind == TransformKind::mixed_ul) {
            stage = detail::lower_core(stage, lambda);
            for (double& v : stage.values) v = -v;
            stage = detail::lower_core(stage, tau);
            for (double& v : stage.values) v = -v;
        } else {
            for (double& v : stage.values) v = -v;
            stage = detail::lower_core(stage, lambda);
            for (double& v : stage.values) v = -v;
            stage = detail::lower_core(stage, tau);
        }
        return stage;
    };

    if (detail::is_padded(f)) return run(f);

    // Each stage pads and crops on its own: the lower stage wants the maximal
    // Lipschitz extension, the upper stage the minimal one, so a single shared
    // pad would contaminate whichever stage runs against its slope.
    if (kind == TransformKind::mixed_ul) return upper_transform(lower_transform(f, lambda), tau);
    return lower_transform(upper_transform(f, lambda), tau);
}

}  // namespace ccx
