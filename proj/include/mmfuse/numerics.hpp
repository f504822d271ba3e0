#pragma once

#include <cstddef>

#include "mmfuse/embeddings.hpp"

namespace mmfuse {

enum class Modality { textual, visual };

inline constexpr double kDefaultRidge = 1e-3;

/// Principal directions of column-centered data.
///
/// `components` is dim_in x k with orthonormal columns ordered by
/// non-increasing `explained_variance` (sample variance, n - 1 denominator).
/// Each component is signed so that its largest-magnitude entry is positive
/// (first such entry on exact ties).
struct PcaModel {
    Vector mean;
    Matrix components;
    Vector explained_variance;

    std::size_t k() const noexcept { return static_cast<std::size_t>(components.cols()); }
    std::size_t dim_in() const noexcept { return static_cast<std::size_t>(components.rows()); }
};

/// Requires 1 <= k <= min(n - 1, d). Rank-deficient data is accepted; the
/// trailing components then span the null space with zero variance.
PcaModel pca_fit(const Matrix& x, std::size_t k);

/// (x - mean) * components.
Matrix pca_transform(const PcaModel& model, const Matrix& x);

/// Ridge-regularized canonical correlation analysis.
///
/// Projections satisfy proj_x' (Cxx + ridge I) proj_x = I (likewise for y),
/// so with ridge = 0 the projected training data has unit sample variance per
/// component. Components are ordered by non-increasing correlation; each
/// column pair is signed jointly so that the largest-magnitude entry across
/// proj_x and proj_y is positive.
struct CcaModel {
    Vector mean_x;
    Vector mean_y;
    Matrix proj_x;
    Matrix proj_y;
    Vector correlations;
    double ridge = kDefaultRidge;

    std::size_t k() const noexcept { return static_cast<std::size_t>(proj_x.cols()); }
    std::size_t dim_x() const noexcept { return static_cast<std::size_t>(proj_x.rows()); }
    std::size_t dim_y() const noexcept { return static_cast<std::size_t>(proj_y.rows()); }
};

/// Requires equal row counts n >= 3 and 1 <= k <= min(d1, d2, n - 1).
/// Throws NumericalError when a regularized covariance is singular.
CcaModel cca_fit(const Matrix& x, const Matrix& y, std::size_t k, double ridge = kDefaultRidge);

/// (x - mean_side) * proj_side; textual is the x side of the fit.
Matrix cca_transform(const CcaModel& model, const Matrix& x, Modality side);

/// R-CCA residual: original - projected when the widths agree, otherwise
/// pca_transform(reduction, original) - projected. `reduction` must map the
/// original width onto the projected width.
Matrix rcca_residual(const Matrix& original, const Matrix& projected,
                     const PcaModel* reduction = nullptr);

}  // namespace mmfuse
