#include "mmfuse/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mmfuse/errors.hpp"

namespace mmfuse {
namespace {

using Index = Eigen::Index;

std::string dims(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

// Index of the largest |entry|, earliest on exact ties.
Index argmax_abs(const Eigen::Ref<const Vector>& v) {
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best))) best = i;
    }
    return best;
}

Matrix centered(const Matrix& x, const Vector& mean) { return x.rowwise() - mean.transpose(); }

// Symmetric inverse square root of a regularized covariance.
Matrix inverse_sqrt(const Matrix& cov, const char* which) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError(std::string("eigendecomposition of ") + which + " covariance failed");
    }
    const Vector& vals = eig.eigenvalues();
    const double scale = std::max(vals.maxCoeff(), std::numeric_limits<double>::min());
    const double tol = scale * static_cast<double>(cov.rows()) * std::numeric_limits<double>::epsilon();
    if (vals.minCoeff() <= tol) {
        throw NumericalError(std::string(which) +
                             " covariance is singular; CCA needs a positive ridge for this input");
    }
    return eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace

PcaModel pca_fit(const Matrix& x, std::size_t k) {
    const Index n = x.rows();
    const Index d = x.cols();
    if (k < 1 || static_cast<Index>(k) > std::min(n - 1, d)) {
        throw DimensionError("PCA target dimension " + std::to_string(k) + " outside [1, " +
                             std::to_string(std::max<Index>(0, std::min(n - 1, d))) + "] for " +
                             dims(n, d) + " input");
    }
    if (!x.allFinite()) throw NumericalError("PCA input contains NaN or Inf");

    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Matrix xc = centered(x, model.mean);

    Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinV);
    const auto kk = static_cast<Index>(k);
    model.components = svd.matrixV().leftCols(kk);
    model.explained_variance =
        svd.singularValues().head(kk).array().square() / static_cast<double>(n - 1);
    for (Index j = 0; j < kk; ++j) {
        auto col = model.components.col(j);
        if (col(argmax_abs(col)) < 0) col = -col;
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.dim_in()) {
        throw DimensionError("PCA model expects " + std::to_string(model.dim_in()) +
                             " columns, got " + std::to_string(x.cols()));
    }
    return centered(x, model.mean) * model.components;
}

CcaModel cca_fit(const Matrix& x, const Matrix& y, std::size_t k, double ridge) {
    const Index n = x.rows();
    if (y.rows() != n) {
        throw AlignmentError("CCA inputs have " + std::to_string(n) + " and " +
                             std::to_string(y.rows()) + " rows");
    }
    if (n < 3) throw DimensionError("CCA needs at least 3 rows, got " + std::to_string(n));
    const Index d1 = x.cols();
    const Index d2 = y.cols();
    const Index limit = std::min({d1, d2, n - 1});
    if (k < 1 || static_cast<Index>(k) > limit) {
        throw DimensionError("CCA target dimension " + std::to_string(k) + " outside [1, " +
                             std::to_string(limit) + "]");
    }
    if (!(ridge >= 0) || !std::isfinite(ridge)) {
        throw NumericalError("CCA ridge must be finite and non-negative");
    }
    if (!x.allFinite() || !y.allFinite()) throw NumericalError("CCA input contains NaN or Inf");

    CcaModel model;
    model.ridge = ridge;
    model.mean_x = x.colwise().mean().transpose();
    model.mean_y = y.colwise().mean().transpose();
    const Matrix xc = centered(x, model.mean_x);
    const Matrix yc = centered(y, model.mean_y);
    const double denom = static_cast<double>(n - 1);

    Matrix cxx = xc.transpose() * xc / denom;
    Matrix cyy = yc.transpose() * yc / denom;
    const Matrix cxy = xc.transpose() * yc / denom;
    cxx.diagonal().array() += ridge;
    cyy.diagonal().array() += ridge;

    const Matrix wx = inverse_sqrt(cxx, "textual-side");
    const Matrix wy = inverse_sqrt(cyy, "visual-side");
    const Matrix whitened = wx * cxy * wy;

    Eigen::BDCSVD<Matrix> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto kk = static_cast<Index>(k);
    model.proj_x = wx * svd.matrixU().leftCols(kk);
    model.proj_y = wy * svd.matrixV().leftCols(kk);
    model.correlations = svd.singularValues().head(kk).cwiseMax(0.0).cwiseMin(1.0);

    for (Index j = 0; j < kk; ++j) {
        const Index ix = argmax_abs(model.proj_x.col(j));
        const Index iy = argmax_abs(model.proj_y.col(j));
        const double px = model.proj_x(ix, j);
        const double py = model.proj_y(iy, j);
        const double lead = std::abs(py) > std::abs(px) ? py : px;
        if (lead < 0) {
            model.proj_x.col(j) *= -1.0;
            model.proj_y.col(j) *= -1.0;
        }
    }
    return model;
}

Matrix cca_transform(const CcaModel& model, const Matrix& x, Modality side) {
    const bool textual = side == Modality::textual;
    const Vector& mean = textual ? model.mean_x : model.mean_y;
    const Matrix& proj = textual ? model.proj_x : model.proj_y;
    if (x.cols() != proj.rows()) {
        throw DimensionError(std::string("CCA ") + (textual ? "textual" : "visual") +
                             " side expects " + std::to_string(proj.rows()) + " columns, got " +
                             std::to_string(x.cols()));
    }
    return centered(x, mean) * proj;
}

Matrix rcca_residual(const Matrix& original, const Matrix& projected, const PcaModel* reduction) {
    if (original.rows() != projected.rows()) {
        throw DimensionError("residual operands have " + std::to_string(original.rows()) + " and " +
                             std::to_string(projected.rows()) + " rows");
    }
    if (original.cols() == projected.cols()) return original - projected;
    if (reduction == nullptr) {
        throw MissingReductionError("original width " + std::to_string(original.cols()) +
                                    " differs from projected width " +
                                    std::to_string(projected.cols()) +
                                    "; a PCA reduction to the projected width is required");
    }
    if (reduction->dim_in() != static_cast<std::size_t>(original.cols()) ||
        reduction->k() != static_cast<std::size_t>(projected.cols())) {
        throw DimensionError("PCA reduction maps " + std::to_string(reduction->dim_in()) + " -> " +
                             std::to_string(reduction->k()) + ", residual needs " +
                             std::to_string(original.cols()) + " -> " +
                             std::to_string(projected.cols()));
    }
    return pca_transform(*reduction, original) - projected;
}

}  // namespace mmfuse
