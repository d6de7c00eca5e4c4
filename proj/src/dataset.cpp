#include "dicm/dataset.hpp"

#include <cmath>

namespace dicm {

namespace {

void validate_pair(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows()) {
    throw DataError("input and output row counts differ (" +
                    std::to_string(x.rows()) + " vs " +
                    std::to_string(y.rows()) + ")");
  }
  if (x.rows() == 0) throw DataError("dataset is empty");
  if (x.cols() == 0 || y.cols() == 0) throw DataError("dataset has no columns");
  require_finite(x, "inputs");
  require_finite(y, "outputs");
}

Vec column_means(const Mat& m) {
  return m.colwise().mean().transpose();
}

Vec column_stds(const Mat& m, const Vec& center) {
  Vec out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    out(j) = std::sqrt((m.col(j).array() - center(j)).square().mean());
  }
  return out;
}

}  // namespace

Dataset Dataset::from_data(Mat x, Mat y) {
  validate_pair(x, y);
  Vec lower = x.colwise().minCoeff().transpose();
  Vec upper = x.colwise().maxCoeff().transpose();
  for (Index j = 0; j < lower.size(); ++j) {
    if (!(lower(j) < upper(j))) {
      throw DataError("input column " + std::to_string(j) +
                      " is constant; supply explicit bounds");
    }
  }
  Vec center = column_means(y);
  Vec scale = column_stds(y, center);
  for (Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 0.0)) {
      throw DataError("output column " + std::to_string(j) + " is constant");
    }
  }
  return with_scaling(std::move(x), std::move(y), std::move(lower),
                      std::move(upper), std::move(center), std::move(scale));
}

Dataset Dataset::from_data_with_bounds(Mat x, Mat y, Vec lower, Vec upper) {
  validate_pair(x, y);
  Vec center = column_means(y);
  Vec scale = column_stds(y, center);
  for (Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 0.0)) {
      throw DataError("output column " + std::to_string(j) + " is constant");
    }
  }
  return with_scaling(std::move(x), std::move(y), std::move(lower),
                      std::move(upper), std::move(center), std::move(scale));
}

Dataset Dataset::with_scaling(Mat x, Mat y, Vec lower, Vec upper, Vec center,
                              Vec scale) {
  validate_pair(x, y);
  if (lower.size() != x.cols() || upper.size() != x.cols()) {
    throw ShapeError("bounds dimension does not match inputs");
  }
  if (center.size() != y.cols() || scale.size() != y.cols()) {
    throw ShapeError("y scaling dimension does not match outputs");
  }
  for (Index j = 0; j < lower.size(); ++j) {
    if (!(lower(j) < upper(j))) {
      throw DomainError("need lower < upper componentwise");
    }
  }
  for (Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 0.0)) throw DomainError("y_scale must be positive");
  }
  const double tol = 1e-9;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      const double span = upper(j) - lower(j);
      if (x(i, j) < lower(j) - tol * span || x(i, j) > upper(j) + tol * span) {
        throw DomainError("input row " + std::to_string(i) +
                          " lies outside the declared bounds");
      }
    }
  }

  Dataset ds;
  ds.x = std::move(x);
  ds.y = std::move(y);
  ds.x_lower = std::move(lower);
  ds.x_upper = std::move(upper);
  ds.y_center = std::move(center);
  ds.y_scale = std::move(scale);
  ds.x_unit = ds.scale_x(ds.x);
  ds.y_std = ds.standardize_y(ds.y);
  return ds;
}

Mat Dataset::scale_x(const Mat& natural) const {
  if (natural.cols() != x.cols()) {
    throw ShapeError("scale_x: dimension mismatch");
  }
  Mat out(natural.rows(), natural.cols());
  for (Index i = 0; i < natural.rows(); ++i) {
    for (Index j = 0; j < natural.cols(); ++j) {
      out(i, j) = (natural(i, j) - x_lower(j)) / (x_upper(j) - x_lower(j));
    }
  }
  return out;
}

Mat Dataset::unscale_x(const Mat& unit) const {
  if (unit.cols() != x.cols()) {
    throw ShapeError("unscale_x: dimension mismatch");
  }
  Mat out(unit.rows(), unit.cols());
  for (Index i = 0; i < unit.rows(); ++i) {
    for (Index j = 0; j < unit.cols(); ++j) {
      out(i, j) = x_lower(j) + unit(i, j) * (x_upper(j) - x_lower(j));
    }
  }
  return out;
}

Mat Dataset::standardize_y(const Mat& natural) const {
  if (natural.cols() != y.cols()) {
    throw ShapeError("standardize_y: dimension mismatch");
  }
  Mat out(natural.rows(), natural.cols());
  for (Index i = 0; i < natural.rows(); ++i) {
    for (Index j = 0; j < natural.cols(); ++j) {
      out(i, j) = (natural(i, j) - y_center(j)) / y_scale(j);
    }
  }
  return out;
}

Mat Dataset::destandardize_y(const Mat& standardized) const {
  if (standardized.cols() != y.cols()) {
    throw ShapeError("destandardize_y: dimension mismatch");
  }
  Mat out(standardized.rows(), standardized.cols());
  for (Index i = 0; i < standardized.rows(); ++i) {
    for (Index j = 0; j < standardized.cols(); ++j) {
      out(i, j) = y_center(j) + standardized(i, j) * y_scale(j);
    }
  }
  return out;
}

Dataset Dataset::appended(const Mat& x_new, const Mat& y_new) const {
  if (x_new.cols() != x.cols() || y_new.cols() != y.cols()) {
    throw ShapeError("appended: dimension mismatch");
  }
  if (x_new.rows() != y_new.rows()) {
    throw ShapeError("appended: new row counts differ");
  }
  Mat xa(x.rows() + x_new.rows(), x.cols());
  xa << x, x_new;
  Mat ya(y.rows() + y_new.rows(), y.cols());
  ya << y, y_new;
  return from_data_with_bounds(std::move(xa), std::move(ya), x_lower, x_upper);
}

}  // namespace dicm
