#pragma once

#include "dicm/linalg.hpp"

namespace dicm {

/// Training data in natural units plus the scaling metadata used for
/// fitting. All model code operates on x mapped to [0,1]^d and y
/// standardized to zero mean / unit variance per output; predictions are
/// mapped back before they leave the library.
struct Dataset {
  Mat x;  // n x d, natural units
  Mat y;  // n x Q, natural units
  Vec x_lower, x_upper;
  Vec y_center, y_scale;  // y_scale > 0 componentwise
  Mat x_unit;             // scaled inputs
  Mat y_std;              // standardized outputs

  Index n() const { return x.rows(); }
  Index d() const { return x.cols(); }
  Index q() const { return y.cols(); }

  /// Bounds from the per-column data min/max; y scaling from the data.
  static Dataset from_data(Mat x, Mat y);

  /// Explicit natural-domain bounds; y scaling derived from the data.
  static Dataset from_data_with_bounds(Mat x, Mat y, Vec lower, Vec upper);

  /// Fully explicit scaling (used when reloading a persisted model, so the
  /// scaled representation is reproduced bit for bit).
  static Dataset with_scaling(Mat x, Mat y, Vec lower, Vec upper, Vec center,
                              Vec scale);

  Mat scale_x(const Mat& natural) const;
  Mat unscale_x(const Mat& unit) const;
  Mat standardize_y(const Mat& natural) const;
  Mat destandardize_y(const Mat& standardized) const;

  /// New dataset with extra rows appended; keeps the bounds, re-derives the
  /// y scaling from the combined data.
  Dataset appended(const Mat& x_new, const Mat& y_new) const;
};

}  // namespace dicm
