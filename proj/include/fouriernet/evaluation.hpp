#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fouriernet/mask.hpp"
#include "fouriernet/posterior.hpp"

namespace fouriernet {

// Foreground iff the class posterior is strictly greater than `threshold`.
BinaryMask threshold_posteriors(const PosteriorMap& posteriors, double threshold = 0.5,
                                int cls = kForegroundClass);
BinaryMask threshold_probabilities(int height, int width, std::span<const float> probabilities,
                                   double threshold = 0.5);

// One sweep: label 8-connected components once; in every column touched by
// two or more components keep only the component with the largest global
// size (ties: smaller label). Not idempotent on its own, because removing
// column pieces can split a component.
BinaryMask postprocess_columns_once(const BinaryMask& mask);

// Repeats postprocess_columns_once until the mask stops changing, which makes
// the result idempotent.
BinaryMask postprocess_columns(const BinaryMask& mask);

struct PixelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  PixelCounts& operator+=(const PixelCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct PixelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

PixelCounts count_pixels(const BinaryMask& predicted, const BinaryMask& reference);

// Empty denominators give 0.
PixelMetrics metrics_from_counts(const PixelCounts& counts);

PixelMetrics pixel_metrics(const BinaryMask& predicted, const BinaryMask& reference);

// Unweighted mean over images; all zeros for an empty list.
PixelMetrics mean_metrics(std::span<const PixelMetrics> per_image);

}  // namespace fouriernet
