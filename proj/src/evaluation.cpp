#include "fouriernet/evaluation.hpp"

#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet {

BinaryMask threshold_probabilities(int height, int width, std::span<const float> probabilities, double threshold) {
  if (height < 0 || width < 0 || probabilities.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeMismatch("probability buffer does not match " + std::to_string(height) + "x" + std::to_string(width));
  }
  std::vector<std::uint8_t> data(probabilities.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = probabilities[i] > threshold;
  return BinaryMask(height, width, std::move(data));
}

BinaryMask threshold_posteriors(const PosteriorMap& posteriors, double threshold, int cls) {
  if (cls < 0 || cls >= posteriors.classes) throw ShapeMismatch("class index outside posterior map");
  const std::size_t plane = static_cast<std::size_t>(posteriors.height) * posteriors.width;
  if (posteriors.data.size() != plane * posteriors.classes) throw ShapeMismatch("posterior map has wrong size");
  return threshold_probabilities(posteriors.height, posteriors.width,
                                 std::span<const float>(posteriors.data).subspan(cls * plane, plane), threshold);
}

BinaryMask postprocess_columns_once(const BinaryMask& mask) {
  const Labeling lab = connected_components(mask, Connectivity::Eight);
  if (lab.component_count() < 2) return mask;
  std::vector<std::uint8_t> data(mask.data().begin(), mask.data().end());
  const int h = mask.height(), w = mask.width();
  for (int c = 0; c < w; ++c) {
    // Labels are size ranks, so the smallest label present is the largest
    // global component (ties already ordered by discovery).
    int keep = Labeling::kBackground;
    bool mixed = false;
    for (int r = 0; r < h; ++r) {
      const int l = lab.at(r, c);
      if (l == Labeling::kBackground) continue;
      if (keep == Labeling::kBackground) {
        keep = l;
      } else if (l != keep) {
        mixed = true;
        if (l < keep) keep = l;
      }
    }
    if (!mixed) continue;
    for (int r = 0; r < h; ++r) {
      const int l = lab.at(r, c);
      if (l != Labeling::kBackground && l != keep) data[static_cast<std::size_t>(r) * w + c] = 0;
    }
  }
  return BinaryMask(h, w, std::move(data));
}

BinaryMask postprocess_columns(const BinaryMask& mask) {
  BinaryMask current = mask;
  for (;;) {
    BinaryMask next = postprocess_columns_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

PixelCounts count_pixels(const BinaryMask& predicted, const BinaryMask& reference) {
  if (predicted.height() != reference.height() || predicted.width() != reference.width()) {
    throw ShapeMismatch("predicted and reference masks differ in size");
  }
  PixelCounts counts;
  const auto p = predicted.data();
  const auto r = reference.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && r[i]) {
      ++counts.tp;
    } else if (p[i]) {
      ++counts.fp;
    } else if (r[i]) {
      ++counts.fn;
    }
  }
  return counts;
}

PixelMetrics metrics_from_counts(const PixelCounts& c) {
  PixelMetrics m;
  const auto tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall > 0) m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

PixelMetrics pixel_metrics(const BinaryMask& predicted, const BinaryMask& reference) {
  return metrics_from_counts(count_pixels(predicted, reference));
}

PixelMetrics mean_metrics(std::span<const PixelMetrics> per_image) {
  PixelMetrics mean;
  if (per_image.empty()) return mean;
  for (const auto& m : per_image) {
    mean.precision += m.precision;
    mean.recall += m.recall;
    mean.f_score += m.f_score;
  }
  const auto n = static_cast<double>(per_image.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f_score /= n;
  return mean;
}

}  // namespace fouriernet
