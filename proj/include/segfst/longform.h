// Sliding-window inference over long passages.
//
// Windows of w tokens start every w - b tokens. Each window decodes its
// whole span, but only boundaries inside its adopt range become global
// decisions: the first window adopts [0, w - r), window k >= 1 adopts
// [k(w - b) + b - r, (k + 1)(w - b) + b - r), and the last window's adopt
// range runs to the end of the passage.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segfst/decoding.h"
#include "segfst/scoring.h"
#include "segfst/segmentation.h"

namespace segfst {

struct WindowSpec {
  size_t window = 40;        // w
  size_t context = 10;       // b, total overlap between neighbours
  size_t right_context = 5;  // r

  /// Throws kInvalidSpec unless r <= b < w.
  void Validate() const;
};

struct WindowSlot {
  size_t span_begin = 0;
  size_t span_end = 0;
  size_t adopt_begin = 0;
  size_t adopt_end = 0;

  size_t span_size() const { return span_end - span_begin; }
  friend bool operator==(const WindowSlot&, const WindowSlot&) = default;
};

using WindowPlan = std::vector<WindowSlot>;

/// Throws kInvalidArgument for n == 0 and kInvalidSpec for a bad spec.
WindowPlan MakeWindows(size_t n, const WindowSpec& spec);

/// Global boundaries from per-window local segmentations: a local boundary
/// at p in window k becomes span_begin + p if that lies in k's adopt range.
/// `local[k]` pairs a window index with its segmentation; order is
/// irrelevant.
Segmentation StitchWindows(
    size_t n, const WindowPlan& plan,
    std::span<const std::pair<size_t, Segmentation>> local);

struct PassageResult {
  Segmentation segmentation;
  WindowPlan plan;
  std::vector<DecodeResult> windows;  // in plan order
};

/// Decodes every window of `tokens` and stitches the result. Errors are
/// rethrown with the failing window's index.
PassageResult SegmentPassage(std::span<const std::string> tokens,
                             const WindowSpec& spec, Scorer& scorer,
                             const DecodeConfig& cfg);

}  // namespace segfst
