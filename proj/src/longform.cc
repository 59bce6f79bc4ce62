#include "segfst/longform.h"

#include "segfst/error.h"

namespace segfst {

void WindowSpec::Validate() const {
  if (!(right_context <= context && context < window)) {
    throw Error(ErrorCode::kInvalidSpec,
                "window spec needs r <= b < w, got (w, b, r) = (" +
                    std::to_string(window) + ", " + std::to_string(context) +
                    ", " + std::to_string(right_context) + ")");
  }
}

WindowPlan MakeWindows(size_t n, const WindowSpec& spec) {
  spec.Validate();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "passage has no tokens");
  }
  WindowPlan plan;
  if (n <= spec.window) {
    plan.push_back({0, n, 0, n});
    return plan;
  }
  const size_t stride = spec.window - spec.context;
  const size_t lead = spec.context - spec.right_context;
  for (size_t k = 0;; ++k) {
    WindowSlot slot;
    slot.span_begin = k * stride;
    slot.span_end = std::min(slot.span_begin + spec.window, n);
    slot.adopt_begin = k == 0 ? 0 : slot.span_begin + lead;
    slot.adopt_end = slot.span_begin + stride + lead;
    if (slot.span_end == n) {
      slot.adopt_end = n;
      plan.push_back(slot);
      break;
    }
    plan.push_back(slot);
  }
  return plan;
}

Segmentation StitchWindows(
    size_t n, const WindowPlan& plan,
    std::span<const std::pair<size_t, Segmentation>> local) {
  std::vector<size_t> global;
  for (const auto& [index, seg] : local) {
    if (index >= plan.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "window index " + std::to_string(index) + " not in plan");
    }
    const WindowSlot& slot = plan[index];
    if (seg.length() != slot.span_size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "window " + std::to_string(index) + " segmentation covers " +
                      std::to_string(seg.length()) + " tokens, span has " +
                      std::to_string(slot.span_size()));
    }
    for (size_t p : seg.boundaries()) {
      size_t g = slot.span_begin + p;
      if (g >= slot.adopt_begin && g < slot.adopt_end) global.push_back(g);
    }
  }
  return Segmentation(n, std::move(global));
}

PassageResult SegmentPassage(std::span<const std::string> tokens,
                             const WindowSpec& spec, Scorer& scorer,
                             const DecodeConfig& cfg) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "passage has no tokens");
  }
  PassageResult result;
  result.plan = MakeWindows(tokens.size(), spec);
  std::vector<std::pair<size_t, Segmentation>> local;
  for (size_t k = 0; k < result.plan.size(); ++k) {
    const WindowSlot& slot = result.plan[k];
    try {
      result.windows.push_back(DecodeWindow(
          scorer, tokens.subspan(slot.span_begin, slot.span_size()), cfg));
    } catch (const Error& e) {
      throw Error(e.code(), "window " + std::to_string(k) + " [" +
                                std::to_string(slot.span_begin) + ", " +
                                std::to_string(slot.span_end) +
                                "): " + e.what());
    }
    const auto& decoded = result.windows.back();
    // Unrepaired free generation can leave a window without segmentation;
    // it then contributes no boundaries.
    local.emplace_back(k, decoded.segmentation.value_or(
                              Segmentation(slot.span_size(), {})));
  }
  result.segmentation = StitchWindows(tokens.size(), result.plan, local);
  return result;
}

}  // namespace segfst
