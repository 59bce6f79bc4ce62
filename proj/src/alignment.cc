#include "segfst/alignment.h"

#include <algorithm>

#include "segfst/error.h"

namespace segfst {

namespace {

template <typename T>
AlignmentPath Align(std::span<const T> src, std::span<const T> tgt) {
  const size_t m = src.size();
  const size_t k = tgt.size();
  std::vector<size_t> dp((m + 1) * (k + 1));
  auto at = [&](size_t i, size_t j) -> size_t& { return dp[i * (k + 1) + j]; };
  for (size_t i = 0; i <= m; ++i) at(i, 0) = i;
  for (size_t j = 0; j <= k; ++j) at(0, j) = j;
  for (size_t i = 1; i <= m; ++i) {
    for (size_t j = 1; j <= k; ++j) {
      size_t diag = at(i - 1, j - 1) + (src[i - 1] == tgt[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentPath path;
  path.cost = at(m, k);
  path.src_length = m;
  path.tgt_length = k;
  size_t i = m;
  size_t j = k;
  while (i > 0 || j > 0) {
    const size_t here = at(i, j);
    if (i > 0 && j > 0 && src[i - 1] == tgt[j - 1] && at(i - 1, j - 1) == here) {
      path.ops.push_back({EditKind::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && src[i - 1] != tgt[j - 1] &&
               at(i - 1, j - 1) + 1 == here) {
      path.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      path.ops.push_back({EditKind::kDelete, i - 1, EditOp::kNone});
      --i;
    } else {
      path.ops.push_back({EditKind::kInsert, EditOp::kNone, j - 1});
      --j;
    }
  }
  std::reverse(path.ops.begin(), path.ops.end());
  return path;
}

template <typename T>
Segmentation Repair(std::span<const T> generated, std::span<const T> input,
                    auto is_delimiter) {
  std::vector<T> stripped;
  std::vector<size_t> positions;
  for (const T& item : generated) {
    if (is_delimiter(item)) {
      if (!stripped.empty()) positions.push_back(stripped.size());
    } else {
      stripped.push_back(item);
    }
  }
  std::vector<size_t> internal;
  for (size_t p : positions) {
    if (p > 0 && p < stripped.size()) internal.push_back(p);
  }
  Segmentation src(stripped.size(), std::move(internal));
  AlignmentPath path =
      Align(std::span<const T>(stripped), std::span<const T>(input));
  return ProjectBoundaries(src, path, input.size());
}

}  // namespace

AlignmentPath LevenshteinAlign(std::span<const std::string> src,
                               std::span<const std::string> tgt) {
  return Align(src, tgt);
}

AlignmentPath LevenshteinAlign(std::span<const Label> src,
                               std::span<const Label> tgt) {
  return Align(src, tgt);
}

Segmentation ProjectBoundaries(const Segmentation& src_boundaries,
                               const AlignmentPath& path, size_t tgt_length) {
  if (src_boundaries.length() != path.src_length) {
    throw Error(ErrorCode::kLengthMismatch,
                "segmentation covers " +
                    std::to_string(src_boundaries.length()) +
                    " tokens, alignment source has " +
                    std::to_string(path.src_length));
  }
  if (tgt_length != path.tgt_length) {
    throw Error(ErrorCode::kLengthMismatch,
                "target length " + std::to_string(tgt_length) +
                    " differs from alignment target " +
                    std::to_string(path.tgt_length));
  }
  // image[i]: target index aligned to source token i, or kNone if deleted.
  std::vector<size_t> image(path.src_length, EditOp::kNone);
  for (const EditOp& op : path.ops) {
    if (op.kind == EditKind::kMatch || op.kind == EditKind::kSubstitute) {
      image[op.src] = op.tgt;
    }
  }
  std::vector<size_t> projected;
  for (size_t b : src_boundaries.boundaries()) {
    size_t i = b;
    while (i < image.size() && image[i] == EditOp::kNone) ++i;
    if (i == image.size()) continue;
    size_t j = image[i];
    if (j == 0 || j >= tgt_length) continue;
    projected.push_back(j);
  }
  return Segmentation(tgt_length, std::move(projected));
}

Segmentation RepairOutput(std::span<const std::string> generated,
                          std::span<const std::string> input) {
  return Repair(generated, input,
                [](const std::string& s) { return s == kDelimiterSymbol; });
}

Segmentation RepairOutput(std::span<const Label> generated,
                          std::span<const Label> input) {
  return Repair(generated, input, [](Label l) { return l.IsDelimiter(); });
}

}  // namespace segfst
