// Labels and the token <-> label bijection.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segfst {

/// A symbol on an automaton tape. Ids 0-3 are reserved; transcript tokens
/// start at kFirstTokenId.
struct Label {
  int32_t id = 0;

  constexpr bool IsEpsilon() const { return id == 0; }
  constexpr bool IsDelimiter() const { return id == 1; }
  constexpr bool IsUnknown() const { return id == 2; }
  constexpr bool IsEndOfSequence() const { return id == 3; }
  constexpr bool IsToken() const { return id >= 2 && id != 3; }

  friend constexpr auto operator<=>(Label, Label) = default;
};

inline constexpr Label kEpsilon{0};
inline constexpr Label kDelimiter{1};
inline constexpr Label kUnknown{2};
inline constexpr Label kEndOfSequence{3};
inline constexpr int32_t kFirstTokenId = 4;

inline constexpr std::string_view kEpsilonSymbol = "<eps>";
inline constexpr std::string_view kDelimiterSymbol = "<SENT>";
inline constexpr std::string_view kUnknownSymbol = "<unk>";
inline constexpr std::string_view kEndSymbol = "</s>";

class SymbolTable {
 public:
  SymbolTable();

  /// Table holding exactly the distinct tokens of `tokens`, numbered in
  /// order of first appearance.
  static SymbolTable FromTokens(std::span<const std::string> tokens);

  /// Returns the label for `token`, inserting it if new. Reserved symbols
  /// map to their reserved labels except "<eps>", which is rejected.
  Label Add(std::string_view token);

  std::optional<Label> Find(std::string_view token) const;
  /// Like Find but maps unseen tokens to kUnknown.
  Label LookupOrUnknown(std::string_view token) const;

  const std::string& Symbol(Label label) const;
  bool Contains(Label label) const {
    return label.id >= 0 && static_cast<size_t>(label.id) < symbols_.size();
  }
  size_t size() const { return symbols_.size(); }

  /// Every token label (unknown included, reserved markers excluded).
  std::vector<Label> TokenLabels() const;

  std::vector<Label> Encode(std::span<const std::string> tokens);
  std::vector<std::string> Decode(std::span<const Label> labels) const;

  /// OpenFst-style text: "symbol<TAB>id" per line.
  void Write(std::ostream& os) const;
  static SymbolTable Read(std::istream& is);

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int32_t> ids_;
};

}  // namespace segfst

template <>
struct std::hash<segfst::Label> {
  size_t operator()(segfst::Label l) const noexcept {
    return std::hash<int32_t>{}(l.id);
  }
};
