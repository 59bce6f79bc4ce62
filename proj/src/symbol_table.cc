#include "segfst/symbol_table.h"

#include <istream>
#include <ostream>
#include <sstream>

#include "segfst/error.h"

namespace segfst {

SymbolTable::SymbolTable() {
  for (std::string_view s :
       {kEpsilonSymbol, kDelimiterSymbol, kUnknownSymbol, kEndSymbol}) {
    ids_.emplace(std::string(s), static_cast<int32_t>(symbols_.size()));
    symbols_.emplace_back(s);
  }
}

SymbolTable SymbolTable::FromTokens(std::span<const std::string> tokens) {
  SymbolTable table;
  for (const auto& t : tokens) table.Add(t);
  return table;
}

Label SymbolTable::Add(std::string_view token) {
  if (token.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty token");
  }
  if (token == kEpsilonSymbol) {
    throw Error(ErrorCode::kInvalidArgument,
                "epsilon cannot be used as a token");
  }
  auto it = ids_.find(std::string(token));
  if (it != ids_.end()) return Label{it->second};
  auto id = static_cast<int32_t>(symbols_.size());
  symbols_.emplace_back(token);
  ids_.emplace(symbols_.back(), id);
  return Label{id};
}

std::optional<Label> SymbolTable::Find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return Label{it->second};
}

Label SymbolTable::LookupOrUnknown(std::string_view token) const {
  return Find(token).value_or(kUnknown);
}

const std::string& SymbolTable::Symbol(Label label) const {
  if (!Contains(label)) {
    throw Error(ErrorCode::kInvalidArgument,
                "label id " + std::to_string(label.id) + " not in table");
  }
  return symbols_[label.id];
}

std::vector<Label> SymbolTable::TokenLabels() const {
  std::vector<Label> out;
  for (int32_t id = 0; id < static_cast<int32_t>(symbols_.size()); ++id) {
    if (Label{id}.IsToken()) out.push_back(Label{id});
  }
  return out;
}

std::vector<Label> SymbolTable::Encode(std::span<const std::string> tokens) {
  std::vector<Label> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(Add(t));
  return out;
}

std::vector<std::string> SymbolTable::Decode(
    std::span<const Label> labels) const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(Symbol(l));
  return out;
}

void SymbolTable::Write(std::ostream& os) const {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    os << symbols_[i] << '\t' << i << '\n';
  }
}

SymbolTable SymbolTable::Read(std::istream& is) {
  SymbolTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string symbol;
    int64_t id = -1;
    if (!(fields >> symbol >> id)) {
      throw Error(ErrorCode::kParse,
                  "symbol table line " + std::to_string(lineno));
    }
    if (id < kFirstTokenId) {
      if (id < 0 || table.symbols_[id] != symbol) {
        throw Error(ErrorCode::kParse, "reserved id " + std::to_string(id) +
                                           " does not match '" + symbol + "'");
      }
      continue;
    }
    if (static_cast<size_t>(id) != table.symbols_.size()) {
      throw Error(ErrorCode::kParse, "symbol ids must be dense, got " +
                                         std::to_string(id));
    }
    if (table.Find(symbol)) {
      throw Error(ErrorCode::kParse, "duplicate symbol '" + symbol + "'");
    }
    table.Add(symbol);
  }
  return table;
}

}  // namespace segfst
