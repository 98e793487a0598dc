#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cryptoseq {

class OrderError : public std::runtime_error {
 public:
  explicit OrderError(const std::string& what) : std::runtime_error(what) {}
};

/// Regular expression over event symbols. Combinators: sequence (","),
/// alternation ("|"), optional ("?"), zero-or-more ("*"), one-or-more ("+"),
/// parenthesized grouping.
struct OrderExpr {
  enum class Kind { Symbol, Seq, Alt, Star, Plus, Opt };
  Kind kind = Kind::Symbol;
  std::string symbol;               // Kind::Symbol only
  std::vector<OrderExpr> children;  // combinators

  static OrderExpr sym(std::string name);
  static OrderExpr seq(std::vector<OrderExpr> parts);
  static OrderExpr alt(std::vector<OrderExpr> parts);
  static OrderExpr star(OrderExpr inner);
  static OrderExpr plus(OrderExpr inner);
  static OrderExpr opt(OrderExpr inner);

  std::set<std::string> symbols() const;
};

/// Parses an ORDER expression. Symbols are identifiers ([A-Za-z_][A-Za-z0-9_]*).
OrderExpr parse_order_expr(const std::string& text);

/// Deterministic automaton over event symbols. Every reachable state is live
/// (an accepting state stays reachable), so a missing transition means the
/// word has diverged from the language.
class OrderAutomaton {
 public:
  OrderAutomaton() = default;

  int start() const { return start_; }
  bool accepting(int state) const { return accepting_[static_cast<std::size_t>(state)]; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  /// Next state, or nullopt when no transition exists (divergence).
  std::optional<int> step(int state, const std::string& symbol) const;

  bool accepts(std::span<const std::string> word) const;

  /// Shortest symbol suffix leading from `state` to an accepting state; ties
  /// broken by alphabet (declaration) order. Empty when already accepting.
  std::vector<std::string> shortest_completion(int state) const;

  /// Symbols that occur in every accepted word: removing all transitions on
  /// the symbol makes accepting states unreachable from start.
  std::set<std::string> mandatory_symbols() const;

  /// Builds the DFA for `expr` via Thompson NFA + subset construction. The
  /// alphabet keeps the given declaration order for deterministic tie-breaks.
  static OrderAutomaton compile(const OrderExpr& expr, const std::vector<std::string>& alphabet);

 private:
  std::vector<std::string> alphabet_;
  std::map<std::string, int> symbol_index_;
  // state -> symbol index -> state; missing entry = no transition.
  std::vector<std::map<int, int>> transitions_;
  std::vector<bool> accepting_;
  int start_ = 0;

  bool accept_reachable_without(std::optional<int> banned_symbol) const;
};

}  // namespace cryptoseq
