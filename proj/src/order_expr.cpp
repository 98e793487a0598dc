#include "cryptoseq/order_expr.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <queue>

namespace cryptoseq {

OrderExpr OrderExpr::sym(std::string name) {
  OrderExpr e;
  e.kind = Kind::Symbol;
  e.symbol = std::move(name);
  return e;
}

OrderExpr OrderExpr::seq(std::vector<OrderExpr> parts) {
  if (parts.size() == 1) return parts.front();
  OrderExpr e;
  e.kind = Kind::Seq;
  e.children = std::move(parts);
  return e;
}

OrderExpr OrderExpr::alt(std::vector<OrderExpr> parts) {
  if (parts.size() == 1) return parts.front();
  OrderExpr e;
  e.kind = Kind::Alt;
  e.children = std::move(parts);
  return e;
}

OrderExpr OrderExpr::star(OrderExpr inner) {
  OrderExpr e;
  e.kind = Kind::Star;
  e.children.push_back(std::move(inner));
  return e;
}

OrderExpr OrderExpr::plus(OrderExpr inner) {
  OrderExpr e;
  e.kind = Kind::Plus;
  e.children.push_back(std::move(inner));
  return e;
}

OrderExpr OrderExpr::opt(OrderExpr inner) {
  OrderExpr e;
  e.kind = Kind::Opt;
  e.children.push_back(std::move(inner));
  return e;
}

std::set<std::string> OrderExpr::symbols() const {
  std::set<std::string> out;
  if (kind == Kind::Symbol) {
    out.insert(symbol);
  } else {
    for (const auto& c : children) {
      auto sub = c.symbols();
      out.insert(sub.begin(), sub.end());
    }
  }
  return out;
}

namespace {

// Recursive-descent parser: alt := seq ('|' seq)*, seq := post (',' post)*,
// post := atom ('*'|'+'|'?')*, atom := symbol | '(' alt ')'.
class OrderParser {
 public:
  explicit OrderParser(const std::string& text) : text_(text) {}

  OrderExpr parse() {
    OrderExpr e = parse_alt();
    skip_ws();
    if (pos_ != text_.size()) {
      throw OrderError("unexpected character '" + std::string(1, text_[pos_]) +
                       "' in ORDER expression");
    }
    return e;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  OrderExpr parse_alt() {
    std::vector<OrderExpr> parts{parse_seq()};
    while (eat('|')) parts.push_back(parse_seq());
    return OrderExpr::alt(std::move(parts));
  }

  OrderExpr parse_seq() {
    std::vector<OrderExpr> parts{parse_post()};
    while (eat(',')) parts.push_back(parse_post());
    return OrderExpr::seq(std::move(parts));
  }

  OrderExpr parse_post() {
    OrderExpr e = parse_atom();
    for (;;) {
      if (eat('*')) {
        e = OrderExpr::star(std::move(e));
      } else if (eat('+')) {
        e = OrderExpr::plus(std::move(e));
      } else if (eat('?')) {
        e = OrderExpr::opt(std::move(e));
      } else {
        break;
      }
    }
    return e;
  }

  OrderExpr parse_atom() {
    skip_ws();
    if (eat('(')) {
      OrderExpr e = parse_alt();
      if (!eat(')')) throw OrderError("missing ')' in ORDER expression");
      return e;
    }
    std::size_t begin = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == begin) throw OrderError("expected event symbol in ORDER expression");
    return OrderExpr::sym(text_.substr(begin, pos_ - begin));
  }
};

struct Nfa {
  // state -> list of (symbol index, target); -1 = epsilon.
  std::vector<std::vector<std::pair<int, int>>> edges;
  int start = 0;
  int accept = 0;

  int add_state() {
    edges.emplace_back();
    return static_cast<int>(edges.size()) - 1;
  }
  void link(int from, int sym, int to) { edges[static_cast<std::size_t>(from)].push_back({sym, to}); }
};

struct Fragment {
  int start;
  int accept;
};

Fragment build_nfa(Nfa& nfa, const OrderExpr& e, const std::map<std::string, int>& sym_index) {
  switch (e.kind) {
    case OrderExpr::Kind::Symbol: {
      auto it = sym_index.find(e.symbol);
      if (it == sym_index.end()) throw OrderError("symbol '" + e.symbol + "' not in alphabet");
      int s = nfa.add_state();
      int t = nfa.add_state();
      nfa.link(s, it->second, t);
      return {s, t};
    }
    case OrderExpr::Kind::Seq: {
      Fragment frag = build_nfa(nfa, e.children.front(), sym_index);
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        Fragment next = build_nfa(nfa, e.children[i], sym_index);
        nfa.link(frag.accept, -1, next.start);
        frag.accept = next.accept;
      }
      return frag;
    }
    case OrderExpr::Kind::Alt: {
      int s = nfa.add_state();
      int t = nfa.add_state();
      for (const auto& c : e.children) {
        Fragment frag = build_nfa(nfa, c, sym_index);
        nfa.link(s, -1, frag.start);
        nfa.link(frag.accept, -1, t);
      }
      return {s, t};
    }
    case OrderExpr::Kind::Star: {
      Fragment inner = build_nfa(nfa, e.children.front(), sym_index);
      int s = nfa.add_state();
      int t = nfa.add_state();
      nfa.link(s, -1, inner.start);
      nfa.link(s, -1, t);
      nfa.link(inner.accept, -1, inner.start);
      nfa.link(inner.accept, -1, t);
      return {s, t};
    }
    case OrderExpr::Kind::Plus: {
      Fragment inner = build_nfa(nfa, e.children.front(), sym_index);
      nfa.link(inner.accept, -1, inner.start);
      return inner;
    }
    case OrderExpr::Kind::Opt: {
      Fragment inner = build_nfa(nfa, e.children.front(), sym_index);
      nfa.link(inner.start, -1, inner.accept);
      return inner;
    }
  }
  throw OrderError("unreachable ORDER expression kind");
}

std::set<int> epsilon_closure(const Nfa& nfa, const std::set<int>& states) {
  std::set<int> closure = states;
  std::deque<int> work(states.begin(), states.end());
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (const auto& [sym, to] : nfa.edges[static_cast<std::size_t>(s)]) {
      if (sym == -1 && closure.insert(to).second) work.push_back(to);
    }
  }
  return closure;
}

}  // namespace

OrderExpr parse_order_expr(const std::string& text) { return OrderParser(text).parse(); }

OrderAutomaton OrderAutomaton::compile(const OrderExpr& expr,
                                       const std::vector<std::string>& alphabet) {
  OrderAutomaton dfa;
  dfa.alphabet_ = alphabet;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    dfa.symbol_index_[alphabet[i]] = static_cast<int>(i);
  }

  Nfa nfa;
  Fragment frag = build_nfa(nfa, expr, dfa.symbol_index_);
  nfa.start = frag.start;
  nfa.accept = frag.accept;

  std::map<std::set<int>, int> subset_id;
  std::deque<std::set<int>> work;
  std::set<int> start_set = epsilon_closure(nfa, {nfa.start});
  subset_id[start_set] = 0;
  dfa.transitions_.emplace_back();
  dfa.accepting_.push_back(start_set.count(nfa.accept) > 0);
  work.push_back(start_set);
  dfa.start_ = 0;

  while (!work.empty()) {
    std::set<int> current = work.front();
    work.pop_front();
    int from = subset_id[current];
    for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
      std::set<int> moved;
      for (int s : current) {
        for (const auto& [label, to] : nfa.edges[static_cast<std::size_t>(s)]) {
          if (label == static_cast<int>(sym)) moved.insert(to);
        }
      }
      if (moved.empty()) continue;
      std::set<int> closure = epsilon_closure(nfa, moved);
      auto [it, inserted] = subset_id.emplace(closure, static_cast<int>(subset_id.size()));
      if (inserted) {
        dfa.transitions_.emplace_back();
        dfa.accepting_.push_back(closure.count(nfa.accept) > 0);
        work.push_back(closure);
      }
      dfa.transitions_[static_cast<std::size_t>(from)][static_cast<int>(sym)] = it->second;
    }
  }
  return dfa;
}

std::optional<int> OrderAutomaton::step(int state, const std::string& symbol) const {
  auto sym_it = symbol_index_.find(symbol);
  if (sym_it == symbol_index_.end()) return std::nullopt;
  const auto& row = transitions_[static_cast<std::size_t>(state)];
  auto it = row.find(sym_it->second);
  if (it == row.end()) return std::nullopt;
  return it->second;
}

bool OrderAutomaton::accepts(std::span<const std::string> word) const {
  int state = start_;
  for (const auto& sym : word) {
    auto next = step(state, sym);
    if (!next) return false;
    state = *next;
  }
  return accepting(state);
}

std::vector<std::string> OrderAutomaton::shortest_completion(int state) const {
  if (accepting(state)) return {};
  std::vector<int> parent_state(transitions_.size(), -1);
  std::vector<int> parent_symbol(transitions_.size(), -1);
  std::vector<bool> visited(transitions_.size(), false);
  std::queue<int> work;
  visited[static_cast<std::size_t>(state)] = true;
  work.push(state);
  int goal = -1;
  while (!work.empty() && goal < 0) {
    int s = work.front();
    work.pop();
    // Iterating symbols in declaration order makes the BFS tie-break stable.
    for (std::size_t sym = 0; sym < alphabet_.size(); ++sym) {
      auto it = transitions_[static_cast<std::size_t>(s)].find(static_cast<int>(sym));
      if (it == transitions_[static_cast<std::size_t>(s)].end()) continue;
      int to = it->second;
      if (visited[static_cast<std::size_t>(to)]) continue;
      visited[static_cast<std::size_t>(to)] = true;
      parent_state[static_cast<std::size_t>(to)] = s;
      parent_symbol[static_cast<std::size_t>(to)] = static_cast<int>(sym);
      if (accepting(to)) {
        goal = to;
        break;
      }
      work.push(to);
    }
  }
  std::vector<std::string> completion;
  for (int s = goal; s != state && s >= 0; s = parent_state[static_cast<std::size_t>(s)]) {
    completion.push_back(alphabet_[static_cast<std::size_t>(parent_symbol[static_cast<std::size_t>(s)])]);
  }
  std::reverse(completion.begin(), completion.end());
  return completion;
}

bool OrderAutomaton::accept_reachable_without(std::optional<int> banned_symbol) const {
  std::vector<bool> visited(transitions_.size(), false);
  std::queue<int> work;
  visited[static_cast<std::size_t>(start_)] = true;
  work.push(start_);
  while (!work.empty()) {
    int s = work.front();
    work.pop();
    if (accepting(s)) return true;
    for (const auto& [sym, to] : transitions_[static_cast<std::size_t>(s)]) {
      if (banned_symbol && sym == *banned_symbol) continue;
      if (!visited[static_cast<std::size_t>(to)]) {
        visited[static_cast<std::size_t>(to)] = true;
        work.push(to);
      }
    }
  }
  return false;
}

std::set<std::string> OrderAutomaton::mandatory_symbols() const {
  std::set<std::string> out;
  if (!accept_reachable_without(std::nullopt)) return out;  // empty language
  for (std::size_t sym = 0; sym < alphabet_.size(); ++sym) {
    if (!accept_reachable_without(static_cast<int>(sym))) out.insert(alphabet_[sym]);
  }
  return out;
}

}  // namespace cryptoseq
