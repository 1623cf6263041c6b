#include "linkc/poly.hpp"

#include <cctype>
#include <charconv>

namespace linkc {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInput:
      return "input";
    case NodeKind::kConst:
      return "const";
    case NodeKind::kAdd:
      return "add";
    case NodeKind::kMul:
      return "mul";
    case NodeKind::kConj:
      return "conj";
  }
  return "?";
}

PolyExpr::PolyExpr(int arity) : arity_(arity) {
  if (arity < 0) throw LinkageError("arity must be non-negative");
}

int PolyExpr::intern(const PolyNode& n) {
  // -0.0 and 0.0 must hash-cons together.
  const double re = n.value.real() == 0.0 ? 0.0 : n.value.real();
  const double im = n.value.imag() == 0.0 ? 0.0 : n.value.imag();
  auto key = std::make_tuple(static_cast<int>(n.kind), n.index, re, im, n.lhs, n.rhs);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(nodes_.size());
  PolyNode stored = n;
  stored.value = {re, im};
  nodes_.push_back(stored);
  index_.emplace(key, id);
  return id;
}

int PolyExpr::input(int i) {
  if (i < 0 || i >= arity_) throw LinkageError("input index " + std::to_string(i + 1) + " exceeds arity");
  PolyNode n;
  n.kind = NodeKind::kInput;
  n.index = i;
  return intern(n);
}

int PolyExpr::constant(PlanePoint z) {
  if (!is_finite(z)) throw LinkageError("constant must be finite");
  PolyNode n;
  n.kind = NodeKind::kConst;
  n.value = z;
  return intern(n);
}

int PolyExpr::add(int a, int b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  if (na.kind == NodeKind::kConst && nb.kind == NodeKind::kConst) return constant(na.value + nb.value);
  if (na.kind == NodeKind::kConst && na.value == PlanePoint{}) return b;
  if (nb.kind == NodeKind::kConst && nb.value == PlanePoint{}) return a;
  PolyNode n;
  n.kind = NodeKind::kAdd;
  n.lhs = std::min(a, b);
  n.rhs = std::max(a, b);
  return intern(n);
}

int PolyExpr::mul(int a, int b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  if (na.kind == NodeKind::kConst && nb.kind == NodeKind::kConst) return constant(na.value * nb.value);
  if (na.kind == NodeKind::kConst && na.value == PlanePoint{1.0, 0.0}) return b;
  if (nb.kind == NodeKind::kConst && nb.value == PlanePoint{1.0, 0.0}) return a;
  PolyNode n;
  n.kind = NodeKind::kMul;
  n.lhs = std::min(a, b);
  n.rhs = std::max(a, b);
  return intern(n);
}

int PolyExpr::conj(int a) {
  const auto& na = node(a);
  if (na.kind == NodeKind::kConst) return constant(std::conj(na.value));
  PolyNode n;
  n.kind = NodeKind::kConj;
  n.lhs = a;
  return intern(n);
}

int PolyExpr::neg(int a) { return mul(constant({-1.0, 0.0}), a); }

int PolyExpr::sub(int a, int b) { return add(a, neg(b)); }

std::vector<PlanePoint> PolyExpr::eval_nodes(std::span<const PlanePoint> z) const {
  if (static_cast<int>(z.size()) != arity_) throw LinkageError("wrong number of inputs for expression");
  std::vector<PlanePoint> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::kInput:
        v[i] = z[static_cast<std::size_t>(n.index)];
        break;
      case NodeKind::kConst:
        v[i] = n.value;
        break;
      case NodeKind::kAdd:
        v[i] = v[static_cast<std::size_t>(n.lhs)] + v[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::kMul:
        v[i] = v[static_cast<std::size_t>(n.lhs)] * v[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::kConj:
        v[i] = std::conj(v[static_cast<std::size_t>(n.lhs)]);
        break;
    }
  }
  return v;
}

std::vector<PlanePoint> PolyExpr::eval(std::span<const PlanePoint> z) const {
  const auto v = eval_nodes(z);
  std::vector<PlanePoint> out;
  for (int o : outputs) out.push_back(v[static_cast<std::size_t>(o)]);
  return out;
}

std::string PolyExpr::to_string(int id) const {
  const auto& n = node(id);
  switch (n.kind) {
    case NodeKind::kInput:
      return "z" + std::to_string(n.index + 1);
    case NodeKind::kConst:
      return "(" + format_complex(n.value) + ")";
    case NodeKind::kAdd:
      return "(" + to_string(n.lhs) + " + " + to_string(n.rhs) + ")";
    case NodeKind::kMul:
      return to_string(n.lhs) + "*" + to_string(n.rhs);
    case NodeKind::kConj:
      return "conj(" + to_string(n.lhs) + ")";
  }
  return "";
}

std::string PolyExpr::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (i) s += ", ";
    s += to_string(outputs[i]);
  }
  return s;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, PolyExpr& expr) : text_(text), expr_(expr) {}

  void parse_all() {
    expr_.outputs.push_back(parse_sum());
    skip_space();
    while (peek() == ',') {
      ++pos_;
      expr_.outputs.push_back(parse_sum());
      skip_space();
    }
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw PolyParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int parse_sum() {
    int acc = parse_product();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        acc = expr_.add(acc, parse_product());
      } else if (c == '-') {
        ++pos_;
        acc = expr_.sub(acc, parse_product());
      } else {
        return acc;
      }
    }
  }

  int parse_product() {
    int acc = parse_unary();
    while (peek() == '*') {
      ++pos_;
      acc = expr_.mul(acc, parse_unary());
    }
    return acc;
  }

  int parse_unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return expr_.neg(parse_unary());
    }
    if (c == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_primary();
  }

  int parse_primary() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of expression");
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double x = 0.0;
      auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), x);
      if (res.ec != std::errc{}) fail("malformed number");
      pos_ = static_cast<std::size_t>(res.ptr - text_.data());
      if (pos_ < text_.size() && text_[pos_] == 'i' && !ident_continues(pos_ + 1)) {
        ++pos_;
        return expr_.constant({0.0, x});
      }
      return expr_.constant({x, 0.0});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string word = text_.substr(start, pos_ - start);
      if (word == "i") return expr_.constant({0.0, 1.0});
      if (word == "conj") {
        if (peek() != '(') fail("expected '(' after conj");
        ++pos_;
        const int inner = parse_sum();
        if (peek() != ')') fail("expected ')'");
        ++pos_;
        return expr_.conj(inner);
      }
      if (word.size() > 1 && word[0] == 'z' &&
          word.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int k = std::stoi(word.substr(1));
        if (k < 1 || k > expr_.arity()) {
          pos_ = start;
          fail("unknown variable " + word + " (arity " + std::to_string(expr_.arity()) + ")");
        }
        return expr_.input(k - 1);
      }
      pos_ = start;
      fail("unknown identifier " + word);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  bool ident_continues(std::size_t p) const {
    return p < text_.size() && std::isalnum(static_cast<unsigned char>(text_[p]));
  }

  const std::string& text_;
  PolyExpr& expr_;
  std::size_t pos_ = 0;
};

}  // namespace

PolyExpr parse_poly(const std::string& text, int arity) {
  PolyExpr expr(arity);
  Parser(text, expr).parse_all();
  return expr;
}

int infer_arity(const std::string& text) {
  int best = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'z' || (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1])))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i + 1) best = std::max(best, std::stoi(text.substr(i + 1, j - i - 1)));
  }
  return best;
}

nlohmann::json poly_to_json(const PolyExpr& expr) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : expr.nodes()) {
    switch (n.kind) {
      case NodeKind::kInput:
        nodes.push_back({"input", n.index});
        break;
      case NodeKind::kConst:
        nodes.push_back({"const", {n.value.real(), n.value.imag()}});
        break;
      case NodeKind::kAdd:
      case NodeKind::kMul:
        nodes.push_back({to_string(n.kind), n.lhs, n.rhs});
        break;
      case NodeKind::kConj:
        nodes.push_back({"conj", n.lhs});
        break;
    }
  }
  return {{"arity", expr.arity()}, {"nodes", nodes}, {"outputs", expr.outputs}};
}

PolyExpr poly_from_json(const nlohmann::json& j) {
  PolyExpr expr(j.at("arity").get<int>());
  int expected = 0;
  for (const auto& n : j.at("nodes")) {
    const auto kind = n.at(0).get<std::string>();
    int id = -1;
    if (kind == "input") {
      id = expr.input(n.at(1).get<int>());
    } else if (kind == "const") {
      id = expr.constant({n.at(1).at(0).get<double>(), n.at(1).at(1).get<double>()});
    } else if (kind == "add" || kind == "mul") {
      const int a = n.at(1).get<int>(), b = n.at(2).get<int>();
      if (a < 0 || b < 0 || a >= expected || b >= expected) throw LinkageError("expression node refers forward");
      id = kind == "add" ? expr.add(a, b) : expr.mul(a, b);
    } else if (kind == "conj") {
      const int a = n.at(1).get<int>();
      if (a < 0 || a >= expected) throw LinkageError("expression node refers forward");
      id = expr.conj(a);
    } else {
      throw LinkageError("unknown expression node kind " + kind);
    }
    if (id != expected) throw LinkageError("expression nodes are not in canonical form");
    ++expected;
  }
  for (const auto& o : j.at("outputs")) {
    const int id = o.get<int>();
    if (id < 0 || id >= expected) throw LinkageError("expression output out of range");
    expr.outputs.push_back(id);
  }
  return expr;
}

PolyExpr substitute(const PolyExpr& outer, const PolyExpr& inner) {
  if (static_cast<int>(inner.outputs.size()) != outer.arity()) {
    throw LinkageError("substitution arity mismatch");
  }
  PolyExpr out = inner;
  out.outputs.clear();
  std::vector<int> map(outer.nodes().size());
  for (std::size_t i = 0; i < outer.nodes().size(); ++i) {
    const auto& n = outer.nodes()[i];
    switch (n.kind) {
      case NodeKind::kInput:
        map[i] = inner.outputs[static_cast<std::size_t>(n.index)];
        break;
      case NodeKind::kConst:
        map[i] = out.constant(n.value);
        break;
      case NodeKind::kAdd:
        map[i] = out.add(map[static_cast<std::size_t>(n.lhs)], map[static_cast<std::size_t>(n.rhs)]);
        break;
      case NodeKind::kMul:
        map[i] = out.mul(map[static_cast<std::size_t>(n.lhs)], map[static_cast<std::size_t>(n.rhs)]);
        break;
      case NodeKind::kConj:
        map[i] = out.conj(map[static_cast<std::size_t>(n.lhs)]);
        break;
    }
  }
  for (int o : outer.outputs) out.outputs.push_back(map[static_cast<std::size_t>(o)]);
  return out;
}

}  // namespace linkc
