#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "linkc/geometry.hpp"
#include "linkc/linkage.hpp"

namespace linkc {

enum class NodeKind { kInput, kConst, kAdd, kMul, kConj };

const char* to_string(NodeKind kind);

struct PolyNode {
  NodeKind kind = NodeKind::kConst;
  int index = 0;        // input index (kInput)
  PlanePoint value{};   // constant (kConst)
  int lhs = -1;
  int rhs = -1;
};

/// Syntax error in an expression, with the 0-based character offset.
class PolyParseError : public LinkageError {
 public:
  PolyParseError(const std::string& what, std::size_t position)
      : LinkageError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Hash-consed DAG over z_1..z_n. Nodes are appended in creation order, so
/// every operand index is smaller than its user's index; constant-only
/// subtrees are folded on construction.
class PolyExpr {
 public:
  explicit PolyExpr(int arity = 0);

  int arity() const { return arity_; }
  const std::vector<PolyNode>& nodes() const { return nodes_; }
  const PolyNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  int input(int i);
  int constant(PlanePoint z);
  int add(int a, int b);
  int mul(int a, int b);
  int conj(int a);
  int neg(int a);
  int sub(int a, int b);

  std::vector<int> outputs;

  /// Values of every node at the given inputs.
  std::vector<PlanePoint> eval_nodes(std::span<const PlanePoint> z) const;
  /// Values of the outputs.
  std::vector<PlanePoint> eval(std::span<const PlanePoint> z) const;

  /// Infix rendering of a node in the parser's grammar.
  std::string to_string(int id) const;
  /// Outputs joined by ", ".
  std::string to_string() const;

 private:
  int intern(const PolyNode& n);

  int arity_;
  std::vector<PolyNode> nodes_;
  std::map<std::tuple<int, int, double, double, int, int>, int> index_;
};

/// Parses comma-separated expressions over z1..z<arity>. Grammar: complex
/// literals (2, 1.5i, i), variables, + - *, unary minus, conj(...), parentheses.
PolyExpr parse_poly(const std::string& text, int arity);

/// Highest variable index used in text (0 if none); scans without parsing.
int infer_arity(const std::string& text);

/// Node list as JSON: {"arity", "nodes": [[kind, index|[re,im]|lhs, rhs]...], "outputs"}.
/// Replaying it with poly_from_json reproduces the node numbering exactly.
nlohmann::json poly_to_json(const PolyExpr& expr);
PolyExpr poly_from_json(const nlohmann::json& j);

/// outer(inner(z)): inner's outputs replace outer's inputs.
PolyExpr substitute(const PolyExpr& outer, const PolyExpr& inner);

}  // namespace linkc
