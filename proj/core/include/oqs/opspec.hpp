#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oqs::opspec {

// Capacity of the exact tier: 4^6 = 4096 Fock states.
inline constexpr int kMaxSites = 6;

enum class Spin { up, dn };

struct OpAtom {
  enum class Kind { annihilate, create, number };
  Kind kind{};
  int site{};
  Spin spin{};
  bool operator==(const OpAtom&) const = default;
};

// Expression tree over second-quantized operators with complex scalar
// coefficients.  Sums and products are n-ary and flattened; scalar factors
// of a product are folded into a single leading scalar child, scalar terms
// of a sum into a single trailing one.  No operator algebra is performed.
class Expr {
 public:
  enum class Kind { scalar, atom, sum, product };

  static Expr scalar(std::complex<double> value);
  static Expr atom(OpAtom a);
  static Expr atom(OpAtom::Kind kind, int site, Spin spin);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);

  Kind kind() const { return kind_; }
  std::complex<double> scalar_value() const;
  const OpAtom& op_atom() const;
  const std::vector<Expr>& children() const;

  Expr negated() const;

  bool operator==(const Expr& other) const;

 private:
  Expr() = default;
  Kind kind_{Kind::scalar};
  std::complex<double> value_{};
  OpAtom atom_{};
  std::vector<Expr> children_;
};

std::string to_string(const Expr& e);

enum class Boundary { open, periodic };

struct Dissipator {
  std::string label;
  double rate{1.0};
  Expr op{Expr::scalar(0.0)};
};

struct ModelSpec {
  int num_sites{0};
  double hopping{0.0};            // J
  double interaction{0.0};        // U, > 0 attractive
  double chemical_potential{0.0}; // mu
  Boundary boundary{Boundary::open};
  std::vector<Dissipator> dissipators;
};

// Parse failure; what() is formatted "line:col: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& message);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Parses a sectioned model file ([lattice], [hamiltonian], [dissipators]).
// Site indices in operator expressions are checked against the declared
// lattice size.  Throws ParseError.
ModelSpec parse_model(std::string_view text);

// Parses a standalone operator expression.  num_sites <= 0 disables the
// site-range check.
Expr parse_expr(std::string_view text, int num_sites = 0);

// Invariant report; empty iff the spec is well-formed.
std::vector<std::string> validate(const ModelSpec& spec);

}  // namespace oqs::opspec
