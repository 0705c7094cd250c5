#include "oqs/opspec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <tuple>

namespace oqs::opspec {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_scalar(std::complex<double> c) {
  const double re = c.real(), im = c.imag();
  if (im == 0.0) return format_double(re);
  std::string imag_part;
  if (im == 1.0)
    imag_part = "i";
  else if (im == -1.0)
    imag_part = "-i";
  else
    imag_part = format_double(im) + "*i";
  if (re == 0.0) return imag_part;
  std::string out = "(" + format_double(re);
  if (imag_part[0] != '-') out += "+";
  out += imag_part + ")";
  return out;
}

}  // namespace

Expr Expr::scalar(std::complex<double> value) {
  Expr e;
  e.kind_ = Kind::scalar;
  e.value_ = value;
  return e;
}

Expr Expr::atom(OpAtom a) {
  Expr e;
  e.kind_ = Kind::atom;
  e.atom_ = a;
  return e;
}

Expr Expr::atom(OpAtom::Kind kind, int site, Spin spin) {
  return atom(OpAtom{kind, site, spin});
}

Expr Expr::product(std::vector<Expr> factors) {
  std::complex<double> coeff{1.0, 0.0};
  std::vector<Expr> ops;
  for (auto& f : factors) {
    switch (f.kind_) {
      case Kind::scalar:
        coeff *= f.value_;
        break;
      case Kind::product:
        // nested product: leading scalar (if any) folds, operators append
        for (auto& g : f.children_) {
          if (g.kind_ == Kind::scalar)
            coeff *= g.value_;
          else
            ops.push_back(std::move(g));
        }
        break;
      default:
        ops.push_back(std::move(f));
    }
  }
  if (ops.empty()) return scalar(coeff);
  if (coeff == std::complex<double>(1.0, 0.0)) {
    if (ops.size() == 1) return std::move(ops.front());
    Expr e;
    e.kind_ = Kind::product;
    e.children_ = std::move(ops);
    return e;
  }
  Expr e;
  e.kind_ = Kind::product;
  e.children_.reserve(ops.size() + 1);
  e.children_.push_back(scalar(coeff));
  for (auto& o : ops) e.children_.push_back(std::move(o));
  return e;
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::complex<double> constant{0.0, 0.0};
  bool have_constant = false;
  std::vector<Expr> rest;
  for (auto& t : terms) {
    switch (t.kind_) {
      case Kind::scalar:
        constant += t.value_;
        have_constant = true;
        break;
      case Kind::sum:
        for (auto& g : t.children_) {
          if (g.kind_ == Kind::scalar) {
            constant += g.value_;
            have_constant = true;
          } else {
            rest.push_back(std::move(g));
          }
        }
        break;
      default:
        rest.push_back(std::move(t));
    }
  }
  if (rest.empty()) return scalar(constant);
  if (have_constant && constant != std::complex<double>(0.0, 0.0))
    rest.push_back(scalar(constant));
  if (rest.size() == 1) return std::move(rest.front());
  Expr e;
  e.kind_ = Kind::sum;
  e.children_ = std::move(rest);
  return e;
}

std::complex<double> Expr::scalar_value() const {
  if (kind_ != Kind::scalar) throw std::logic_error("Expr: not a scalar node");
  return value_;
}

const OpAtom& Expr::op_atom() const {
  if (kind_ != Kind::atom) throw std::logic_error("Expr: not an atom node");
  return atom_;
}

const std::vector<Expr>& Expr::children() const { return children_; }

Expr Expr::negated() const {
  switch (kind_) {
    case Kind::scalar:
      return scalar(-value_);
    case Kind::sum: {
      std::vector<Expr> terms;
      terms.reserve(children_.size());
      for (const auto& c : children_) terms.push_back(c.negated());
      return sum(std::move(terms));
    }
    default: {
      std::vector<Expr> factors;
      factors.push_back(scalar(-1.0));
      factors.push_back(*this);
      return product(std::move(factors));
    }
  }
}

bool Expr::operator==(const Expr& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::scalar:
      return value_ == other.value_;
    case Kind::atom:
      return atom_ == other.atom_;
    default:
      return children_ == other.children_;
  }
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::scalar:
      return format_scalar(e.scalar_value());
    case Expr::Kind::atom: {
      const auto& a = e.op_atom();
      const char* name = a.kind == OpAtom::Kind::annihilate ? "c"
                         : a.kind == OpAtom::Kind::create   ? "cdag"
                                                            : "n";
      return std::string(name) + "(" + std::to_string(a.site) + "," +
             (a.spin == Spin::up ? "up" : "dn") + ")";
    }
    case Expr::Kind::product: {
      std::string out;
      bool first = true;
      for (const auto& c : e.children()) {
        std::string part = to_string(c);
        if (c.kind() == Expr::Kind::sum) part = "(" + part + ")";
        if (!first) out += "*";
        out += part;
        first = false;
      }
      return out;
    }
    case Expr::Kind::sum: {
      std::string out;
      bool first = true;
      for (const auto& c : e.children()) {
        std::string part = to_string(c);
        if (!first) {
          if (!part.empty() && part[0] == '-') {
            out += "-";
            part = part.substr(1);
          } else {
            out += "+";
          }
        }
        out += part;
        first = false;
      }
      return out;
    }
  }
  return {};
}

ParseError::ParseError(int line, int col, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                         ": " + message),
      line_(line),
      col_(col) {}

namespace {

// Cursor over the input with line/column tracking.
class Cursor {
 public:
  Cursor(std::string_view text, int line0 = 1, int col0 = 1)
      : text_(text), line_(line0), col_(col0) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  char advance() {
    char ch = text_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }

  void skip_space_and_comments(bool cross_lines) {
    while (!eof()) {
      char ch = peek();
      if (ch == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (ch == ' ' || ch == '\t' || ch == '\r' ||
                 (cross_lines && ch == '\n')) {
        advance();
      } else {
        break;
      }
    }
  }

  int line() const { return line_; }
  int col() const { return col_; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string_view text_;
  std::size_t pos_{0};
  int line_;
  int col_;
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
  throw ParseError(c.line(), c.col(), msg);
}

class ExprParser {
 public:
  ExprParser(Cursor& cur, int num_sites) : cur_(cur), num_sites_(num_sites) {}

  Expr parse() {
    Expr e = parse_sum();
    cur_.skip_space_and_comments(true);
    if (!cur_.eof()) fail(cur_, "unexpected trailing input");
    return e;
  }

  Expr parse_sum() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    for (;;) {
      cur_.skip_space_and_comments(true);
      char ch = cur_.peek();
      if (ch == '+') {
        cur_.advance();
        terms.push_back(parse_term());
      } else if (ch == '-') {
        cur_.advance();
        terms.push_back(parse_term().negated());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

 private:
  Expr parse_term() {
    std::vector<Expr> factors;
    factors.push_back(parse_factor());
    for (;;) {
      cur_.skip_space_and_comments(true);
      if (cur_.peek() == '*') {
        cur_.advance();
        factors.push_back(parse_factor());
      } else {
        break;
      }
    }
    return Expr::product(std::move(factors));
  }

  Expr parse_factor() {
    cur_.skip_space_and_comments(true);
    if (cur_.eof()) fail(cur_, "expected operand");
    char ch = cur_.peek();
    if (ch == '-') {
      cur_.advance();
      return parse_factor().negated();
    }
    if (ch == '(') {
      cur_.advance();
      Expr inner = parse_sum();
      cur_.skip_space_and_comments(true);
      if (cur_.peek() != ')') fail(cur_, "expected ')'");
      cur_.advance();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(ch))) return parse_word();
    fail(cur_, std::string("unknown token '") + ch + "'");
  }

  Expr parse_number() {
    std::string_view rest = cur_.rest();
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (ec != std::errc{}) fail(cur_, "malformed number");
    for (std::size_t i = 0; i < static_cast<std::size_t>(ptr - rest.data());
         ++i)
      cur_.advance();
    if (!std::isfinite(value)) fail(cur_, "non-finite number");
    return Expr::scalar(value);
  }

  Expr parse_word() {
    int line = cur_.line(), col = cur_.col();
    std::string word;
    while (!cur_.eof() &&
           (std::isalnum(static_cast<unsigned char>(cur_.peek())) ||
            cur_.peek() == '_'))
      word += cur_.advance();
    if (word == "i") return Expr::scalar(std::complex<double>(0.0, 1.0));
    OpAtom::Kind kind;
    if (word == "c")
      kind = OpAtom::Kind::annihilate;
    else if (word == "cdag")
      kind = OpAtom::Kind::create;
    else if (word == "n")
      kind = OpAtom::Kind::number;
    else
      throw ParseError(line, col, "unknown token '" + word + "'");
    cur_.skip_space_and_comments(true);
    if (cur_.peek() != '(') fail(cur_, "expected '(' after operator name");
    cur_.advance();
    cur_.skip_space_and_comments(true);
    int site_line = cur_.line(), site_col = cur_.col();
    int site = parse_int();
    cur_.skip_space_and_comments(true);
    if (cur_.peek() != ',') fail(cur_, "expected ',' in operator argument");
    cur_.advance();
    Spin spin = parse_spin();
    cur_.skip_space_and_comments(true);
    if (cur_.peek() != ')') fail(cur_, "expected ')'");
    cur_.advance();
    if (site < 0 || (num_sites_ > 0 && site >= num_sites_))
      throw ParseError(site_line, site_col,
                       "site index " + std::to_string(site) +
                           " out of range for " + std::to_string(num_sites_) +
                           " sites");
    return Expr::atom(kind, site, spin);
  }

  int parse_int() {
    std::string_view rest = cur_.rest();
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (ec != std::errc{}) fail(cur_, "expected integer");
    for (std::size_t i = 0; i < static_cast<std::size_t>(ptr - rest.data());
         ++i)
      cur_.advance();
    return value;
  }

  Spin parse_spin() {
    cur_.skip_space_and_comments(true);
    std::string word;
    while (!cur_.eof() &&
           std::isalpha(static_cast<unsigned char>(cur_.peek())))
      word += cur_.advance();
    if (word == "up") return Spin::up;
    if (word == "dn") return Spin::dn;
    fail(cur_, "expected spin label 'up' or 'dn'");
  }

  Cursor& cur_;
  int num_sites_;
};

struct Line {
  int number;
  std::string text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back({number, std::string(text.substr(start, end - start))});
    start = end + 1;
    ++number;
    if (end == text.size()) break;
  }
  return lines;
}

std::string strip_comment(const std::string& s) {
  auto pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

bool is_blank(const std::string& s) {
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  return true;
}

std::string trim(const std::string& s, int* col_offset = nullptr) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (col_offset) *col_offset = static_cast<int>(b);
  return s.substr(b, e - b);
}

double parse_number_value(const Line& line, const std::string& value,
                          int col) {
  double out = 0.0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() ||
      !std::isfinite(out))
    throw ParseError(line.number, col, "malformed number '" + value + "'");
  return out;
}

}  // namespace

Expr parse_expr(std::string_view text, int num_sites) {
  Cursor cur(text);
  cur.skip_space_and_comments(true);
  if (cur.eof()) fail(cur, "empty expression");
  return ExprParser(cur, num_sites).parse();
}

ModelSpec parse_model(std::string_view text) {
  ModelSpec spec;
  auto lines = split_lines(text);

  // First pass: locate sections; [lattice] must be interpreted before any
  // dissipator expression so that site ranges can be checked.
  enum class Section { none, lattice, hamiltonian, dissipators };
  auto section_of = [](const std::string& s) -> std::optional<Section> {
    if (s == "[lattice]") return Section::lattice;
    if (s == "[hamiltonian]") return Section::hamiltonian;
    if (s == "[dissipators]") return Section::dissipators;
    return std::nullopt;
  };

  bool saw_lattice = false;
  Section current = Section::none;
  std::vector<std::pair<Line, Section>> content;
  for (const auto& line : lines) {
    std::string body = strip_comment(line.text);
    if (is_blank(body)) continue;
    int off = 0;
    std::string t = trim(body, &off);
    if (t.front() == '[') {
      auto sec = section_of(t);
      if (!sec)
        throw ParseError(line.number, off + 1, "unknown section " + t);
      current = *sec;
      if (current == Section::lattice) saw_lattice = true;
      continue;
    }
    if (current == Section::none)
      throw ParseError(line.number, off + 1,
                       "content before any section header");
    content.push_back({line, current});
  }
  if (!saw_lattice) throw ParseError(1, 1, "missing [lattice] section");

  auto split_kv = [](const Line& line, char sep)
      -> std::tuple<std::string, std::string, int> {
    std::string body = strip_comment(line.text);
    auto pos = body.find(sep);
    if (pos == std::string::npos)
      throw ParseError(line.number, 1,
                       std::string("expected '") + sep + "' in line");
    int koff = 0;
    std::string key = trim(body.substr(0, pos), &koff);
    int voff = 0;
    std::string value = trim(body.substr(pos + 1), &voff);
    return {key, value, static_cast<int>(pos) + 2 + voff};
  };

  // lattice and hamiltonian keys
  for (const auto& [line, sec] : content) {
    if (sec == Section::lattice) {
      auto [key, value, vcol] = split_kv(line, '=');
      if (key == "sites") {
        int v = 0;
        auto [ptr, ec] =
            std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size())
          throw ParseError(line.number, vcol, "malformed integer");
        spec.num_sites = v;
      } else if (key == "boundary") {
        if (value == "open")
          spec.boundary = Boundary::open;
        else if (value == "periodic")
          spec.boundary = Boundary::periodic;
        else
          throw ParseError(line.number, vcol,
                           "boundary must be 'open' or 'periodic'");
      } else {
        throw ParseError(line.number, 1, "unknown lattice key '" + key + "'");
      }
    } else if (sec == Section::hamiltonian) {
      auto [key, value, vcol] = split_kv(line, '=');
      if (key == "J")
        spec.hopping = parse_number_value(line, value, vcol);
      else if (key == "U")
        spec.interaction = parse_number_value(line, value, vcol);
      else if (key == "mu")
        spec.chemical_potential = parse_number_value(line, value, vcol);
      else
        throw ParseError(line.number, 1,
                         "unknown hamiltonian key '" + key + "'");
    }
  }
  if (spec.num_sites <= 0)
    throw ParseError(1, 1, "lattice must declare sites >= 1");

  // dissipator lines: "label: expr"; a leading real scalar factor is the
  // rate, an absent one means rate 1.
  for (const auto& [line, sec] : content) {
    if (sec != Section::dissipators) continue;
    std::string body = strip_comment(line.text);
    auto pos = body.find(':');
    if (pos == std::string::npos)
      throw ParseError(line.number, 1, "expected ':' in dissipator line");
    int loff = 0;
    std::string label = trim(body.substr(0, pos), &loff);
    if (label.empty())
      throw ParseError(line.number, 1, "empty dissipator label");
    std::string expr_text = body.substr(pos + 1);
    Cursor cur(expr_text, line.number, static_cast<int>(pos) + 2);
    cur.skip_space_and_comments(false);
    if (cur.eof())
      throw ParseError(line.number, static_cast<int>(pos) + 2,
                       "empty dissipator expression");
    Expr e = ExprParser(cur, spec.num_sites).parse_sum();
    cur.skip_space_and_comments(false);
    if (!cur.eof()) fail(cur, "unexpected trailing input");

    Dissipator d;
    d.label = label;
    if (e.kind() == Expr::Kind::scalar)
      throw ParseError(line.number, static_cast<int>(pos) + 2,
                       "dissipator has no operator content");
    if (e.kind() == Expr::Kind::product &&
        e.children().front().kind() == Expr::Kind::scalar) {
      std::complex<double> c = e.children().front().scalar_value();
      if (c.imag() != 0.0)
        throw ParseError(line.number, static_cast<int>(pos) + 2,
                         "dissipator rate must be real");
      d.rate = c.real();
      std::vector<Expr> rest(e.children().begin() + 1, e.children().end());
      d.op = Expr::product(std::move(rest));
    } else {
      d.rate = 1.0;
      d.op = e;
    }
    spec.dissipators.push_back(std::move(d));
  }
  return spec;
}

namespace {

void collect_issues(const Expr& e, int num_sites,
                    std::vector<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::scalar: {
      auto v = e.scalar_value();
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        out.push_back("non-finite coefficient in operator expression");
      break;
    }
    case Expr::Kind::atom: {
      const auto& a = e.op_atom();
      if (a.site < 0 || a.site >= num_sites)
        out.push_back("site index " + std::to_string(a.site) +
                      " out of range");
      break;
    }
    default:
      for (const auto& c : e.children()) collect_issues(c, num_sites, out);
  }
}

}  // namespace

std::vector<std::string> validate(const ModelSpec& spec) {
  std::vector<std::string> issues;
  if (spec.num_sites < 1)
    issues.push_back("num_sites must be at least 1, got " +
                     std::to_string(spec.num_sites));
  if (spec.num_sites > kMaxSites)
    issues.push_back("capacity exceeded: num_sites = " +
                     std::to_string(spec.num_sites) + " exceeds " +
                     std::to_string(kMaxSites));
  for (const auto& d : spec.dissipators) {
    if (!(d.rate >= 0.0))
      issues.push_back("negative rate " + format_double(d.rate) +
                       " for dissipator '" + d.label + "'");
    if (spec.num_sites >= 1 && spec.num_sites <= kMaxSites)
      collect_issues(d.op, spec.num_sites, issues);
  }
  if (!std::isfinite(spec.hopping) || !std::isfinite(spec.interaction) ||
      !std::isfinite(spec.chemical_potential))
    issues.push_back("non-finite Hamiltonian parameter");
  return issues;
}

}  // namespace oqs::opspec
