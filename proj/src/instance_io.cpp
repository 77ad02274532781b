#include "mplp/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace mplp {

namespace {

using Kind = ParseError::Kind;

struct Token {
  std::string_view text;
  std::size_t line;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    std::size_t q = p;
    while (q < line.size() && !std::isspace(static_cast<unsigned char>(line[q]))) ++q;
    if (q > p) out.push_back(line.substr(p, q - p));
    p = q;
  }
  return out;
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(Kind::malformed, line, "expected a number, got '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw ParseError(Kind::non_finite, line, "non-finite value '" + std::string(s) + "'");
  return v;
}

std::size_t parse_count(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(Kind::malformed, line, "expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

// Yields the non-blank, non-comment lines of a text with their numbers.
class LineReader {
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<std::pair<std::vector<std::string_view>, std::size_t>> next() {
    while (!done_) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) {
        end = text_.size();
        done_ = true;
      }
      auto tokens = split_ws(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_no_;
      if (tokens.empty() || tokens.front().starts_with('#')) continue;
      return std::pair{std::move(tokens), line_no_};
    }
    return std::nullopt;
  }

  std::pair<std::vector<std::string_view>, std::size_t> expect(const std::string& what) {
    auto l = next();
    if (!l) throw ParseError(Kind::malformed, line_no_, "unexpected end of input, expected " + what);
    return *l;
  }

  std::size_t line() const { return line_no_; }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  bool done_ = false;
};

std::size_t single_count(LineReader& in, const std::string& what) {
  auto [tok, line] = in.expect(what);
  if (tok.size() != 1) throw ParseError(Kind::malformed, line, "expected a single " + what);
  return parse_count(tok[0], line);
}

// Whitespace tokens of the whole text, for the free-layout UAI format.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, p = 0;
  while (p < text.size()) {
    if (text[p] == '\n') {
      ++line;
      ++p;
    } else if (std::isspace(static_cast<unsigned char>(text[p]))) {
      ++p;
    } else {
      std::size_t q = p;
      while (q < text.size() && !std::isspace(static_cast<unsigned char>(text[q]))) ++q;
      out.push_back({text.substr(p, q - p), line});
      p = q;
    }
  }
  return out;
}

class TokenStream {
public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size())
      throw ParseError(Kind::malformed, tokens_.empty() ? 1 : tokens_.back().line,
                       std::string("unexpected end of input, expected ") + what);
    return tokens_[pos_++];
  }
  std::size_t count(const char* what) {
    const auto& t = next(what);
    return parse_count(t.text, t.line);
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

PairwiseModel parse_native(std::string_view text) {
  LineReader in(text);
  {
    auto [tok, line] = in.expect("header");
    if (tok.size() != 2 || tok[0] != "MRFLOG" || tok[1] != "1")
      throw ParseError(Kind::malformed, line, "expected header 'MRFLOG 1'");
  }

  ModelParts parts;
  const std::size_t n = single_count(in, "variable count");
  if (n > 0) {
    auto [tok, line] = in.expect("cardinalities");
    if (tok.size() != n)
      throw ParseError(Kind::shape_mismatch, line,
                       "expected " + std::to_string(n) + " cardinalities, got " + std::to_string(tok.size()));
    for (auto t : tok) {
      const auto k = parse_count(t, line);
      if (k == 0) throw ParseError(Kind::malformed, line, "cardinality must be positive");
      parts.cardinalities.push_back(k);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [tok, line] = in.expect("node potential of variable " + std::to_string(i));
    if (tok.size() != parts.cardinalities[i])
      throw ParseError(Kind::shape_mismatch, line,
                       "node potential of variable " + std::to_string(i) + " has " + std::to_string(tok.size()) +
                           " entries, expected " + std::to_string(parts.cardinalities[i]));
    std::vector<double> pot;
    for (auto t : tok) pot.push_back(parse_real(t, line));
    parts.node_potentials.push_back(std::move(pot));
  }

  const std::size_t m = single_count(in, "edge count");
  std::set<std::pair<VarIndex, VarIndex>> seen;
  for (std::size_t e = 0; e < m; ++e) {
    auto [head, hline] = in.expect("edge " + std::to_string(e) + " header");
    if (head.size() != 2) throw ParseError(Kind::malformed, hline, "edge " + std::to_string(e) + ": expected 'i j'");
    const auto i = parse_count(head[0], hline);
    const auto j = parse_count(head[1], hline);
    const auto name = "edge " + std::to_string(e) + " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i >= n || j >= n) throw ParseError(Kind::malformed, hline, name + ": variable out of range");
    if (i == j) throw ParseError(Kind::malformed, hline, name + ": self-loop");
    if (!seen.emplace(std::min(i, j), std::max(i, j)).second)
      throw ParseError(Kind::malformed, hline, name + ": duplicate edge");

    const auto ki = parts.cardinalities[i];
    const auto kj = parts.cardinalities[j];
    Table t(ki, kj);
    for (std::size_t r = 0; r < ki; ++r) {
      auto [row, line] = in.expect(name + " table row " + std::to_string(r));
      if (row.size() != kj)
        throw ParseError(Kind::shape_mismatch, line,
                         name + ": table row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                             " entries, expected " + std::to_string(kj));
      for (std::size_t c = 0; c < kj; ++c) t(r, c) = parse_real(row[c], line);
    }
    parts.edges.emplace_back(i, j);
    parts.edge_potentials.push_back(std::move(t));
  }
  if (auto extra = in.next())
    throw ParseError(Kind::shape_mismatch, extra->second, "unexpected content after the last edge");
  return PairwiseModel(std::move(parts));
}

std::string write_native(const PairwiseModel& model) {
  std::string out = "MRFLOG 1\n" + std::to_string(model.num_vars()) + "\n";
  auto join = [&](auto&& range, auto&& fmt) {
    bool first = true;
    for (const auto& v : range) {
      if (!first) out += ' ';
      out += fmt(v);
      first = false;
    }
    out += '\n';
  };
  if (model.num_vars() > 0) join(model.cardinalities(), [](std::size_t k) { return std::to_string(k); });
  for (VarIndex i = 0; i < model.num_vars(); ++i) join(model.node_potential(i), format_real);
  out += std::to_string(model.num_edges()) + "\n";
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) {
    const auto& [i, j] = model.edge(e);
    out += std::to_string(i) + " " + std::to_string(j) + "\n";
    const auto& t = model.edge_potential(e);
    for (std::size_t r = 0; r < t.rows; ++r)
      join(std::span<const double>(t.values).subspan(r * t.cols, t.cols), format_real);
  }
  return out;
}

PairwiseModel parse_uai(std::string_view text, double zero_floor) {
  TokenStream in(tokenize(text));
  {
    const auto& t = in.next("network type");
    if (t.text != "MARKOV") throw ParseError(Kind::malformed, t.line, "expected 'MARKOV', got '" + std::string(t.text) + "'");
  }
  const std::size_t n = in.count("variable count");
  ModelParts parts;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = in.next("cardinality");
    const auto k = parse_count(t.text, t.line);
    if (k == 0) throw ParseError(Kind::malformed, t.line, "cardinality must be positive");
    parts.cardinalities.push_back(k);
  }
  parts.node_potentials.resize(n);
  for (std::size_t i = 0; i < n; ++i) parts.node_potentials[i].assign(parts.cardinalities[i], 0.0);

  const std::size_t factors = in.count("factor count");
  std::vector<std::vector<VarIndex>> scopes(factors);
  std::set<std::vector<VarIndex>> seen;
  for (std::size_t f = 0; f < factors; ++f) {
    const auto& st = in.next("scope size");
    const auto size = parse_count(st.text, st.line);
    if (size == 0 || size > 2)
      throw ParseError(Kind::unsupported_scope, st.line,
                       "factor " + std::to_string(f) + " has scope size " + std::to_string(size) +
                           "; only unary and pairwise factors are supported");
    for (std::size_t s = 0; s < size; ++s) {
      const auto& vt = in.next("scope variable");
      const auto v = parse_count(vt.text, vt.line);
      if (v >= n) throw ParseError(Kind::malformed, vt.line, "scope variable " + std::to_string(v) + " out of range");
      scopes[f].push_back(v);
    }
    if (size == 2 && scopes[f][0] == scopes[f][1])
      throw ParseError(Kind::malformed, st.line, "factor " + std::to_string(f) + " repeats a variable");
    auto key = scopes[f];
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second)
      throw ParseError(Kind::duplicate_factor, st.line, "factor " + std::to_string(f) + " duplicates an earlier scope");
  }

  for (std::size_t f = 0; f < factors; ++f) {
    const auto& scope = scopes[f];
    std::size_t expected = 1;
    for (auto v : scope) expected *= parts.cardinalities[v];
    const auto& ct = in.next("table size");
    if (parse_count(ct.text, ct.line) != expected)
      throw ParseError(Kind::shape_mismatch, ct.line,
                       "factor " + std::to_string(f) + " table should have " + std::to_string(expected) + " entries");
    std::vector<double> logs(expected);
    for (auto& out : logs) {
      const auto& t = in.next("table entry");
      const double p = parse_real(t.text, t.line);
      if (p < 0.0) throw ParseError(Kind::domain, t.line, "negative table entry in factor " + std::to_string(f));
      out = p == 0.0 ? zero_floor : std::log(p);
    }
    if (scope.size() == 1) {
      parts.node_potentials[scope[0]] = std::move(logs);
    } else {
      parts.edges.emplace_back(scope[0], scope[1]);
      parts.edge_potentials.emplace_back(parts.cardinalities[scope[0]], parts.cardinalities[scope[1]], std::move(logs));
    }
  }
  return PairwiseModel(std::move(parts));
}

std::string write_uai(const PairwiseModel& model) {
  std::ostringstream os;
  os << "MARKOV\n" << model.num_vars() << "\n";
  for (VarIndex i = 0; i < model.num_vars(); ++i) os << (i ? " " : "") << model.cardinality(i);
  os << "\n" << model.num_vars() + model.num_edges() << "\n";
  for (VarIndex i = 0; i < model.num_vars(); ++i) os << "1 " << i << "\n";
  for (const auto& e : model.edges()) os << "2 " << e.i << " " << e.j << "\n";
  auto table = [&](std::span<const double> values) {
    os << "\n" << values.size() << "\n";
    for (std::size_t k = 0; k < values.size(); ++k) os << (k ? " " : "") << format_real(std::exp(values[k]));
    os << "\n";
  };
  for (VarIndex i = 0; i < model.num_vars(); ++i) table(model.node_potential(i));
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) table(model.edge_potential(e).values);
  return os.str();
}

PairwiseModel load_model(const std::string& path, InstanceFormat format, double zero_floor) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  const auto text = buf.str();
  return format == InstanceFormat::native ? parse_native(text) : parse_uai(text, zero_floor);
}

}  // namespace mplp
