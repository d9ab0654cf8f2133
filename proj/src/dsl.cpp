#include "t2m/dsl.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace t2m {

namespace {

enum class Tok { Ident, Number, Punct, Arrow, LayerComment, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
  std::size_t line_end_comment = 0;  // layer number when kind == LayerComment
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      const SourceSpan span{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", span});
        return out;
      }
      const char c = src_[pos_];
      if (c == '#') {
        std::size_t end = src_.find('\n', pos_);
        if (end == std::string_view::npos) end = src_.size();
        const auto body = src_.substr(pos_ + 1, end - pos_ - 1);
        if (auto layer = layer_comment(body)) out.push_back({Tok::LayerComment, std::string(body), span, *layer});
        advance(end - pos_);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t n = 0;
        while (pos_ + n < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_')) {
          ++n;
        }
        out.push_back({Tok::Ident, std::string(src_.substr(pos_, n)), span});
        advance(n);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t n = 0;
        while (pos_ + n < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + n]))) ++n;
        out.push_back({Tok::Number, std::string(src_.substr(pos_, n)), span});
        advance(n);
        continue;
      }
      if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        out.push_back({Tok::Arrow, "->", span});
        advance(2);
        continue;
      }
      if (std::string_view("{};:,=?").find(c) != std::string_view::npos) {
        out.push_back({Tok::Punct, std::string(1, c), span});
        advance(1);
        continue;
      }
      throw SyntaxError(span, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  static std::optional<std::size_t> layer_comment(std::string_view body) {
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    constexpr std::string_view key = "layer:";
    if (body.substr(0, key.size()) != key) return std::nullopt;
    body.remove_prefix(key.size());
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    if (body.empty()) return std::nullopt;
    std::size_t value = 0;
    for (char ch : body) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
      value = value * 10 + static_cast<std::size_t>(ch - '0');
    }
    return value;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance(1);
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<MachineGraph> file() {
    std::vector<MachineGraph> out;
    skip_comments();
    do {
      out.push_back(machine());
      skip_comments();
    } while (peek().kind != Tok::End);
    return out;
  }

 private:
  const Token& peek() const { return toks_[i_]; }

  const Token& next() {
    const Token& t = toks_[i_];
    if (t.kind != Tok::End) ++i_;
    return t;
  }

  void skip_comments() {
    while (peek().kind == Tok::LayerComment) ++i_;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.span, "expected " + what + ", found " + found);
  }

  const Token& expect_punct(const char* p) {
    skip_comments();
    const Token& t = next();
    if (t.kind != Tok::Punct || t.text != p) fail(t, std::string("'") + p + "'");
    return t;
  }

  void expect_arrow() {
    skip_comments();
    const Token& t = next();
    if (t.kind != Tok::Arrow) fail(t, "'->'");
  }

  const Token& ident(const char* what = "identifier") {
    skip_comments();
    const Token& t = next();
    if (t.kind != Tok::Ident) fail(t, what);
    return t;
  }

  void keyword(const char* kw) {
    skip_comments();
    const Token& t = next();
    if (t.kind != Tok::Ident || t.text != kw) fail(t, std::string("'") + kw + "'");
  }

  unsigned digit(const Token& t, std::size_t at, unsigned lo, unsigned hi, const char* what) {
    if (t.text.size() != at + 1 || !std::isdigit(static_cast<unsigned char>(t.text[at]))) {
      throw SyntaxError(t.span, std::string("unknown label '") + t.text + "'");
    }
    const unsigned d = static_cast<unsigned>(t.text[at] - '0');
    if (d < lo || d > hi) {
      throw SyntaxError(t.span, std::string(what) + " label '" + t.text + "' names a tape outside " + std::to_string(lo) +
                                    ".." + std::to_string(hi));
    }
    return d;
  }

  MachineGraph machine() {
    keyword("machine");
    MachineBuilder b(ident("machine name").text);
    expect_punct("{");
    keyword("start");
    b.start(ident("start vertex").text);
    expect_punct(";");
    std::unordered_set<std::string> defined;
    while (true) {
      skip_comments();
      if (peek().kind == Tok::Punct && peek().text == "}") break;
      const Token& name = ident("vertex name or '}'");
      if (!defined.insert(name.text).second) {
        throw SyntaxError(name.span, "vertex '" + name.text + "' is defined twice");
      }
      expect_punct(":");
      body(b, name.text);
      expect_punct(";");
      if (peek().kind == Tok::LayerComment && peek().span.line == toks_[i_ - 1].span.line) {
        b.layer(name.text, static_cast<unsigned>(next().line_end_comment));
      }
    }
    expect_punct("}");
    auto g = b.build();
    validate_graph(g);
    return g;
  }

  void body(MachineBuilder& b, const std::string& name) {
    skip_comments();
    const Token& head = next();
    if (head.kind == Tok::Punct && head.text == "?") {
      keyword("cont");
      expect_punct("=");
      std::string cont = ident("cont successor").text;
      keyword("query");
      expect_punct("=");
      std::string query = ident("query successor").text;
      b.query(name, std::move(cont), std::move(query));
      return;
    }
    if (head.kind != Tok::Ident) fail(head, "label");
    const std::string& t = head.text;
    if (t == "accept") {
      b.accept(name);
    } else if (t == "reject") {
      b.reject(name);
    } else if (t == "s") {
      expect_arrow();
      b.begin(name, ident("successor").text);
    } else if (t[0] == 't') {
      const unsigned tape = digit(head, 1, 0, 2, "branch");
      expect_arrow();
      std::string on0 = ident("successor").text;
      expect_punct(",");
      std::string on1 = ident("successor").text;
      b.branch(name, tape, std::move(on0), std::move(on1));
    } else if (t[0] == 'l' || t[0] == 'r') {
      const unsigned tape = digit(head, 1, 0, 2, "move");
      expect_arrow();
      if (t[0] == 'l') {
        b.left(name, tape, ident("successor").text);
      } else {
        b.right(name, tape, ident("successor").text);
      }
    } else if (t[0] == 'w') {
      const unsigned tape = digit(head, 1, 1, 3, "write");
      expect_punct("=");
      skip_comments();
      const Token& bit = next();
      if (bit.kind != Tok::Number || (bit.text != "0" && bit.text != "1")) fail(bit, "bit 0 or 1");
      expect_arrow();
      b.write(name, tape, bit.text == "1" ? 1u : 0u, ident("successor").text);
    } else {
      throw SyntaxError(head.span, "unknown label '" + t + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

std::vector<MachineGraph> parse_machines(std::string_view text) {
  return Parser(Lexer(text).tokenize()).file();
}

MachineGraph parse_machine(std::string_view text) {
  auto all = parse_machines(text);
  if (all.size() != 1) {
    throw SyntaxError(SourceSpan{1, 1}, "expected exactly one machine, found " + std::to_string(all.size()));
  }
  return std::move(all.front());
}

std::string print_machine(const MachineGraph& m) {
  validate_graph(m);
  std::ostringstream out;
  out << "machine " << m.name() << " {\n";
  out << "  start " << m.vertex(*m.start()).name << ";\n";
  for (VertexId v = 0; v < m.size(); ++v) {
    const auto& vx = m.vertex(v);
    auto succ = [&](std::size_t k) -> const std::string& { return m.vertex(vx.successors[k]).name; };
    out << "  " << vx.name << ": ";
    switch (vx.label.kind()) {
      case LabelKind::Branch: out << vx.label.to_string() << " -> " << succ(0) << ", " << succ(1); break;
      case LabelKind::Query: out << "? cont=" << succ(0) << " query=" << succ(1); break;
      case LabelKind::Accept:
      case LabelKind::Reject: out << vx.label.to_string(); break;
      default: out << vx.label.to_string() << " -> " << succ(0); break;
    }
    out << ';';
    if (auto tag = m.layer_tag(v)) out << "  # layer: " << *tag;
    out << '\n';
  }
  out << "}\n";
  return out.str();
}

MachineGraph load_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open machine file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_machine(buf.str());
}

}  // namespace t2m
