#include "regsentry/minic/parser.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "regsentry/error.hpp"

namespace regsentry::minic {
namespace {

enum class Tok {
  End,
  Ident,
  Number,
  KwInt,
  KwVoid,
  KwRecord,
  KwIf,
  KwElse,
  KwWhile,
  KwReturn,
  KwAssume,
  KwAssert,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Dot,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  NotEq,
  AndAnd,
  OrOr,
  Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  int line = 1;
  int column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = keyword(t.text);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        if (t.text.size() > 12)
          throw ParseError("integer literal too large", t.line, t.column);
        t.number = std::stoll(t.text);
        t.kind = Tok::Number;
      } else {
        t.kind = punct(t.text);
        if (t.kind == Tok::End)
          throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        int line = line_, column = column_;
        advance();
        advance();
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/'))
          advance();
        if (pos_ + 1 >= text_.size()) throw ParseError("unterminated comment", line, column);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  static Tok keyword(const std::string& s) {
    if (s == "int") return Tok::KwInt;
    if (s == "void") return Tok::KwVoid;
    if (s == "record") return Tok::KwRecord;
    if (s == "if") return Tok::KwIf;
    if (s == "else") return Tok::KwElse;
    if (s == "while") return Tok::KwWhile;
    if (s == "return") return Tok::KwReturn;
    if (s == "assume") return Tok::KwAssume;
    if (s == "assert") return Tok::KwAssert;
    return Tok::Ident;
  }

  Tok punct(std::string& spelled) {
    static const std::pair<const char*, Tok> table[] = {
        {"&&", Tok::AndAnd}, {"||", Tok::OrOr},  {"<=", Tok::Le},      {">=", Tok::Ge},
        {"==", Tok::EqEq},   {"!=", Tok::NotEq}, {"(", Tok::LParen},   {")", Tok::RParen},
        {"{", Tok::LBrace},  {"}", Tok::RBrace}, {"[", Tok::LBracket}, {"]", Tok::RBracket},
        {";", Tok::Semi},    {",", Tok::Comma},  {".", Tok::Dot},      {"=", Tok::Assign},
        {"+", Tok::Plus},    {"-", Tok::Minus},  {"*", Tok::Star},     {"/", Tok::Slash},
        {"%", Tok::Percent}, {"<", Tok::Lt},     {">", Tok::Gt},       {"!", Tok::Bang},
    };
    for (const auto& [text, kind] : table) {
      std::string_view sv(text);
      if (text_.substr(pos_, sv.size()) == sv) {
        spelled = text;
        for (std::size_t i = 0; i < sv.size(); ++i) advance();
        return kind;
      }
    }
    return Tok::End;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : tokens_(std::move(tokens)), options_(options) {}

  SourceUnit unit() {
    SourceUnit out;
    while (!at(Tok::End)) {
      if (at(Tok::KwRecord))
        out.records.push_back(record());
      else
        out.functions.push_back(function());
    }
    return out;
  }

  ExprPtr standalone_expression(bool allow_return) {
    allow_return_ = allow_return;
    auto e = expression();
    expect(Tok::End, "end of expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }

  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError("expected " + expected + ", found " + describe(t), t.line, t.column);
  }

  Token expect(Tok k, const std::string& expected) {
    if (!at(k)) fail(expected);
    return take();
  }

  Span span_of(const Token& t) const { return Span{0, t.line, t.column}; }

  std::string identifier(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (!options_.harness && t.text.rfind("__", 0) == 0)
      throw ParseError("identifiers starting with '__' are reserved", t.line, t.column);
    return t.text;
  }

  int array_length() {
    expect(Tok::LBracket, "'['");
    Token n = expect(Tok::Number, "array length");
    expect(Tok::RBracket, "']'");
    if (n.number > std::numeric_limits<int>::max())
      throw ParseError("array length too large", n.line, n.column);
    return static_cast<int>(n.number);
  }

  RecordDecl record() {
    Token kw = take();
    RecordDecl r;
    r.span = span_of(kw);
    r.name = identifier("record name");
    expect(Tok::LBrace, "'{'");
    do {
      expect(Tok::KwInt, "'int' field declaration");
      r.fields.push_back(identifier("field name"));
      expect(Tok::Semi, "';'");
    } while (!at(Tok::RBrace));
    take();
    return r;
  }

  TypeTag base_type(const std::string& what) {
    if (at(Tok::KwInt)) {
      take();
      return TypeTag::integer();
    }
    if (at(Tok::Ident)) return TypeTag::record_of(take().text);
    fail(what);
  }

  FunctionDef function() {
    FunctionDef f;
    const Token& first = peek();
    f.span = span_of(first);
    if (at(Tok::KwVoid)) {
      take();
      f.return_type = TypeTag::void_type();
    } else {
      f.return_type = base_type("function declaration");
    }
    f.name = identifier("function name");
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.span = span_of(peek());
        p.type = base_type("parameter type");
        p.name = identifier("parameter name");
        if (at(Tok::LBracket)) {
          if (!p.type.is_int()) fail("',' or ')'");
          p.type = TypeTag::array_of(array_length());
        }
        f.params.push_back(std::move(p));
      } while (at(Tok::Comma) && (take(), true));
    }
    expect(Tok::RParen, "')'");
    f.body = block();
    return f;
  }

  std::vector<StmtPtr> block() {
    expect(Tok::LBrace, "'{'");
    std::vector<StmtPtr> out;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("'}'");
      out.push_back(statement());
    }
    take();
    return out;
  }

  std::vector<StmtPtr> branch() {
    if (at(Tok::LBrace)) return block();
    return {statement()};
  }

  StmtPtr make(Stmt::Kind kind, const Token& at_token) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    s->span = span_of(at_token);
    return s;
  }

  void declaration_init(Stmt& s) {
    if (!at(Tok::Assign)) return;
    take();
    if (at(Tok::LBrace)) {
      take();
      s.has_init_list = true;
      if (!at(Tok::RBrace)) {
        do {
          s.init_list.push_back(expression());
        } while (at(Tok::Comma) && (take(), true));
      }
      expect(Tok::RBrace, "'}'");
    } else {
      s.init = expression();
    }
  }

  StmtPtr statement() {
    const Token first = peek();
    switch (first.kind) {
      case Tok::LBrace: {
        auto s = make(Stmt::Kind::Block, first);
        s->body = block();
        return s;
      }
      case Tok::KwIf: {
        take();
        auto s = make(Stmt::Kind::If, first);
        expect(Tok::LParen, "'('");
        s->expr = expression();
        expect(Tok::RParen, "')'");
        s->body = branch();
        if (at(Tok::KwElse)) {
          take();
          s->has_else = true;
          s->else_body = branch();
        }
        return s;
      }
      case Tok::KwWhile: {
        take();
        auto s = make(Stmt::Kind::While, first);
        expect(Tok::LParen, "'('");
        s->expr = expression();
        expect(Tok::RParen, "')'");
        s->body = branch();
        return s;
      }
      case Tok::KwReturn: {
        take();
        auto s = make(Stmt::Kind::Return, first);
        if (!at(Tok::Semi)) s->expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwAssume:
      case Tok::KwAssert: {
        if (!options_.harness)
          throw ParseError("'" + first.text + "' is only permitted in harness files", first.line,
                           first.column);
        take();
        auto s = make(first.kind == Tok::KwAssume ? Stmt::Kind::Assume : Stmt::Kind::Assert, first);
        expect(Tok::LParen, "'('");
        s->expr = expression();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwInt: {
        take();
        auto s = make(Stmt::Kind::Decl, first);
        s->name = identifier("variable name");
        s->decl_type = TypeTag::integer();
        if (at(Tok::LBracket)) s->decl_type = TypeTag::array_of(array_length());
        declaration_init(*s);
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::Ident: {
        if (at(Tok::Ident, 1)) {
          auto s = make(Stmt::Kind::Decl, first);
          s->decl_type = TypeTag::record_of(take().text);
          s->name = identifier("variable name");
          declaration_init(*s);
          expect(Tok::Semi, "';'");
          return s;
        }
        if (at(Tok::LParen, 1)) {
          auto s = make(Stmt::Kind::ExprStmt, first);
          s->expr = expression();
          expect(Tok::Semi, "';'");
          return s;
        }
        auto s = make(Stmt::Kind::Assign, first);
        s->target = lvalue();
        expect(Tok::Assign, "'='");
        s->expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      }
      default: fail("statement");
    }
  }

  ExprPtr make_expr(Expr::Kind kind, const Token& t) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->span = span_of(t);
    return e;
  }

  ExprPtr lvalue() {
    Token name = peek();
    auto base = make_expr(Expr::Kind::Var, name);
    base->name = identifier("variable");
    return postfix(std::move(base));
  }

  ExprPtr postfix(ExprPtr var) {
    if (at(Tok::Dot)) {
      take();
      var->kind = Expr::Kind::Field;
      var->field = identifier("field name");
    } else if (at(Tok::LBracket)) {
      take();
      var->kind = Expr::Kind::Index;
      var->operands.push_back(expression());
      expect(Tok::RBracket, "']'");
    }
    return var;
  }

  static int precedence(Tok k) {
    switch (k) {
      case Tok::OrOr: return 1;
      case Tok::AndAnd: return 2;
      case Tok::EqEq:
      case Tok::NotEq: return 3;
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge: return 4;
      case Tok::Plus:
      case Tok::Minus: return 5;
      case Tok::Star:
      case Tok::Slash:
      case Tok::Percent: return 6;
      default: return 0;
    }
  }

  static BinaryOp binary_op(Tok k) {
    switch (k) {
      case Tok::OrOr: return BinaryOp::Or;
      case Tok::AndAnd: return BinaryOp::And;
      case Tok::EqEq: return BinaryOp::Eq;
      case Tok::NotEq: return BinaryOp::Ne;
      case Tok::Lt: return BinaryOp::Lt;
      case Tok::Le: return BinaryOp::Le;
      case Tok::Gt: return BinaryOp::Gt;
      case Tok::Ge: return BinaryOp::Ge;
      case Tok::Plus: return BinaryOp::Add;
      case Tok::Minus: return BinaryOp::Sub;
      case Tok::Star: return BinaryOp::Mul;
      case Tok::Slash: return BinaryOp::Div;
      default: return BinaryOp::Mod;
    }
  }

  ExprPtr expression(int min_prec = 1) {
    auto lhs = unary();
    for (;;) {
      int prec = precedence(peek().kind);
      if (prec < min_prec || prec == 0) return lhs;
      Token op = take();
      auto rhs = expression(prec + 1);
      auto e = make_expr(Expr::Kind::Binary, op);
      e->span = lhs->span;
      e->binary_op = binary_op(op.kind);
      e->operands = {std::move(lhs), std::move(rhs)};
      lhs = std::move(e);
    }
  }

  ExprPtr unary() {
    if (at(Tok::Minus) || at(Tok::Bang)) {
      Token op = take();
      auto e = make_expr(Expr::Kind::Unary, op);
      e->unary_op = op.kind == Tok::Minus ? UnaryOp::Neg : UnaryOp::Not;
      e->operands.push_back(unary());
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      take();
      auto e = make_expr(Expr::Kind::IntLit, t);
      e->value = t.number;
      return e;
    }
    if (t.kind == Tok::LParen) {
      take();
      auto e = expression();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::KwReturn && allow_return_) {
      take();
      auto e = make_expr(Expr::Kind::Var, t);
      e->name = "return";
      return postfix(std::move(e));
    }
    if (t.kind == Tok::Ident) {
      std::string name = identifier("expression");
      if (at(Tok::LParen)) {
        take();
        auto call = make_expr(Expr::Kind::Call, t);
        call->name = name;
        if (!at(Tok::RParen)) {
          do {
            call->operands.push_back(expression());
          } while (at(Tok::Comma) && (take(), true));
        }
        expect(Tok::RParen, "')'");
        return call;
      }
      auto e = make_expr(Expr::Kind::Var, t);
      e->name = name;
      return postfix(std::move(e));
    }
    fail("expression");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
  bool allow_return_ = false;
};

void set_file(std::vector<StmtPtr>& stmts, int file);

void set_file(const ExprPtr& e, int file) {
  if (!e) return;
  e->span.file = file;
  for (auto& op : e->operands) set_file(op, file);
}

void set_file(std::vector<StmtPtr>& stmts, int file) {
  for (auto& s : stmts) {
    s->span.file = file;
    set_file(s->init, file);
    for (auto& e : s->init_list) set_file(e, file);
    set_file(s->target, file);
    set_file(s->expr, file);
    set_file(s->body, file);
    set_file(s->else_body, file);
  }
}

}  // namespace

SourceUnit parse(std::string_view text, const ParseOptions& options) {
  SourceUnit unit;
  try {
    Parser parser(Lexer(text).run(), options);
    unit = parser.unit();
  } catch (const ParseError& e) {
    throw ParseError(options.path, e);
  }
  unit.files.push_back(SourceFile{options.path, std::string(text)});
  return unit;
}

SourceUnit parse_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseOptions opts = options;
  opts.path = path;
  return parse(buf.str(), opts);
}

ExprPtr parse_expression(std::string_view text, bool allow_return) {
  Parser parser(Lexer(text).run(), ParseOptions{});
  return parser.standalone_expression(allow_return);
}

SourceUnit merge(std::vector<SourceUnit> units) {
  SourceUnit out;
  for (auto& u : units) {
    int offset = static_cast<int>(out.files.size());
    for (auto& r : u.records) {
      r.span.file += offset;
      out.records.push_back(std::move(r));
    }
    for (auto& f : u.functions) {
      f.span.file += offset;
      for (auto& p : f.params) p.span.file += offset;
      set_file(f.body, f.span.file);
      out.functions.push_back(std::move(f));
    }
    for (auto& file : u.files) out.files.push_back(std::move(file));
  }
  return out;
}

}  // namespace regsentry::minic
