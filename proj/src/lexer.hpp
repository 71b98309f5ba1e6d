#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "forge/source.hpp"

namespace forge {

enum class Tok {
  End,
  Ident,
  Int,
  HoleMark,  // ??N (value carries N)
  Assign,    // :=
  Colon,
  Comma,
  Dot,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,    // =
  Ne,    // !=
  Plus,
  Minus,
  Underscore,
  Error,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long value = 0;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : src_(text) { next(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }
  bool at(Tok k) const { return tok_.kind == k; }
  bool at_word(const char* w) const { return tok_.kind == Tok::Ident && tok_.text == w; }

 private:
  void next() {
    skip_ws();
    tok_ = Token{};
    tok_.span.begin = pos();
    if (i_ >= src_.size()) {
      tok_.kind = Tok::End;
      tok_.span.end = pos();
      return;
    }
    char c = src_[i_];
    if (std::isalpha((unsigned char)c)) {
      size_t s = i_;
      while (i_ < src_.size() && (std::isalnum((unsigned char)src_[i_]) || src_[i_] == '_')) adv();
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(s, i_ - s);
    } else if (std::isdigit((unsigned char)c)) {
      size_t s = i_;
      while (i_ < src_.size() && std::isdigit((unsigned char)src_[i_])) adv();
      tok_.kind = Tok::Int;
      tok_.text = src_.substr(s, i_ - s);
      tok_.value = std::stoll(tok_.text);
    } else if (c == '?' && i_ + 1 < src_.size() && src_[i_ + 1] == '?') {
      adv();
      adv();
      size_t s = i_;
      while (i_ < src_.size() && std::isdigit((unsigned char)src_[i_])) adv();
      if (s == i_) {
        tok_.kind = Tok::Error;
        tok_.text = "expected hole number after '?\?'";
      } else {
        tok_.kind = Tok::HoleMark;
        tok_.value = std::stoll(src_.substr(s, i_ - s));
      }
    } else {
      adv();
      switch (c) {
        case ':':
          if (i_ < src_.size() && src_[i_] == '=') {
            adv();
            tok_.kind = Tok::Assign;
          } else {
            tok_.kind = Tok::Colon;
          }
          break;
        case ',': tok_.kind = Tok::Comma; break;
        case '.': tok_.kind = Tok::Dot; break;
        case '(': tok_.kind = Tok::LParen; break;
        case ')': tok_.kind = Tok::RParen; break;
        case '[': tok_.kind = Tok::LBracket; break;
        case ']': tok_.kind = Tok::RBracket; break;
        case '{': tok_.kind = Tok::LBrace; break;
        case '}': tok_.kind = Tok::RBrace; break;
        case '+': tok_.kind = Tok::Plus; break;
        case '-': tok_.kind = Tok::Minus; break;
        case '_': tok_.kind = Tok::Underscore; break;
        case '=':
          tok_.kind = Tok::Eq;
          break;
        case '!':
          if (i_ < src_.size() && src_[i_] == '=') {
            adv();
            tok_.kind = Tok::Ne;
          } else {
            tok_.kind = Tok::Error;
            tok_.text = "stray '!'";
          }
          break;
        case '<':
          if (i_ < src_.size() && src_[i_] == '=') {
            adv();
            tok_.kind = Tok::Le;
          } else {
            tok_.kind = Tok::Lt;
          }
          break;
        case '>':
          if (i_ < src_.size() && src_[i_] == '=') {
            adv();
            tok_.kind = Tok::Ge;
          } else {
            tok_.kind = Tok::Gt;
          }
          break;
        default:
          tok_.kind = Tok::Error;
          tok_.text = std::string("unexpected character '") + c + "'";
      }
    }
    tok_.span.end = pos();
  }

  void skip_ws() {
    for (;;) {
      while (i_ < src_.size() && std::isspace((unsigned char)src_[i_])) adv();
      if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') adv();
        continue;
      }
      break;
    }
  }

  void adv() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  SourcePos pos() const { return SourcePos{line_, col_}; }

  const std::string& src_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace forge
