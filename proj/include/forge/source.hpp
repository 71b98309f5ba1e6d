#pragma once

#include <string>
#include <vector>

namespace forge {

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct SourceSpan {
  SourcePos begin;
  SourcePos end;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

inline Diagnostic error_at(SourceSpan span, std::string msg) {
  return Diagnostic{Severity::Error, std::move(msg), span};
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::string format_diagnostic(const Diagnostic& d);

}  // namespace forge
