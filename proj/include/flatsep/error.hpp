// Library-wide error type with a machine-checkable kind.
#pragma once

#include <stdexcept>
#include <string>

#include "flatsep/word.hpp"

namespace flatsep {

enum class ErrorKind {
  Parse,                    // malformed input text
  UnknownSymbol,            // word uses a symbol outside the alphabet
  AlphabetClash,            // base alphabet already contains < or >
  EmptyBaseAlphabet,        // no base symbols besides < and >
  NotCnf,                   // grammar fails the Chomsky-normal-form shape
  ShortWordsAccepted,       // language contains the empty word or a 1-letter word
  BadShape,                 // grammar fails the bracket-flattened shape
  BudgetExceeded,           // enumeration or sampling exceeded its limits
  NoDerivation,             // no derivation exists within the requested size
  EmptyWord,                // padding applied to the empty word
  ShortDerivation,          // witness requested for a bare-terminal derivation
  NotASeparator,            // candidate automaton fails a separation check
  MalformedConfiguration,   // machine configuration word is ill-formed
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::AlphabetClash: return "AlphabetClash";
    case ErrorKind::EmptyBaseAlphabet: return "EmptyBaseAlphabet";
    case ErrorKind::NotCnf: return "NotCnf";
    case ErrorKind::ShortWordsAccepted: return "ShortWordsAccepted";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoDerivation: return "NoDerivation";
    case ErrorKind::EmptyWord: return "EmptyWord";
    case ErrorKind::ShortDerivation: return "ShortDerivation";
    case ErrorKind::NotASeparator: return "NotASeparator";
    case ErrorKind::MalformedConfiguration: return "MalformedConfiguration";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a claimed separator misclassifies a word; carries the word.
class SeparationError : public Error {
 public:
  SeparationError(const std::string& message, Word counterexample)
      : Error(ErrorKind::NotASeparator, message),
        counterexample_(std::move(counterexample)) {}

  const Word& counterexample() const { return counterexample_; }

 private:
  Word counterexample_;
};

}  // namespace flatsep
