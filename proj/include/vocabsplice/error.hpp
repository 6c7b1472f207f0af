#pragma once

#include <stdexcept>
#include <string>

namespace vocabsplice {

/// Every failure raised by the library. The message is meant to be shown to
/// the user as-is, so it names the offending file, line, id or word.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vocabsplice
