#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace svote {

// Base of every error raised by the library. A phase tag ("validation",
// "selection", ...) may be attached while the error propagates out of the
// tallying protocol.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override {
    return full_.empty() ? message_.c_str() : full_.c_str();
  }

  const std::string& message() const noexcept { return message_; }
  const std::string& phase() const noexcept { return phase_; }

  void set_phase(std::string phase) {
    if (!phase_.empty()) return;  // innermost phase wins
    phase_ = std::move(phase);
    full_ = phase_ + ": " + message_;
  }

 private:
  std::string message_;
  std::string phase_;
  std::string full_;
};

#define SVOTE_DEFINE_ERROR(Name)      \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

SVOTE_DEFINE_ERROR(ConfigError);
SVOTE_DEFINE_ERROR(ParseError);
SVOTE_DEFINE_ERROR(ModulusMismatch);
SVOTE_DEFINE_ERROR(InversionOfZero);
SVOTE_DEFINE_ERROR(ShareSetError);
SVOTE_DEFINE_ERROR(InsufficientShares);
SVOTE_DEFINE_ERROR(ChoiceError);
SVOTE_DEFINE_ERROR(IllegalBallot);
SVOTE_DEFINE_ERROR(SessionError);
SVOTE_DEFINE_ERROR(PreprocessingError);
SVOTE_DEFINE_ERROR(AbortError);
SVOTE_DEFINE_ERROR(ChannelError);
SVOTE_DEFINE_ERROR(SubmitTimeout);
SVOTE_DEFINE_ERROR(EmptyElection);

#undef SVOTE_DEFINE_ERROR

}  // namespace svote
