#ifndef SOLITON_ERRORS_HPP
#define SOLITON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace soliton {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DenominatorZero : Error {
  explicit DenominatorZero(const std::string& w) : Error(w) {}
};
struct SizeMismatch : Error {
  explicit SizeMismatch(const std::string& w) : Error(w) {}
};
struct NTooLarge : Error {
  explicit NTooLarge(const std::string& w) : Error(w) {}
};
struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& w) : Error(w) {}
};
struct OrderOutOfRange : Error {
  explicit OrderOutOfRange(const std::string& w) : Error(w) {}
};
struct CaseMismatch : Error {
  explicit CaseMismatch(const std::string& w) : Error(w) {}
};
struct PoleAtP : Error {
  explicit PoleAtP(const std::string& w) : Error(w) {}
};
struct RootBracketFailure : Error {
  explicit RootBracketFailure(const std::string& w) : Error(w) {}
};
struct EmptyBranch : Error {
  explicit EmptyBranch(const std::string& w) : Error(w) {}
};
struct ZeroParameter : Error {
  explicit ZeroParameter(const std::string& w) : Error(w) {}
};
struct UnequalMu : Error {
  explicit UnequalMu(const std::string& w) : Error(w) {}
};
struct EigenFailure : Error {
  explicit EigenFailure(const std::string& w) : Error(w) {}
};
struct ToleranceNotMet : Error {
  explicit ToleranceNotMet(const std::string& w) : Error(w) {}
};
struct NoBracket : Error {
  explicit NoBracket(const std::string& w) : Error(w) {}
};
struct NoConvergence : Error {
  explicit NoConvergence(const std::string& w) : Error(w) {}
};
struct StepUnderflow : Error {
  explicit StepUnderflow(const std::string& w) : Error(w) {}
};
struct ZeroInitialRatio : Error {
  explicit ZeroInitialRatio(const std::string& w) : Error(w) {}
};

}  // namespace soliton

#endif
