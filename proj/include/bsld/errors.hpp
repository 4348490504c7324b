#ifndef BSLD_ERRORS_HPP
#define BSLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsld {

// Base for all invariant violations surfaced by the library. The name of the
// concrete class is part of the reporting contract (CLI exit code 3 prints it).
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

#define BSLD_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
  public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

BSLD_DEFINE_ERROR(DegenerateGeodesic);
BSLD_DEFINE_ERROR(PairingMismatch);
BSLD_DEFINE_ERROR(OddCorner);
BSLD_DEFINE_ERROR(CycleNotClosing);
BSLD_DEFINE_ERROR(CarrierOrderViolation);
BSLD_DEFINE_ERROR(NotMarkov);
BSLD_DEFINE_ERROR(SlowContraction);
BSLD_DEFINE_ERROR(Overflow);
BSLD_DEFINE_ERROR(EmptyBase);
BSLD_DEFINE_ERROR(NoExitSide);
BSLD_DEFINE_ERROR(NotEnteringDomain);
BSLD_DEFINE_ERROR(RejectionStall);
BSLD_DEFINE_ERROR(WindowTooLong);
BSLD_DEFINE_ERROR(AlphaOutOfRange);
BSLD_DEFINE_ERROR(PowerIterationStall);
BSLD_DEFINE_ERROR(ZeroHits);
BSLD_DEFINE_ERROR(CalibrationFailed);
BSLD_DEFINE_ERROR(BadDomainFile);
BSLD_DEFINE_ERROR(BadConfig);

#undef BSLD_DEFINE_ERROR

}  // namespace bsld

#endif
