#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symtwist {

enum class Errc {
  NotInvertible,
  NotAUnit,
  Supersingular,
  NotPrimitive,
  ParameterOutOfRange,
  BadReduction,
  AdditiveReduction,
  QuadratureNotConverged,
  PoleProximity,
  ConductorNotCoprime,
  EmptyCharacterSet,
  AdditiveAtP,
  NonWildCharacter,
  DivisionByNearZero,
  InvalidInput,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::Supersingular: return "Supersingular";
    case Errc::NotPrimitive: return "NotPrimitive";
    case Errc::ParameterOutOfRange: return "ParameterOutOfRange";
    case Errc::BadReduction: return "BadReduction";
    case Errc::AdditiveReduction: return "AdditiveReduction";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::PoleProximity: return "PoleProximity";
    case Errc::ConductorNotCoprime: return "ConductorNotCoprime";
    case Errc::EmptyCharacterSet: return "EmptyCharacterSet";
    case Errc::AdditiveAtP: return "AdditiveAtP";
    case Errc::NonWildCharacter: return "NonWildCharacter";
    case Errc::DivisionByNearZero: return "DivisionByNearZero";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace symtwist
