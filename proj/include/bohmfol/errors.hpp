#pragma once

#include <stdexcept>
#include <string>

namespace bohmfol {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define BOHMFOL_DEFINE_ERROR(Name, Base)                                       \
  class Name : public Base {                                                   \
  public:                                                                      \
    using Base::Base;                                                          \
  }

// spacetime
BOHMFOL_DEFINE_ERROR(BetaOutOfRange, Error);
BOHMFOL_DEFINE_ERROR(InvalidNormal, Error);
BOHMFOL_DEFINE_ERROR(DegenerateTriad, Error);
BOHMFOL_DEFINE_ERROR(NonTimelikeNormal, Error);

// fields
BOHMFOL_DEFINE_ERROR(InvalidModel, Error);
BOHMFOL_DEFINE_ERROR(DomainError, Error);
BOHMFOL_DEFINE_ERROR(BothZero, Error);
BOHMFOL_DEFINE_ERROR(ZeroAmplitude, Error);
BOHMFOL_DEFINE_ERROR(ModeError, Error);

// trajectories
BOHMFOL_DEFINE_ERROR(InvalidIntegratorConfig, Error);
BOHMFOL_DEFINE_ERROR(FieldBlowup, Error);

// ensemble
BOHMFOL_DEFINE_ERROR(EmptyEnsemble, Error);
BOHMFOL_DEFINE_ERROR(TrajectoryFailure, Error);
BOHMFOL_DEFINE_ERROR(NoArrivals, Error);
BOHMFOL_DEFINE_ERROR(TooFewSamples, Error);
BOHMFOL_DEFINE_ERROR(InvalidClassifier, Error);
BOHMFOL_DEFINE_ERROR(InsufficientSeparation, Error);
BOHMFOL_DEFINE_ERROR(EmptySample, Error);
BOHMFOL_DEFINE_ERROR(EmptyChannelPair, Error);

// protocol: everything below maps to the "protocol failure" exit status
BOHMFOL_DEFINE_ERROR(ProtocolError, Error);
BOHMFOL_DEFINE_ERROR(EmptyList, ProtocolError);
BOHMFOL_DEFINE_ERROR(InvalidGeometry, ProtocolError);
BOHMFOL_DEFINE_ERROR(SimultaneousAmbiguous, ProtocolError);
BOHMFOL_DEFINE_ERROR(NoBracket, ProtocolError);
BOHMFOL_DEFINE_ERROR(IndeterminateRun, ProtocolError);
BOHMFOL_DEFINE_ERROR(CannotEstablishOrder, ProtocolError);
BOHMFOL_DEFINE_ERROR(NotCalibrated, ProtocolError);

// configuration files and command-line values
BOHMFOL_DEFINE_ERROR(ConfigError, Error);

#undef BOHMFOL_DEFINE_ERROR

} // namespace bohmfol
