#include "magpauli/errors.hpp"

namespace magpauli {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySum: return "EmptySum";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::MaxSubdivisions: return "MaxSubdivisions";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::ZeroOfC: return "ZeroOfC";
    case ErrorCode::NotReal: return "NotReal";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::EmptyPositivePart: return "EmptyPositivePart";
    case ErrorCode::ZeroOfPsi: return "ZeroOfPsi";
    case ErrorCode::UnstableClass: return "UnstableClass";
    case ErrorCode::DegenerateCorner: return "DegenerateCorner";
    case ErrorCode::SelfCheckFailed: return "SelfCheckFailed";
    case ErrorCode::InvalidLattice: return "InvalidLattice";
    case ErrorCode::NotZIndependent: return "NotZIndependent";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::ZeroOnBoundary: return "ZeroOnBoundary";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace magpauli
