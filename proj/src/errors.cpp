#include "latcov/errors.hpp"

namespace latcov {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotLatticePoint: return "NotLatticePoint";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::NotPrimitive: return "NotPrimitive";
        case ErrorCode::MinimaTooLarge: return "MinimaTooLarge";
        case ErrorCode::BoxTooSmall: return "BoxTooSmall";
        case ErrorCode::RecursionGuard: return "RecursionGuard";
        case ErrorCode::TooManyPoints: return "TooManyPoints";
        case ErrorCode::TooManyFlats: return "TooManyFlats";
        case ErrorCode::RetriesExhausted: return "RetriesExhausted";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorCode::NoValidPrime: return "NoValidPrime";
        case ErrorCode::LiftNotFound: return "LiftNotFound";
        case ErrorCode::BodyNotBall: return "BodyNotBall";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ScaleTooSmall: return "ScaleTooSmall";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Verification: return "Verification";
    }
    return "Unknown";
}

int error_exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::Verification:
        case ErrorCode::LiftNotFound:
            return 2;
        case ErrorCode::Parse:
        case ErrorCode::ParamOutOfRange:
        case ErrorCode::Singular:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::BodyNotBall:
        case ErrorCode::NotLatticePoint:
        case ErrorCode::ZeroVector:
        case ErrorCode::NotPrimitive:
        case ErrorCode::DegenerateSeries:
            return 4;
        default:
            return 3;
    }
}

}  // namespace latcov
