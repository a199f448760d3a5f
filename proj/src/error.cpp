#include "opsteg/error.hpp"
#include "opsteg/types.hpp"

namespace opsteg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::UnbalancedObject: return "UnbalancedObject";
        case ErrorCode::ObjectStreamsPresent: return "ObjectStreamsPresent";
        case ErrorCode::EncryptedDocument: return "EncryptedDocument";
        case ErrorCode::UnsupportedFilter: return "UnsupportedFilter";
        case ErrorCode::CorruptStream: return "CorruptStream";
        case ErrorCode::UnknownObject: return "UnknownObject";
        case ErrorCode::NoOperands: return "NoOperands";
        case ErrorCode::SpanOutOfRange: return "SpanOutOfRange";
        case ErrorCode::ConfigMismatch: return "ConfigMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
        case ErrorCode::InsufficientCapacity: return "InsufficientCapacity";
        case ErrorCode::TruncatedMessage: return "TruncatedMessage";
        case ErrorCode::ImplausibleLength: return "ImplausibleLength";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string to_string(ObjectId id) {
    return std::to_string(id.number) + " " + std::to_string(id.generation) + " R";
}

}  // namespace opsteg
