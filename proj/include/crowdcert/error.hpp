#pragma once

#include <stdexcept>
#include <string>

namespace crowdcert {

// Every contract violation in the library throws Error with one of these codes.
enum class Errc {
    DuplicatePair,
    LabelOutOfRange,
    EmptyDataset,
    MissingGold,
    InvalidRange,
    EvenH,
    DegenerateThreshold,
    TooManyAnnotators,
    UnannotatedTask,
    ZeroLikelihood,
    MissingClassAnchors,
    SingularMatrix,
    AdversarialNoise,
    PreconditionViolated,
    BoundUndefined,
    RhoMismatch,
    GroupTooLarge,
    InvalidSplit,
    SigmaTooLarge,
    UnsupportedClassCount,
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::DuplicatePair:         return "DuplicatePair";
    case Errc::LabelOutOfRange:       return "LabelOutOfRange";
    case Errc::EmptyDataset:          return "EmptyDataset";
    case Errc::MissingGold:           return "MissingGold";
    case Errc::InvalidRange:          return "InvalidRange";
    case Errc::EvenH:                 return "EvenH";
    case Errc::DegenerateThreshold:   return "DegenerateThreshold";
    case Errc::TooManyAnnotators:     return "TooManyAnnotators";
    case Errc::UnannotatedTask:       return "UnannotatedTask";
    case Errc::ZeroLikelihood:        return "ZeroLikelihood";
    case Errc::MissingClassAnchors:   return "MissingClassAnchors";
    case Errc::SingularMatrix:        return "SingularMatrix";
    case Errc::AdversarialNoise:      return "AdversarialNoise";
    case Errc::PreconditionViolated:  return "PreconditionViolated";
    case Errc::BoundUndefined:        return "BoundUndefined";
    case Errc::RhoMismatch:           return "RhoMismatch";
    case Errc::GroupTooLarge:         return "GroupTooLarge";
    case Errc::InvalidSplit:          return "InvalidSplit";
    case Errc::SigmaTooLarge:         return "SigmaTooLarge";
    case Errc::UnsupportedClassCount: return "UnsupportedClassCount";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace crowdcert
