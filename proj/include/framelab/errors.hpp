#pragma once

#include <stdexcept>
#include <string>

namespace framelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FRAMELAB_ERROR(Name)                                              \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

/// Frame requested at the spatial origin.
FRAMELAB_ERROR(PoleDegenerate);
/// Representation formula that divides by t evaluated at t = 0.
FRAMELAB_ERROR(TimeZero);
FRAMELAB_ERROR(RankMismatch);
FRAMELAB_ERROR(DomainMismatch);
/// Weight derivative requested exactly at the kink q = 0.
FRAMELAB_ERROR(KinkPoint);
/// Derivative taken on a grid field whose ghost layers are stale.
FRAMELAB_ERROR(GhostInvalid);
FRAMELAB_ERROR(EmptyRegion);
FRAMELAB_ERROR(EmptyCone);
FRAMELAB_ERROR(HistoryMissing);
FRAMELAB_ERROR(NotProportional);
FRAMELAB_ERROR(FrameMismatch);
FRAMELAB_ERROR(CFLViolation);
FRAMELAB_ERROR(ParseError);
FRAMELAB_ERROR(SchemaError);
FRAMELAB_ERROR(ConstraintError);
FRAMELAB_ERROR(IoError);

#undef FRAMELAB_ERROR

} // namespace framelab
