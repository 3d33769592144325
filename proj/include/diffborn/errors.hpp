#pragma once

#include <stdexcept>
#include <string>

namespace diffborn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonCommensurate : Error {
    using Error::Error;
};
struct PoleContrast : Error {
    using Error::Error;
};
struct EmptyGrid : Error {
    using Error::Error;
};
struct SingularArguments : Error {
    using Error::Error;
};
struct NegativeArgument : Error {
    using Error::Error;
};
struct GeometryError : Error {
    using Error::Error;
};
struct NotSymmetric : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

} // namespace diffborn
