#pragma once

#include <stdexcept>

namespace emc {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// geometry
class DegenerateMatrix : public Error { public: using Error::Error; };
class DegenerateBaseline : public Error { public: using Error::Error; };
class LineAtInfinity : public Error { public: using Error::Error; };

// radon
class InvalidGrid : public Error { public: using Error::Error; };

// shared size checks
class LengthMismatch : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };

// motion model
class OutOfDomain : public Error { public: using Error::Error; };
class NonMonotonicNodes : public Error { public: using Error::Error; };

// simulation / reconstruction
class UnknownPreset : public Error { public: using Error::Error; };
class InvalidGeometry : public Error { public: using Error::Error; };
class GridOutsideFov : public Error { public: using Error::Error; };

/// Bad user input: malformed config, missing dataset files, unknown options.
/// The command line tool maps this to exit code 1.
class ValidationError : public Error { public: using Error::Error; };

} // namespace emc
