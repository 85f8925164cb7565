#ifndef HEISLAB_ERROR_HPP
#define HEISLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace heislab
{

/// Rejected input: bad dimensions, out-of-range parameters, malformed specs.
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its stated tolerance.
class NumericError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace heislab

#endif
