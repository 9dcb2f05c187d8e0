#ifndef TNC_ERRORS_HPP
#define TNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tnc {

/// A configured size limit (exhaustive search cap, oracle cap) was exceeded.
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tnc

#endif
