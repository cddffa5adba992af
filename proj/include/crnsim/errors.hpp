#ifndef CRNSIM_ERRORS_HPP
#define CRNSIM_ERRORS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace crnsim {

class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

class unsupported_parameters : public std::invalid_argument {
public:
    explicit unsupported_parameters(const std::string& what) : std::invalid_argument(what) {}
};

class evaluation_error : public std::runtime_error {
public:
    explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void check_finite(double value, const char* name) {
    if (!std::isfinite(value))
        throw std::domain_error(std::string(name) + " must be finite");
}

inline void check_positive(double value, const char* name) {
    check_finite(value, name);
    if (value <= 0.0)
        throw std::domain_error(std::string(name) + " must be positive");
}

inline void check_non_negative(double value, const char* name) {
    check_finite(value, name);
    if (value < 0.0)
        throw std::domain_error(std::string(name) + " must be non-negative");
}

inline void check_open_unit(double value, const char* name) {
    check_finite(value, name);
    if (value <= 0.0 || value >= 1.0)
        throw std::domain_error(std::string(name) + " must lie strictly between 0 and 1");
}

inline void check_fraction(double value, const char* name) {
    check_finite(value, name);
    if (value < 0.0 || value >= 1.0)
        throw std::domain_error(std::string(name) + " must lie in [0, 1)");
}

inline void check_at_least_one(int value, const char* name) {
    if (value < 1)
        throw std::domain_error(std::string(name) + " must be at least 1");
}

} // namespace detail
} // namespace crnsim

#endif
