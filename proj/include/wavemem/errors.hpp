#ifndef WAVEMEM_ERRORS_HPP
#define WAVEMEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wavemem {

// Base class for all library failures.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A parameter lies outside its validity range (e.g. K integral exponent,
// Hurst index, fractional order).
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

// A scale has fewer coefficients than required.
class insufficient_data : public error {
public:
    insufficient_data(const std::string& what, long scale)
        : error(what), scale_(scale) {}
    long scale() const noexcept { return scale_; }

private:
    long scale_;
};

// log T(a) undefined because the sample variance at scale a is zero.
class zero_variance_error : public error {
public:
    zero_variance_error(const std::string& what, long scale)
        : error(what), scale_(scale) {}
    long scale() const noexcept { return scale_; }

private:
    long scale_;
};

class singular_design_error : public error {
public:
    explicit singular_design_error(const std::string& what) : error(what) {}
};

// An iterative numerical scheme hit its cap; carries the tolerance it reached.
class convergence_failure : public error {
public:
    convergence_failure(const std::string& what, double achieved)
        : error(what), achieved_(achieved) {}
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Circulant embedding produced a negative eigenvalue even after retries.
class embedding_failure : public error {
public:
    embedding_failure(const std::string& what, double min_eigenvalue)
        : error(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

} // namespace wavemem

#endif
