#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyplab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A point handed to a map lies outside its domain ball.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An orbit left the domain; `index` is the first point that is outside.
class EscapeError : public DomainError {
public:
    EscapeError(std::size_t index, const std::string& what)
        : DomainError(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A division by a product of distances that is zero or below the solvability floor.
class DegenerateProduct : public Error {
public:
    DegenerateProduct(double log_product, const std::string& what)
        : Error(what), log_product_(log_product) {}
    /// natural log of |product|; -inf for an exact zero
    double log_product() const noexcept { return log_product_; }

private:
    double log_product_;
};

class RecurrenceError : public DegenerateProduct {
public:
    using DegenerateProduct::DegenerateProduct;
};

class NearDiagonalError : public DegenerateProduct {
public:
    using DegenerateProduct::DegenerateProduct;
};

class CannotPerturbError : public DegenerateProduct {
public:
    using DegenerateProduct::DegenerateProduct;
};

}  // namespace hyplab
