// errors.hpp
// Exception hierarchy shared by all qcollect modules. Every error carries a
// stable name so the CLI can report it in machine-readable output.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qcollect {

class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define QCOLLECT_ERROR(NAME)                                            \
    class NAME : public Error {                                        \
    public:                                                             \
        explicit NAME(const std::string& what) : Error(#NAME, what) {}  \
    };

QCOLLECT_ERROR(BadShape)
QCOLLECT_ERROR(HermiticityViolation)
QCOLLECT_ERROR(TraceViolation)
QCOLLECT_ERROR(BadSubset)
QCOLLECT_ERROR(NotBipartite)
QCOLLECT_ERROR(ShapeMismatch)
QCOLLECT_ERROR(NotUnitary)
QCOLLECT_ERROR(NegativeRadicand)
QCOLLECT_ERROR(XiOutOfRange)
QCOLLECT_ERROR(Unsupported)
QCOLLECT_ERROR(NoRoot)
QCOLLECT_ERROR(BadLambda)
QCOLLECT_ERROR(NotQubits)
QCOLLECT_ERROR(NotTwoQubits)
QCOLLECT_ERROR(AxesNotComplementary)
QCOLLECT_ERROR(BadParams)
QCOLLECT_ERROR(InsufficientCounts)
QCOLLECT_ERROR(ParseError)

#undef QCOLLECT_ERROR

// Carries the offending eigenvalue so callers can report how far the input
// is from positive semidefiniteness.
class NegativeEigenvalue : public Error {
public:
    explicit NegativeEigenvalue(double min_eig)
        : Error("NegativeEigenvalue",
                "matrix has eigenvalue " + std::to_string(min_eig) +
                    " below tolerance"),
          min_eig_(min_eig) {}

    double min_eig() const { return min_eig_; }

private:
    double min_eig_;
};

// Signals a conditional state with vanishing branch probability.
class DegenerateBranch : public Error {
public:
    explicit DegenerateBranch(double p)
        : Error("DegenerateBranch",
                "branch probability " + std::to_string(p) +
                    " too small to define a conditional state"),
          p_(p) {}

    double p() const { return p_; }

private:
    double p_;
};

}  // namespace qcollect
