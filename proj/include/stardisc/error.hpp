#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stardisc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structural invariant was violated by caller-provided data
/// (non-bijective permutation, wrong base, dimension mismatch, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A file or text payload could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The exact evaluator refused a point set whose grid is larger than the
/// allowed number of cells.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(double estimated_cells, double budget)
        : Error("exact evaluation needs ~" + format_cells(estimated_cells) +
                " grid cells, budget is " + format_cells(budget)),
          estimated_cells_(estimated_cells), budget_(budget) {}

    double estimated_cells() const noexcept { return estimated_cells_; }
    double budget() const noexcept { return budget_; }

private:
    static std::string format_cells(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    double estimated_cells_;
    double budget_;
};

}  // namespace stardisc
