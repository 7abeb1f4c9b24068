#pragma once

#include <stdexcept>
#include <string>

namespace beds {

// Base for every domain error raised by the library. Callers that only care
// about "something in the scheduling stack failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class InsufficientHours : public Error {
public:
    using Error::Error;
};

class SequenceError : public Error {
public:
    using Error::Error;
};

class NoFeasibleDay : public Error {
public:
    using Error::Error;
};

class DayNotFeasible : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class MalformedHeader : public Error {
public:
    MalformedHeader(std::string table, std::string column)
        : Error("malformed header in " + table + ": missing column '" + column + "'"),
          table_(std::move(table)), column_(std::move(column)) {}

    const std::string& table() const noexcept { return table_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::string table_;
    std::string column_;
};

class UnparseableTimestamp : public Error {
public:
    UnparseableTimestamp(std::string text, std::size_t row)
        : Error("unparseable timestamp '" + text + "' at row " + std::to_string(row)),
          text_(std::move(text)), row_(row) {}

    const std::string& text() const noexcept { return text_; }
    std::size_t row() const noexcept { return row_; }

private:
    std::string text_;
    std::size_t row_;
};

class NegativeLead : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    using Error::Error;
};

class ZeroMedian : public Error {
public:
    using Error::Error;
};

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

}  // namespace beds
