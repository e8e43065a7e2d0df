#include "finsler/errors.hpp"

namespace finsler {

namespace {

std::string syntax_message(std::size_t line, std::size_t column, const std::string& found,
                           const std::vector<std::string>& expected) {
    std::string msg = "SyntaxError at " + std::to_string(line) + ":" + std::to_string(column) +
                      ": unexpected " + found;
    if (!expected.empty()) {
        msg += "; expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) msg += (i + 1 == expected.size()) ? " or " : ", ";
            msg += expected[i];
        }
    }
    return msg;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string found,
                         std::vector<std::string> expected)
    : InputError(syntax_message(line, column, found, expected)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

UnknownSymbol::UnknownSymbol(std::size_t line, std::size_t column, const std::string& name)
    : InputError("UnknownSymbol at " + std::to_string(line) + ":" + std::to_string(column) +
                 ": '" + name + "'") {}

DimensionMismatch::DimensionMismatch(std::size_t line, std::size_t column, const std::string& what)
    : InputError("DimensionMismatch at " + std::to_string(line) + ":" + std::to_string(column) +
                 ": " + what) {}

}  // namespace finsler
