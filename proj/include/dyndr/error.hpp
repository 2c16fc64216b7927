#pragma once

#include <stdexcept>
#include <string>

namespace dyndr {

// Errors carry a category so the command-line front end can map them onto
// exit codes (1 usage/config, 2 data, 3 numerical).
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
	ErrorKind kind() const noexcept { return kind_; }

private:
	ErrorKind kind_;
};

class ConfigError : public Error {
public:
	explicit ConfigError(const std::string &what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
public:
	explicit DataError(const std::string &what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
public:
	NumericalError(const std::string &what, long step) : Error(ErrorKind::numerical, what), step_(step) {}
	long step() const noexcept { return step_; }

private:
	long step_;
};

} // namespace dyndr
