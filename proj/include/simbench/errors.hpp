#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simbench {

/// Base of every error raised by the bench model.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class VoltageOutOfRange : public Error {
 public:
  using Error::Error;
};

class NegativeBend : public Error {
 public:
  using Error::Error;
};

class ZeroWindow : public Error {
 public:
  using Error::Error;
};

class SetpointOutOfRange : public Error {
 public:
  using Error::Error;
};

class UnknownSignal : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PortInUse : public Error {
 public:
  using Error::Error;
};

/// A scenario or component error raised while stepping a run.
class RunError : public Error {
 public:
  using Error::Error;
};

// Wire protocol. what() is the reply token after "ERR ".
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UnknownCommand : public ProtocolError {
 public:
  UnknownCommand() : ProtocolError("unknown-command") {}
};

class BadArg : public ProtocolError {
 public:
  BadArg() : ProtocolError("bad-arg") {}
};

// Scenario files.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public ScenarioError {
 public:
  SyntaxError(std::size_t line, const std::string& what)
      : ScenarioError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsortedEvents : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

class MissingDuration : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

}  // namespace simbench
