#pragma once

#include <stdexcept>
#include <string>

namespace sgsacc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input file could not be opened or read.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed record in a schema, instance, generations or config file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Two records claim the same identity (service name, instance id).
class ConflictError : public Error {
 public:
  using Error::Error;
};

// A dialogue action refers to a service or slot the catalog does not know.
class ResolutionError : public Error {
 public:
  ResolutionError(std::string instance_id, const std::string& what)
      : Error(instance_id.empty() ? what : "instance '" + instance_id + "': " + what),
        instance_id_(std::move(instance_id)) {}

  const std::string& instance_id() const noexcept { return instance_id_; }

 private:
  std::string instance_id_;
};

// A slot value outside the domain its schema allows.
class ValueDomainError : public Error {
 public:
  using Error::Error;
};

// The NLI backend could not be reached after all retries.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts, int last_status)
      : Error(what), attempts_(attempts), last_status_(last_status) {}

  int attempts() const noexcept { return attempts_; }
  // HTTP status of the last response, or 0 when no response arrived.
  int last_status() const noexcept { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

// The NLI backend answered, but not with a valid verdict list.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgsacc
