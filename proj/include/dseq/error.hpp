#pragma once

#include <stdexcept>
#include <string>

namespace dseq {

// Root of every exception thrown by the library. `kind()` lets callers
// (the CLI in particular) map failures onto exit codes without RTTI chains.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    InvalidArgument,
    Capacity,
    BaseDividesPrime,
    Unsupported,
    MissingRecords,
    NoPrimes,
    TargetUnreachable,
    Io,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(Kind::InvalidArgument, what) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error(Kind::Capacity, what) {}
};

struct BaseDividesPrime : Error {
  BaseDividesPrime(unsigned base, unsigned long long p)
      : Error(Kind::BaseDividesPrime,
              "prime " + std::to_string(p) + " divides base " + std::to_string(base)) {}
};

struct Unsupported : Error {
  explicit Unsupported(const std::string& what) : Error(Kind::Unsupported, what) {}
};

struct MissingRecords : Error {
  MissingRecords() : Error(Kind::MissingRecords, "report has no per-prime records (scan with keep_records)") {}
};

struct NoPrimes : Error {
  explicit NoPrimes(const std::string& what) : Error(Kind::NoPrimes, what) {}
};

struct IoError : Error {
  IoError(const std::string& path, const std::string& what)
      : Error(Kind::Io, path + ": " + what) {}
};

}  // namespace dseq
