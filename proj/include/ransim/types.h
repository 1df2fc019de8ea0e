#ifndef RANSIM_TYPES_H
#define RANSIM_TYPES_H

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ransim {

// Simulation time is integer microseconds throughout. No floating-point time.
using Usec = std::int64_t;

constexpr Usec kUsecPerMs = 1000;
constexpr Usec kFrameDurationUs = 10 * kUsecPerMs; // 10 ms radio frame

enum class ErrorCode {
  // topology
  DuplicateId,
  DanglingReference,
  LimitExceeded,
  InvalidValue,
  UnsupportedNumerology,
  UnknownCell,
  // rbma
  IsdViolation,
  CarrierMismatch,
  OverlappingReservation,
  UnknownRbma,
  CyclicComposite,
  UnknownService,
  NotThreeColorable,
  // ran_sync
  UnreachableParticipant,
  SequenceMismatch,
  // bearer_switching
  InvalidRlcMode,
  EmptyUeSet,
  UndecidedUe,
  // rrc_mobility
  RomUeHasNoContext,
  PreconditionNotMet,
  UnknownUe,
  // sim_harness
  SchemaError,
  NoSuchLink,
  ColumnMismatch,
  NonMonotoneTime,
  InsufficientSamples,
  RuntimeInvariantViolation,
  IoFailure,
};

const char* to_string(ErrorCode code);

// Carries a machine-checkable code plus a human diagnostic. Input errors map
// to CLI exit code 2, RuntimeInvariantViolation to exit code 1.
class SimError : public std::runtime_error {
public:
  SimError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw SimError(code, message);
}

// FNV-1a, used for payload content hashes in emission logs and SFN
// alignment checks.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t len,
                           std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= kFnvPrime;
  }
  return h;
}

// splitmix64. Hand-rolled so that seeded runs are reproducible independent of
// standard-library distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound]. bound == 0 returns 0 without consuming state.
  std::uint64_t next_bounded(std::uint64_t bound) {
    if (bound == 0) {
      return 0;
    }
    return next() % (bound + 1);
  }

private:
  std::uint64_t state_;
};

} // namespace ransim

#endif // RANSIM_TYPES_H
