#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ghft {

using cd = std::complex<double>;

enum class Which { retarded, advanced };
enum class TimeDirection { future, past };
enum class ScalarKind { real, complex };

// Thrown for violated preconditions that a caller can recover from
// (bad support class, CFL violation, band too narrow, ...).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// xorshift64* generator; every random sampler in the toolkit draws from one of these.
class Xorshift64 {
public:
    explicit Xorshift64(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [lo, hi]
    long long integer(long long lo, long long hi) {
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

}  // namespace ghft
