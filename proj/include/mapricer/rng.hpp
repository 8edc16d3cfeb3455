#pragma once

#include <cmath>
#include <cstdint>

namespace mapricer {

// Philox4x32-10 counter-based generator.  Each (seed, stream, path) triple
// addresses an independent substream, so Monte Carlo results depend only on
// the seed and path index, never on the worker layout.
class PhiloxStream {
  public:
    PhiloxStream(std::uint64_t seed, std::uint64_t path_index, std::uint32_t stream_id = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)) {
        ctr_[0] = static_cast<std::uint32_t>(path_index);
        ctr_[1] = static_cast<std::uint32_t>(path_index >> 32);
        ctr_[2] = stream_id;
        ctr_[3] = 0;
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        const std::uint64_t bits = next_u64();
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t next_u64() {
        const auto block = next_block();
        return (static_cast<std::uint64_t>(block.hi) << 32) | block.lo;
    }

  private:
    struct U64Pair {
        std::uint32_t lo;
        std::uint32_t hi;
    };

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    U64Pair next_block() {
        if (have_pair_) {
            have_pair_ = false;
            return {out_[2], out_[3]};
        }
        std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = c0;
        out_[1] = c1;
        out_[2] = c2;
        out_[3] = c3;
        if (++ctr_[3] == 0) ++ctr_[2];
        have_pair_ = true;
        return {out_[0], out_[1]};
    }

    std::uint32_t key0_, key1_;
    std::uint32_t ctr_[4];
    std::uint32_t out_[4] = {0, 0, 0, 0};
    bool have_pair_ = false;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace mapricer
