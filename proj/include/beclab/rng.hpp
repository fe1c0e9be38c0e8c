#ifndef BECLAB_RNG_HPP
#define BECLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace beclab {

// Counter-based splittable generator (Philox4x32-10). Every draw is a pure
// function of (seed, trajectory, step, component, stream), so simulations are
// bit-reproducible under any scheduling and any ensemble size.
struct Philox4x32 {
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static inline void round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                             std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
    }

    // 10-round block: counter (c0..c3), key (k0,k1) -> 4 x u32
    static inline void block(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                             std::uint32_t c3, std::uint32_t k0, std::uint32_t k1,
                             std::uint32_t out[4]) {
        for (int r = 0; r < 10; ++r) {
            round(c0, c1, c2, c3, k0, k1);
            k0 += kWeylA;
            k1 += kWeylB;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
    }
};

// Independent logical streams per purpose.
enum class RngStream : std::uint32_t {
    noise = 0,       // Brownian increments
    initial = 1,     // initial-condition sampling
    testSweep = 2,   // randomized property sweeps
};

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : k0_(static_cast<std::uint32_t>(seed)),
                                              k1_(static_cast<std::uint32_t>(seed >> 32)) {}

    // two iid uniforms in (0,1] from one block
    void uniform2(std::uint64_t trajectory, std::uint64_t step, std::uint32_t component,
                  RngStream stream, double& u1, double& u2) const {
        std::uint32_t out[4];
        const std::uint32_t tag =
            (static_cast<std::uint32_t>(stream) << 24) ^ component;
        Philox4x32::block(static_cast<std::uint32_t>(trajectory),
                          static_cast<std::uint32_t>(trajectory >> 32),
                          static_cast<std::uint32_t>(step) ^ tag,
                          static_cast<std::uint32_t>(step >> 32) + (tag * 0x85EBCA6Bu), k0_, k1_,
                          out);
        const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        // (0,1]: never returns 0, so log() is safe
        u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
        u2 = (static_cast<double>(b >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(std::uint64_t trajectory, std::uint64_t step, std::uint32_t component,
                   RngStream stream) const {
        double u1, u2;
        uniform2(trajectory, step, component, stream, u1, u2);
        return u1;
    }

    // standard normal via Box-Muller (cosine branch)
    double normal(std::uint64_t trajectory, std::uint64_t step, std::uint32_t component,
                  RngStream stream) const {
        double u1, u2;
        uniform2(trajectory, step, component, stream, u1, u2);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t seed() const {
        return (static_cast<std::uint64_t>(k1_) << 32) | k0_;
    }

private:
    std::uint32_t k0_, k1_;
};

} // namespace beclab

#endif
