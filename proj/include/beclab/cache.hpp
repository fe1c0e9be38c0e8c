#ifndef BECLAB_CACHE_HPP
#define BECLAB_CACHE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beclab/grid.hpp"

namespace beclab {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(const void* data, std::size_t len);
Sha256Digest sha256(const std::string& s);
std::string hex_digest(const Sha256Digest& d);

std::uint32_t crc32(const void* data, std::size_t len);

// Cache key: everything the ground state depends on.
struct CacheKey {
    int d = 1;
    int N = 1;
    int n = 0;
    double L = 0.0;
    double beta = 0.0;
    Sha256Digest potentialHash{};  // hash of potential descriptors + solver params

    std::string fileName() const;  // content-addressed: hex of the key hash
};

Sha256Digest potential_hash(const std::string& trapDescriptor, const std::string& pairDescriptor,
                            const std::string& solverDescriptor);

// BECG v1 layout: magic "BECG", version u32 LE, d u32, N u32, n u32, L f64,
// beta f64, potential hash (32 bytes), payload of n^(dN) f64 LE, CRC-32 of the
// payload bytes.
inline constexpr std::uint32_t kCacheFormatVersion = 1;

class GroundStateCache {
public:
    // directory resolution order: explicit flag, BECLAB_CACHE env var, disabled
    static GroundStateCache resolve(const std::string& flagDir, bool disabled);
    static GroundStateCache disabled();
    explicit GroundStateCache(std::string dir);

    bool enabled() const { return enabled_; }
    const std::string& directory() const { return dir_; }

    void store(const CacheKey& key, const GridFunction& f) const;
    // nullopt on miss; CacheError on version mismatch; corrupt entries are
    // deleted and reported as CacheError so callers recompute
    std::optional<GridFunction> load(const CacheKey& key) const;

private:
    GroundStateCache() = default;
    std::string dir_;
    bool enabled_ = false;
};

// Serialization used by both the cache and its tests.
std::vector<std::uint8_t> encode_becg(const CacheKey& key, const GridFunction& f);
GridFunction decode_becg(const std::vector<std::uint8_t>& bytes, const CacheKey& expect);

} // namespace beclab

#endif
