#include "beclab/cache.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "beclab/errors.hpp"

namespace beclab {

namespace {

// ---- SHA-256 ----------------------------------------------------------

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int s) { return (x >> s) | (x << (32 - s)); }

struct Sha256State {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

    void compress(const std::uint8_t* p) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + kSha256K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }
};

// ---- CRC-32 (IEEE) ----------------------------------------------------

struct Crc32Table {
    std::uint32_t t[256];
    Crc32Table() {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
    }
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

double get_f64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

} // namespace

Sha256Digest sha256(const void* data, std::size_t len) {
    Sha256State st;
    const std::uint8_t* p = static_cast<const std::uint8_t*>(data);
    std::size_t full = len / 64;
    for (std::size_t i = 0; i < full; ++i) st.compress(p + 64 * i);

    std::uint8_t tail[128] = {0};
    const std::size_t rem = len - 64 * full;
    std::memcpy(tail, p + 64 * full, rem);
    tail[rem] = 0x80;
    const std::size_t tailLen = (rem + 9 <= 64) ? 64 : 128;
    const std::uint64_t bits = static_cast<std::uint64_t>(len) * 8;
    for (int i = 0; i < 8; ++i)
        tail[tailLen - 1 - i] = static_cast<std::uint8_t>(bits >> (8 * i));
    st.compress(tail);
    if (tailLen == 128) st.compress(tail + 64);

    Sha256Digest out;
    for (int i = 0; i < 8; ++i) {
        out[4 * i] = static_cast<std::uint8_t>(st.h[i] >> 24);
        out[4 * i + 1] = static_cast<std::uint8_t>(st.h[i] >> 16);
        out[4 * i + 2] = static_cast<std::uint8_t>(st.h[i] >> 8);
        out[4 * i + 3] = static_cast<std::uint8_t>(st.h[i]);
    }
    return out;
}

Sha256Digest sha256(const std::string& s) { return sha256(s.data(), s.size()); }

std::string hex_digest(const Sha256Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (std::uint8_t b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xF]);
    }
    return s;
}

std::uint32_t crc32(const void* data, std::size_t len) {
    static const Crc32Table table;
    const std::uint8_t* p = static_cast<const std::uint8_t*>(data);
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table.t[(c ^ p[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

Sha256Digest potential_hash(const std::string& trapDescriptor, const std::string& pairDescriptor,
                            const std::string& solverDescriptor) {
    return sha256(trapDescriptor + "|" + pairDescriptor + "|" + solverDescriptor);
}

std::string CacheKey::fileName() const {
    std::vector<std::uint8_t> buf;
    put_u32(buf, static_cast<std::uint32_t>(d));
    put_u32(buf, static_cast<std::uint32_t>(N));
    put_u32(buf, static_cast<std::uint32_t>(n));
    put_f64(buf, L);
    put_f64(buf, beta);
    buf.insert(buf.end(), potentialHash.begin(), potentialHash.end());
    return hex_digest(sha256(buf.data(), buf.size())) + ".becg";
}

std::vector<std::uint8_t> encode_becg(const CacheKey& key, const GridFunction& f) {
    std::vector<std::uint8_t> out;
    out.reserve(60 + f.size() * 8);
    out.push_back('B'); out.push_back('E'); out.push_back('C'); out.push_back('G');
    put_u32(out, kCacheFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(key.d));
    put_u32(out, static_cast<std::uint32_t>(key.N));
    put_u32(out, static_cast<std::uint32_t>(key.n));
    put_f64(out, key.L);
    put_f64(out, key.beta);
    out.insert(out.end(), key.potentialHash.begin(), key.potentialHash.end());
    const std::size_t payloadStart = out.size();
    for (std::size_t i = 0; i < f.size(); ++i) put_f64(out, f[i]);
    const std::uint32_t crc = crc32(out.data() + payloadStart, out.size() - payloadStart);
    put_u32(out, crc);
    return out;
}

GridFunction decode_becg(const std::vector<std::uint8_t>& bytes, const CacheKey& expect) {
    const std::size_t headerLen = 4 + 4 + 4 + 4 + 4 + 8 + 8 + 32;
    if (bytes.size() < headerLen + 4) throw CacheError("cache entry truncated");
    if (std::memcmp(bytes.data(), "BECG", 4) != 0) throw CacheError("cache entry: bad magic");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kCacheFormatVersion)
        throw CacheError("cache entry: incompatible version " + std::to_string(version));
    const int d = static_cast<int>(get_u32(bytes.data() + 8));
    const int N = static_cast<int>(get_u32(bytes.data() + 12));
    const int n = static_cast<int>(get_u32(bytes.data() + 16));
    const double L = get_f64(bytes.data() + 20);
    const double beta = get_f64(bytes.data() + 28);
    if (d != expect.d || N != expect.N || n != expect.n || L != expect.L || beta != expect.beta)
        throw CacheError("cache entry: metadata does not match the key");
    if (std::memcmp(bytes.data() + 36, expect.potentialHash.data(), 32) != 0)
        throw CacheError("cache entry: potential hash mismatch");

    std::size_t count = 1;
    for (int a = 0; a < d * N; ++a) count *= static_cast<std::size_t>(n);
    if (bytes.size() != headerLen + count * 8 + 4) throw CacheError("cache entry truncated");
    const std::uint32_t stored = get_u32(bytes.data() + bytes.size() - 4);
    const std::uint32_t computed = crc32(bytes.data() + headerLen, count * 8);
    if (stored != computed) throw CacheError("cache entry: CRC mismatch");

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_f64(bytes.data() + headerLen + 8 * i);
    Grid g(d, L, n);
    GridFunction f(g, N, std::move(values));
    return f;
}

GroundStateCache GroundStateCache::disabled() { return GroundStateCache(); }

GroundStateCache::GroundStateCache(std::string dir) : dir_(std::move(dir)), enabled_(true) {
    std::filesystem::create_directories(dir_);
}

GroundStateCache GroundStateCache::resolve(const std::string& flagDir, bool disabledFlag) {
    if (disabledFlag) return disabled();
    if (!flagDir.empty()) return GroundStateCache(flagDir);
    if (const char* env = std::getenv("BECLAB_CACHE"); env && *env)
        return GroundStateCache(env);
    return disabled();
}

void GroundStateCache::store(const CacheKey& key, const GridFunction& f) const {
    if (!enabled_) return;
    const auto bytes = encode_becg(key, f);
    const std::filesystem::path final = std::filesystem::path(dir_) / key.fileName();
    // unique staging name so concurrent writers of the same key never
    // interleave; the rename is atomic and last-writer-wins with equal bytes
    static std::atomic<unsigned> stamp{0};
    const std::filesystem::path tmp =
        final.string() + ".tmp" + std::to_string(::getpid()) + "." +
        std::to_string(stamp.fetch_add(1));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw CacheError("cache: cannot write " + tmp.string());
        os.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, final);
}

std::optional<GridFunction> GroundStateCache::load(const CacheKey& key) const {
    if (!enabled_) return std::nullopt;
    const std::filesystem::path path = std::filesystem::path(dir_) / key.fileName();
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_becg(bytes, key);
    } catch (const CacheError&) {
        is.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);  // corrupt entry: drop and recompute
        throw;
    }
}

} // namespace beclab
