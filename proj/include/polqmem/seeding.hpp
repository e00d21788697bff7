#pragma once

#include <cstdint>

namespace polqmem {

// Cheap bit mixer used to derive independent seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of logical stream `stream` under `master`. Streams are stable:
// results do not depend on the order streams are consumed in.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x7f4a7c15ULL));
}

}  // namespace polqmem
