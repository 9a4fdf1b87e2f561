#include "ntklab/rng.hpp"

namespace ntklab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream RngStream::substream(std::uint64_t id) const {
  // Child stream id mixes the parent id so nested splits stay distinct.
  return RngStream{seed, splitmix64(stream_id ^ splitmix64(id))};
}

RngStream RngStream::substream(std::string_view name) const {
  return substream(fnv1a(name));
}

std::mt19937_64 RngStream::engine() const {
  std::seed_seq seq{splitmix64(seed), splitmix64(stream_id ^ 0xa5a5a5a5a5a5a5a5ULL),
                    splitmix64(seed ^ stream_id)};
  return std::mt19937_64(seq);
}

}  // namespace ntklab
