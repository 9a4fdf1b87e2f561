#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ntklab {

// Seeded, splittable random stream label. The pair (seed, stream_id) fully
// determines the sample sequence; distinct stream_ids give independent
// streams, so components (data / init / sgd / test) can be re-run in
// isolation.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t id) const;
  RngStream substream(std::string_view name) const;

  // Fresh engine positioned at the start of this stream.
  std::mt19937_64 engine() const;
};

}  // namespace ntklab
