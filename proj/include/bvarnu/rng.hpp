#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bvarnu {

/// Deterministic random stream identified by (seed, stream_id).
///
/// The engine is mt19937_64 seeded through std::seed_seq, both of which
/// are fully specified by the standard, and every variate is produced by
/// code in this project rather than by <random> distributions, so draw
/// sequences are identical across platforms and standard libraries.
///
/// A stream is single-owner. Parallel work derives its own stream with
/// child() or by constructing one with a distinct stream_id.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Fresh stream with the same seed and a stream id mixed from this
  /// stream's id and `index`. Does not advance this stream.
  RngStream child(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();

  /// Gamma(shape, scale = 1); Marsaglia-Tsang rejection without squeeze.
  double gamma(double shape);

  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive hash of a sequence of integers, used to derive stream ids
/// for (cell, replication)-style keys.
std::uint64_t hash_stream(std::initializer_list<std::uint64_t> parts);

}  // namespace bvarnu
