#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hawkes_ls {

/// Event times of one simulated path, per component, plus provenance.
struct EventLog {
  /// times[k] is strictly increasing, every entry in (0, horizon].
  std::vector<std::vector<double>> times;
  double horizon = 0.0;
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::string generator;  // "thinning" | "exp-fast"

  std::size_t dim() const noexcept { return times.size(); }
  std::size_t total() const noexcept;
  /// Number of events of component k in [0, t].
  std::size_t count_until(std::size_t k, double t) const;

  /// Throws InvalidLog when a time is out of (0, horizon], unsorted, or shared
  /// by two components.
  void check_invariants() const;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// CSV: '#'-prefixed provenance header (spec_hash, seed, generator, horizon, p),
/// then "component,time" rows in chronological order. Times print in shortest
/// round-trip form.
void write_csv(const EventLog& log, std::ostream& out);
EventLog read_csv(std::istream& in);

/// Binary layout, little-endian:
///   "HWKSLOG1" | u32 p | u64 spec_hash | u64 seed | f64 horizon |
///   u32 tag length | tag bytes | per component: u64 count, count x f64.
void write_binary(const EventLog& log, std::ostream& out);
EventLog read_binary(std::istream& in);

}  // namespace hawkes_ls
