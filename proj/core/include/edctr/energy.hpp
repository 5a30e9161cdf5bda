#pragma once

#include <cstdint>

#include "edctr/node.hpp"

namespace edctr {

/// First-order radio model parameters. The crossover distance d0 is derived
/// from the two amplifier constants.
struct RadioParams {
  double e_elec = 50e-9;      // J/bit
  double eps_fs = 10e-12;     // J/bit/m^2
  double eps_mp = 0.0013e-12; // J/bit/m^4
  double e_da = 5e-9;         // J/bit

  double d0() const noexcept;
  /// Throws ConfigError naming the first non-positive field.
  void validate() const;

  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

struct PacketSpec {
  std::uint32_t payload_bits = 2000;
  std::uint32_t control_bits = 200;

  void validate() const;
  friend bool operator==(const PacketSpec&, const PacketSpec&) = default;
};

/// Free-space (d^2) below d0, multipath (d^4) at and above it.
double tx_energy(std::uint64_t bits, double distance, const RadioParams& rp) noexcept;
double rx_energy(std::uint64_t bits, const RadioParams& rp) noexcept;
/// Cost of fusing `input_packets` packets into one outgoing packet.
double aggregate_energy(std::uint64_t input_packets, std::uint64_t bits, const RadioParams& rp) noexcept;

/// Debits `amount` from `node`, flooring at zero. A node reaching zero energy
/// is marked dead. Returns the energy actually removed; dead nodes and the
/// base station are untouched and return 0.
double consume(Node& node, double amount) noexcept;

}  // namespace edctr
