#include "edctr/energy.hpp"

#include <cmath>

#include "edctr/error.hpp"

namespace edctr {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Sensor: return "sensor";
    case NodeKind::Relay: return "relay";
    case NodeKind::BaseStation: return "base_station";
  }
  return "?";
}

double RadioParams::d0() const noexcept { return std::sqrt(eps_fs / eps_mp); }

void RadioParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("radio.") + name, "must be positive");
  };
  check(e_elec, "e_elec");
  check(eps_fs, "eps_fs");
  check(eps_mp, "eps_mp");
  check(e_da, "e_da");
}

void PacketSpec::validate() const {
  if (payload_bits == 0) throw ConfigError("packet.payload_bits", "must be a positive integer");
  if (control_bits == 0) throw ConfigError("packet.control_bits", "must be a positive integer");
}

double tx_energy(std::uint64_t bits, double distance, const RadioParams& rp) noexcept {
  const auto k = static_cast<double>(bits);
  const double d2 = distance * distance;
  if (distance < rp.d0()) return k * rp.e_elec + k * rp.eps_fs * d2;
  return k * rp.e_elec + k * rp.eps_mp * d2 * d2;
}

double rx_energy(std::uint64_t bits, const RadioParams& rp) noexcept {
  return static_cast<double>(bits) * rp.e_elec;
}

double aggregate_energy(std::uint64_t input_packets, std::uint64_t bits, const RadioParams& rp) noexcept {
  return static_cast<double>(input_packets) * static_cast<double>(bits) * rp.e_da;
}

double consume(Node& node, double amount) noexcept {
  if (node.is_base_station() || !node.alive || amount <= 0.0) return 0.0;
  if (amount >= node.energy) {
    const double taken = node.energy;
    node.energy = 0.0;
    node.alive = false;
    return taken;
  }
  node.energy -= amount;
  return amount;
}

}  // namespace edctr
