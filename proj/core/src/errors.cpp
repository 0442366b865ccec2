// SPDX-License-Identifier: Apache-2.0
#include "azpos/errors.hpp"

#include <cctype>

#include "azpos/bytes.hpp"

namespace azpos {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::truncated_frame: return "TruncatedFrame";
    case Errc::duplicate_element: return "DuplicateElement";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::trn_config_mismatch: return "TrnConfigMismatch";
    case Errc::not_power_of_two: return "NotPowerOfTwo";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::unknown_sta: return "UnknownSta";
    case Errc::empty_channel: return "EmptyChannel";
    case Errc::empty_group: return "EmptyGroup";
    case Errc::empty_pdp: return "EmptyPdp";
    case Errc::no_path: return "NoPath";
    case Errc::non_monotonic_timestamps: return "NonMonotonicTimestamps";
    case Errc::negative_rtt: return "NegativeRtt";
    case Errc::empty_burst: return "EmptyBurst";
    case Errc::bad_mac: return "BadMac";
    case Errc::param_mismatch: return "ParamMismatch";
    case Errc::integrity_failure: return "IntegrityFailure";
    case Errc::nonce_reuse: return "NonceReuse";
    case Errc::zero_length: return "ZeroLength";
    case Errc::ray_misses_wall: return "RayMissesWall";
    case Errc::path_too_short: return "PathTooShort";
    case Errc::empty_list: return "EmptyList";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
    case Errc::missing_scenario: return "MissingScenario";
  }
  return "UnknownError";
}

std::string to_hex(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  int hi = -1;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int v = nibble(c);
    if (v < 0) raise(Errc::io_error, "invalid hex digit");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<uint8_t>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0) raise(Errc::io_error, "odd hex digit count");
  return out;
}

}  // namespace azpos
