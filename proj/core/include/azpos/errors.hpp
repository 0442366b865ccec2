// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace azpos {

enum class Errc {
  // frames
  truncated_frame,
  duplicate_element,
  invariant_violation,
  trn_config_mismatch,
  // golay
  not_power_of_two,
  length_mismatch,
  // channel
  unknown_sta,
  empty_channel,
  // beam training
  empty_group,
  empty_pdp,
  // session
  no_path,
  non_monotonic_timestamps,
  negative_rtt,
  empty_burst,
  // secure
  bad_mac,
  param_mismatch,
  integrity_failure,
  nonce_reuse,
  zero_length,
  // solver
  ray_misses_wall,
  path_too_short,
  empty_list,
  // harness
  config_error,
  io_error,
  missing_scenario,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace azpos
