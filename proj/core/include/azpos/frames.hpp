// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "azpos/bytes.hpp"

namespace azpos {

// ---------------------------------------------------------------------------
// Measurement elements carried inside FTM Action frames
// ---------------------------------------------------------------------------

struct LciReport {
  int32_t latitude_microdeg = 0;
  int32_t longitude_microdeg = 0;
  int32_t altitude_cm = 0;

  friend bool operator==(const LciReport&, const LciReport&) = default;
};

struct CmfTap {
  uint16_t delay_sample_index = 0;
  float i = 0.0f;
  float q = 0.0f;
  float snr_db = 0.0f;

  // Bitwise float comparison keeps codec bijectivity exact.
  friend bool operator==(const CmfTap& a, const CmfTap& b) {
    return a.delay_sample_index == b.delay_sample_index &&
           std::bit_cast<uint32_t>(a.i) == std::bit_cast<uint32_t>(b.i) &&
           std::bit_cast<uint32_t>(a.q) == std::bit_cast<uint32_t>(b.q) &&
           std::bit_cast<uint32_t>(a.snr_db) == std::bit_cast<uint32_t>(b.snr_db);
  }
};

struct ChannelMeasurementFeedback {
  std::vector<CmfTap> taps;  // strictly increasing delay indices

  friend bool operator==(const ChannelMeasurementFeedback&,
                         const ChannelMeasurementFeedback&) = default;
};

struct AwvFeedback {
  int32_t awv_id = 0;
  float quality_score = 0.0f;

  friend bool operator==(const AwvFeedback& a, const AwvFeedback& b) {
    return a.awv_id == b.awv_id &&
           std::bit_cast<uint32_t>(a.quality_score) == std::bit_cast<uint32_t>(b.quality_score);
  }
};

enum class AngleKind : uint8_t { i2r_aod = 0, r2i_aod = 1 };

struct AngleReport {
  AngleKind kind = AngleKind::i2r_aod;
  int16_t azimuth_centideg = 0;    // (-18000, 18000]
  int16_t elevation_centideg = 0;  // [-9000, 9000]

  friend bool operator==(const AngleReport&, const AngleReport&) = default;
};

struct LosLikelihood {
  uint16_t probability_milli = 0;  // 0..1000

  friend bool operator==(const LosLikelihood&, const LosLikelihood&) = default;
};

using MeasurementElement = std::variant<LciReport, ChannelMeasurementFeedback, AwvFeedback,
                                        AngleReport, LosLikelihood>;

// ---------------------------------------------------------------------------
// FTM Action frame
// ---------------------------------------------------------------------------

struct FtmFrame {
  uint8_t dialog_token = 0;
  uint8_t follow_up_token = 0;
  uint64_t tod_ps = 0;
  uint64_t toa_ps = 0;
  uint32_t tod_error_ps = 0;  // carried as 16 bits on the wire
  uint32_t toa_error_ps = 0;
  std::vector<MeasurementElement> elements;

  friend bool operator==(const FtmFrame&, const FtmFrame&) = default;
};

// Throws invariant_violation when a frame breaks its type invariants
// (duplicate element kinds, unsorted feedback taps, out-of-range values).
void validate_frame(const FtmFrame& frame);

// Fixed 22-byte header (token, follow-up, tod, toa, tod error, toa error;
// little-endian) followed by TLV elements with a 1-byte tag and 2-byte length.
Bytes encode_ftm_frame(const FtmFrame& frame);

struct DecodedFtmFrame {
  FtmFrame frame;
  bool skipped_unknown_elements = false;
};

DecodedFtmFrame decode_ftm_frame(std::span<const uint8_t> bytes);

// ---------------------------------------------------------------------------
// EDMG PPDU container
// ---------------------------------------------------------------------------

struct TrnConfig {
  uint16_t num_units = 1;      // L+1
  uint8_t p_subfields = 0;     // P
  uint8_t m_subfields = 2;     // M >= 2
  uint8_t awv_group_size = 2;  // divides M

  int subfields_per_unit() const { return p_subfields + m_subfields; }
  int total_subfields() const { return num_units * subfields_per_unit(); }

  friend bool operator==(const TrnConfig&, const TrnConfig&) = default;
};

void validate_trn_config(const TrnConfig& config);

enum class TrnSequenceKind : uint8_t { golay = 0, secure = 1 };

struct TrnSequenceId {
  TrnSequenceKind kind = TrnSequenceKind::golay;
  uint32_t value = 0;  // golay: sequence length N; secure: key-stream block index

  friend bool operator==(const TrnSequenceId&, const TrnSequenceId&) = default;
};

struct EdmgPpdu {
  TrnConfig trn_config;
  Bytes mac_body;  // an encoded FTM frame or other Action frame
  std::vector<TrnSequenceId> trn_subfield_sequences;

  friend bool operator==(const EdmgPpdu&, const EdmgPpdu&) = default;
};

Bytes encode_ppdu(const EdmgPpdu& ppdu);
EdmgPpdu decode_ppdu(std::span<const uint8_t> bytes);

}  // namespace azpos
