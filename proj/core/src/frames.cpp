// SPDX-License-Identifier: Apache-2.0
#include "azpos/frames.hpp"

#include <array>
#include <cmath>
#include <set>

#include "azpos/errors.hpp"

namespace azpos {

namespace {

constexpr uint8_t kTagLci = 1;
constexpr uint8_t kTagCmf = 2;
constexpr uint8_t kTagAwv = 3;
constexpr uint8_t kTagAngle = 4;
constexpr uint8_t kTagLos = 5;

constexpr uint32_t kMaxWireError = 0xFFFF;

bool finite(float v) { return std::isfinite(v); }

// Uniqueness key: the tag, except angle reports which are distinct per kind.
int element_kind_key(const MeasurementElement& el) {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LciReport>) return kTagLci;
        if constexpr (std::is_same_v<T, ChannelMeasurementFeedback>) return kTagCmf;
        if constexpr (std::is_same_v<T, AwvFeedback>) return kTagAwv;
        if constexpr (std::is_same_v<T, AngleReport>)
          return kTagAngle * 16 + static_cast<int>(e.kind);
        if constexpr (std::is_same_v<T, LosLikelihood>) return kTagLos;
      },
      el);
}

void validate_element(const MeasurementElement& el) {
  if (const auto* cmf = std::get_if<ChannelMeasurementFeedback>(&el)) {
    for (size_t i = 0; i < cmf->taps.size(); ++i) {
      const auto& tap = cmf->taps[i];
      if (!finite(tap.i) || !finite(tap.q) || !finite(tap.snr_db)) {
        raise(Errc::invariant_violation, "non-finite channel feedback tap");
      }
      if (i > 0 && cmf->taps[i].delay_sample_index <= cmf->taps[i - 1].delay_sample_index) {
        raise(Errc::invariant_violation, "feedback taps must be strictly increasing in delay");
      }
    }
  } else if (const auto* awv = std::get_if<AwvFeedback>(&el)) {
    if (!finite(awv->quality_score)) {
      raise(Errc::invariant_violation, "non-finite AWV quality");
    }
  } else if (const auto* angle = std::get_if<AngleReport>(&el)) {
    if (angle->kind != AngleKind::i2r_aod && angle->kind != AngleKind::r2i_aod) {
      raise(Errc::invariant_violation, "unknown angle report kind");
    }
    if (angle->azimuth_centideg <= -18000 || angle->azimuth_centideg > 18000 ||
        angle->elevation_centideg < -9000 || angle->elevation_centideg > 9000) {
      raise(Errc::invariant_violation, "angle out of range");
    }
  } else if (const auto* los = std::get_if<LosLikelihood>(&el)) {
    if (los->probability_milli > 1000) {
      raise(Errc::invariant_violation, "LOS likelihood above 1000 milli");
    }
  }
}

void encode_element(ByteWriter& w, const MeasurementElement& el) {
  ByteWriter body;
  uint8_t tag = 0;
  if (const auto* lci = std::get_if<LciReport>(&el)) {
    tag = kTagLci;
    body.i32(lci->latitude_microdeg);
    body.i32(lci->longitude_microdeg);
    body.i32(lci->altitude_cm);
  } else if (const auto* cmf = std::get_if<ChannelMeasurementFeedback>(&el)) {
    tag = kTagCmf;
    body.u16(static_cast<uint16_t>(cmf->taps.size()));
    for (const auto& tap : cmf->taps) {
      body.u16(tap.delay_sample_index);
      body.f32(tap.i);
      body.f32(tap.q);
      body.f32(tap.snr_db);
    }
  } else if (const auto* awv = std::get_if<AwvFeedback>(&el)) {
    tag = kTagAwv;
    body.i32(awv->awv_id);
    body.f32(awv->quality_score);
  } else if (const auto* angle = std::get_if<AngleReport>(&el)) {
    tag = kTagAngle;
    body.u8(static_cast<uint8_t>(angle->kind));
    body.i16(angle->azimuth_centideg);
    body.i16(angle->elevation_centideg);
  } else if (const auto* los = std::get_if<LosLikelihood>(&el)) {
    tag = kTagLos;
    body.u16(los->probability_milli);
  }
  w.u8(tag);
  w.u16(static_cast<uint16_t>(body.size()));
  w.raw(body.bytes());
}

MeasurementElement decode_element(uint8_t tag, ByteReader& r, size_t length) {
  switch (tag) {
    case kTagLci: {
      if (length != 12) raise(Errc::invariant_violation, "LCI element length");
      LciReport lci;
      lci.latitude_microdeg = r.i32();
      lci.longitude_microdeg = r.i32();
      lci.altitude_cm = r.i32();
      return lci;
    }
    case kTagCmf: {
      if (length < 2) raise(Errc::invariant_violation, "feedback element length");
      ChannelMeasurementFeedback cmf;
      uint16_t count = r.u16();
      if (length != 2u + 14u * count) {
        raise(Errc::invariant_violation, "feedback element length does not match tap count");
      }
      cmf.taps.reserve(count);
      for (uint16_t i = 0; i < count; ++i) {
        CmfTap tap;
        tap.delay_sample_index = r.u16();
        tap.i = r.f32();
        tap.q = r.f32();
        tap.snr_db = r.f32();
        cmf.taps.push_back(tap);
      }
      return cmf;
    }
    case kTagAwv: {
      if (length != 8) raise(Errc::invariant_violation, "AWV element length");
      AwvFeedback awv;
      awv.awv_id = r.i32();
      awv.quality_score = r.f32();
      return awv;
    }
    case kTagAngle: {
      if (length != 5) raise(Errc::invariant_violation, "angle element length");
      AngleReport angle;
      angle.kind = static_cast<AngleKind>(r.u8());
      angle.azimuth_centideg = r.i16();
      angle.elevation_centideg = r.i16();
      return angle;
    }
    case kTagLos: {
      if (length != 2) raise(Errc::invariant_violation, "LOS element length");
      LosLikelihood los;
      los.probability_milli = r.u16();
      return los;
    }
    default:
      raise(Errc::invariant_violation, "unreachable tag");
  }
}

}  // namespace

void validate_frame(const FtmFrame& frame) {
  if (frame.tod_error_ps > kMaxWireError || frame.toa_error_ps > kMaxWireError) {
    raise(Errc::invariant_violation, "timestamp error exceeds 16-bit wire field");
  }
  std::set<int> kinds;
  for (const auto& el : frame.elements) {
    validate_element(el);
    if (!kinds.insert(element_kind_key(el)).second) {
      raise(Errc::duplicate_element, "frame carries two elements of the same kind");
    }
  }
}

Bytes encode_ftm_frame(const FtmFrame& frame) {
  validate_frame(frame);
  ByteWriter w;
  w.u8(frame.dialog_token);
  w.u8(frame.follow_up_token);
  w.u64(frame.tod_ps);
  w.u64(frame.toa_ps);
  w.u16(static_cast<uint16_t>(frame.tod_error_ps));
  w.u16(static_cast<uint16_t>(frame.toa_error_ps));
  for (const auto& el : frame.elements) encode_element(w, el);
  return w.take();
}

DecodedFtmFrame decode_ftm_frame(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  DecodedFtmFrame out;
  FtmFrame& frame = out.frame;
  frame.dialog_token = r.u8();
  frame.follow_up_token = r.u8();
  frame.tod_ps = r.u64();
  frame.toa_ps = r.u64();
  frame.tod_error_ps = r.u16();
  frame.toa_error_ps = r.u16();

  std::set<int> kinds;
  while (!r.done()) {
    uint8_t tag = r.u8();
    uint16_t length = r.u16();
    if (r.remaining() < length) {
      raise(Errc::truncated_frame, "element body extends past the frame");
    }
    if (tag < kTagLci || tag > kTagLos) {
      r.skip(length);  // forward compatibility: unknown tags are skipped
      out.skipped_unknown_elements = true;
      continue;
    }
    MeasurementElement el = decode_element(tag, r, length);
    validate_element(el);
    if (!kinds.insert(element_kind_key(el)).second) {
      raise(Errc::duplicate_element, "frame carries two elements of the same kind");
    }
    frame.elements.push_back(std::move(el));
  }
  return out;
}

void validate_trn_config(const TrnConfig& config) {
  if (config.num_units == 0) raise(Errc::invariant_violation, "TRN needs at least one unit");
  if (config.m_subfields < 2) {
    raise(Errc::invariant_violation, "TRN units need at least two M subfields");
  }
  if (config.awv_group_size == 0 || config.awv_group_size > config.m_subfields ||
      config.m_subfields % config.awv_group_size != 0) {
    raise(Errc::invariant_violation, "AWV group size must divide the M subfield count");
  }
}

Bytes encode_ppdu(const EdmgPpdu& ppdu) {
  validate_trn_config(ppdu.trn_config);
  const size_t expected = static_cast<size_t>(ppdu.trn_config.total_subfields());
  if (ppdu.trn_subfield_sequences.size() != expected) {
    raise(Errc::trn_config_mismatch,
          "expected " + std::to_string(expected) + " subfield sequences, got " +
              std::to_string(ppdu.trn_subfield_sequences.size()));
  }
  ByteWriter w;
  w.u16(ppdu.trn_config.num_units);
  w.u8(ppdu.trn_config.p_subfields);
  w.u8(ppdu.trn_config.m_subfields);
  w.u8(ppdu.trn_config.awv_group_size);
  w.u32(static_cast<uint32_t>(ppdu.mac_body.size()));
  w.raw(ppdu.mac_body);
  w.u32(static_cast<uint32_t>(ppdu.trn_subfield_sequences.size()));
  for (const auto& id : ppdu.trn_subfield_sequences) {
    w.u8(static_cast<uint8_t>(id.kind));
    w.u32(id.value);
  }
  return w.take();
}

EdmgPpdu decode_ppdu(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  EdmgPpdu ppdu;
  ppdu.trn_config.num_units = r.u16();
  ppdu.trn_config.p_subfields = r.u8();
  ppdu.trn_config.m_subfields = r.u8();
  ppdu.trn_config.awv_group_size = r.u8();
  validate_trn_config(ppdu.trn_config);

  uint32_t body_len = r.u32();
  if (r.remaining() < body_len) raise(Errc::truncated_frame, "MAC body extends past the PPDU");
  ppdu.mac_body.resize(body_len);
  for (uint32_t i = 0; i < body_len; ++i) ppdu.mac_body[i] = r.u8();

  uint32_t count = r.u32();
  const size_t expected = static_cast<size_t>(ppdu.trn_config.total_subfields());
  if (count != expected) {
    raise(Errc::trn_config_mismatch, "expected " + std::to_string(expected) +
                                         " subfield sequences, got " + std::to_string(count));
  }
  ppdu.trn_subfield_sequences.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    TrnSequenceId id;
    uint8_t kind = r.u8();
    if (kind > 1) raise(Errc::invariant_violation, "unknown TRN sequence kind");
    id.kind = static_cast<TrnSequenceKind>(kind);
    id.value = r.u32();
    ppdu.trn_subfield_sequences.push_back(id);
  }
  if (!r.done()) raise(Errc::invariant_violation, "trailing bytes after PPDU");
  return ppdu;
}

}  // namespace azpos
