// SPDX-License-Identifier: Apache-2.0
#include "azpos/secure.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"

namespace azpos::secure {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) raise(Errc::integrity_failure, "libsodium initialization failed");
}

Bytes concat(std::initializer_list<std::span<const uint8_t>> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::span<const uint8_t> as_span(const std::string& s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

}  // namespace

Bytes sha256(std::span<const uint8_t> data) {
  ensure_sodium();
  Bytes out(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Bytes hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data) {
  ensure_sodium();
  crypto_auth_hmacsha256_state state;
  crypto_auth_hmacsha256_init(&state, key.data(), key.size());
  crypto_auth_hmacsha256_update(&state, data.data(), data.size());
  Bytes out(crypto_auth_hmacsha256_BYTES);
  crypto_auth_hmacsha256_final(&state, out.data());
  return out;
}

Bytes hkdf_extract(std::span<const uint8_t> salt, std::span<const uint8_t> ikm) {
  if (salt.empty()) {
    static const Bytes zero_salt(32, 0);
    return hmac_sha256(zero_salt, ikm);
  }
  return hmac_sha256(salt, ikm);
}

Bytes hkdf_expand(std::span<const uint8_t> prk, std::span<const uint8_t> info, size_t out_len) {
  if (out_len == 0) raise(Errc::zero_length, "HKDF output length");
  if (out_len > 255 * 32) raise(Errc::invariant_violation, "HKDF output too long");
  Bytes okm;
  Bytes t;
  uint8_t counter = 1;
  while (okm.size() < out_len) {
    Bytes block = t;
    block.insert(block.end(), info.begin(), info.end());
    block.push_back(counter++);
    t = hmac_sha256(prk, block);
    okm.insert(okm.end(), t.begin(), t.end());
  }
  okm.resize(out_len);
  return okm;
}

KeyPair generate_keypair(uint64_t seed) {
  ensure_sodium();
  KeyPair kp;
  SplitMix64 rng(seed);
  for (size_t i = 0; i < kp.secret.size(); i += 8) {
    uint64_t v = rng.next_u64();
    for (size_t b = 0; b < 8; ++b) kp.secret[i + b] = static_cast<uint8_t>(v >> (8 * b));
  }
  crypto_scalarmult_base(kp.pub.data(), kp.secret.data());
  return kp;
}

std::array<uint8_t, 32> shared_secret(const KeyPair& own, std::span<const uint8_t> peer_pub) {
  ensure_sodium();
  std::array<uint8_t, 32> out{};
  if (crypto_scalarmult(out.data(), own.secret.data(), peer_pub.data()) != 0) {
    raise(Errc::bad_mac, "key agreement failed");
  }
  return out;
}

// ---------------------------------------------------------------------------
// PASN
// ---------------------------------------------------------------------------

namespace {

Bytes encode_pasn_params(const PasnParams& p) {
  ByteWriter w;
  w.u8(p.group_id);
  w.u16(static_cast<uint16_t>(std::lround(p.bandwidth_ghz * 100.0)));
  w.u8(p.protected_ftm ? 1 : 0);
  return w.take();
}

PasnParams decode_pasn_params(ByteReader& r) {
  PasnParams p;
  p.group_id = r.u8();
  p.bandwidth_ghz = r.u16() / 100.0;
  p.protected_ftm = r.u8() != 0;
  return p;
}

std::array<uint8_t, 12> counter_nonce(uint64_t value) {
  std::array<uint8_t, 12> nonce{};
  for (int i = 0; i < 8; ++i) nonce[i] = static_cast<uint8_t>(value >> (8 * i));
  return nonce;
}

}  // namespace

Bytes aead_seal(std::span<const uint8_t> key32, std::span<const uint8_t> nonce12,
                std::span<const uint8_t> plaintext, std::span<const uint8_t> aad) {
  ensure_sodium();
  Bytes ct(plaintext.size() + crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long ct_len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(ct.data(), &ct_len, plaintext.data(),
                                            plaintext.size(), aad.data(), aad.size(), nullptr,
                                            nonce12.data(), key32.data());
  ct.resize(ct_len);
  return ct;
}

bool aead_open(std::span<const uint8_t> key32, std::span<const uint8_t> nonce12,
               std::span<const uint8_t> ciphertext, std::span<const uint8_t> aad,
               Bytes& plaintext) {
  ensure_sodium();
  if (ciphertext.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) return false;
  plaintext.resize(ciphertext.size() - crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long pt_len = 0;
  int rc = crypto_aead_chacha20poly1305_ietf_decrypt(plaintext.data(), &pt_len, nullptr,
                                                     ciphertext.data(), ciphertext.size(),
                                                     aad.data(), aad.size(), nonce12.data(),
                                                     key32.data());
  if (rc != 0) return false;
  plaintext.resize(pt_len);
  return true;
}

PasnResult pasn_handshake(uint64_t initiator_seed, uint64_t responder_seed,
                          const PasnParams& proposed, const PasnOptions& options) {
  ensure_sodium();
  PasnResult result;

  KeyPair initiator = generate_keypair(initiator_seed);
  KeyPair responder = generate_keypair(responder_seed);

  auto tap = [&](int idx, Bytes& msg) {
    if (options.tap) options.tap(idx, msg);
  };

  // msg1: initiator ephemeral key and proposed parameters, in the clear.
  Bytes msg1 = concat({Bytes{0x01}, initiator.pub, encode_pasn_params(proposed)});
  tap(1, msg1);

  // Responder side of msg1.
  ByteReader r1(msg1);
  if (r1.u8() != 0x01) {
    result.abort = PasnAbort::bad_mac;
    result.aborted_by = "responder";
    return result;
  }
  std::array<uint8_t, 32> i_pub_seen{};
  for (auto& b : i_pub_seen) b = r1.u8();
  PasnParams proposed_seen = decode_pasn_params(r1);

  PasnParams chosen = options.responder_params.value_or(proposed_seen);

  auto responder_shared = shared_secret(responder, i_pub_seen);
  Bytes r_transcript_key = hkdf_expand(
      hkdf_extract(as_span(std::string("PASN handshake")), responder_shared),
      concat({i_pub_seen, responder.pub}), 32);

  // msg2: responder ephemeral key in the clear, chosen parameters protected.
  Bytes msg2_ad = concat({msg1, responder.pub});
  auto nonce2 = counter_nonce(2);
  Bytes ct2 = aead_seal(r_transcript_key, nonce2, encode_pasn_params(chosen), msg2_ad);
  Bytes msg2 = concat({Bytes{0x02}, responder.pub, nonce2, ct2});
  tap(2, msg2);

  // Initiator side of msg2.
  ByteReader r2(msg2);
  PasnParams chosen_seen;
  std::array<uint8_t, 32> r_pub_seen{};
  std::array<uint8_t, 32> initiator_shared{};
  Bytes i_transcript_key;
  try {
    if (r2.u8() != 0x02) raise(Errc::bad_mac, "bad msg2 marker");
    for (auto& b : r_pub_seen) b = r2.u8();
    std::array<uint8_t, 12> nonce{};
    for (auto& b : nonce) b = r2.u8();
    Bytes ct;
    while (!r2.done()) ct.push_back(r2.u8());

    initiator_shared = shared_secret(initiator, r_pub_seen);
    i_transcript_key = hkdf_expand(
        hkdf_extract(as_span(std::string("PASN handshake")), initiator_shared),
        concat({initiator.pub, r_pub_seen}), 32);
    Bytes msg2_ad_i = concat({msg1, r_pub_seen});
    Bytes body;
    if (!aead_open(i_transcript_key, nonce, ct, msg2_ad_i, body)) {
      raise(Errc::bad_mac, "msg2 integrity check failed");
    }
    ByteReader rb(body);
    chosen_seen = decode_pasn_params(rb);
  } catch (const Error&) {
    result.abort = PasnAbort::bad_mac;
    result.aborted_by = "initiator";
    return result;
  }
  if (chosen_seen != proposed) {
    result.abort = PasnAbort::param_mismatch;
    result.aborted_by = "initiator";
    return result;
  }

  // msg3: protected confirmation of the chosen parameters.
  PasnParams confirm = options.initiator_confirm.value_or(chosen_seen);
  auto nonce3 = counter_nonce(3);
  Bytes ct3 = aead_seal(i_transcript_key, nonce3, encode_pasn_params(confirm), msg2);
  Bytes msg3 = concat({Bytes{0x03}, nonce3, ct3});
  tap(3, msg3);

  // Responder side of msg3.
  try {
    ByteReader r3(msg3);
    if (r3.u8() != 0x03) raise(Errc::bad_mac, "bad msg3 marker");
    std::array<uint8_t, 12> nonce{};
    for (auto& b : nonce) b = r3.u8();
    Bytes ct;
    while (!r3.done()) ct.push_back(r3.u8());
    Bytes body;
    if (!aead_open(r_transcript_key, nonce, ct, msg2, body)) {
      raise(Errc::bad_mac, "msg3 integrity check failed");
    }
    ByteReader rb(body);
    PasnParams confirmed = decode_pasn_params(rb);
    if (confirmed != chosen) {
      result.abort = PasnAbort::param_mismatch;
      result.aborted_by = "responder";
      return result;
    }
  } catch (const Error&) {
    result.abort = PasnAbort::bad_mac;
    result.aborted_by = "responder";
    return result;
  }

  // Key schedule, computed independently on both sides. Non-RSNA mode: the
  // PMK comes from the ephemeral shared secret alone.
  auto derive_keys = [&](std::span<const uint8_t> shared, std::span<const uint8_t> i_pub,
                         std::span<const uint8_t> r_pub, const PasnParams& params,
                         std::array<uint8_t, 48>& ptksa, std::array<uint8_t, 32>& pmk,
                         std::array<uint8_t, 16>& pmk_id) {
    Bytes pmk_bytes = hkdf_expand(hkdf_extract(as_span(std::string("PASN PMK")), shared),
                                  concat({i_pub, r_pub}), 32);
    std::copy(pmk_bytes.begin(), pmk_bytes.end(), pmk.begin());
    Bytes id = sha256(concat({pmk_bytes, i_pub, r_pub}));
    std::copy(id.begin(), id.begin() + 16, pmk_id.begin());
    Bytes info = concat({as_span(std::string("PASN PTKSA")), encode_pasn_params(params), i_pub,
                         r_pub});
    Bytes ptksa_bytes =
        hkdf_expand(hkdf_extract(std::span<const uint8_t>(pmk_id), pmk_bytes), info, 48);
    std::copy(ptksa_bytes.begin(), ptksa_bytes.end(), ptksa.begin());
  };

  std::array<uint8_t, 32> pmk_r{};
  std::array<uint8_t, 16> pmk_id_r{};
  derive_keys(initiator_shared, initiator.pub, r_pub_seen, chosen_seen, result.ptksa_initiator,
              result.pmk, result.pmk_id);
  derive_keys(responder_shared, i_pub_seen, responder.pub, chosen, result.ptksa_responder, pmk_r,
              pmk_id_r);

  result.established = true;
  return result;
}

// ---------------------------------------------------------------------------
// Secure TRN
// ---------------------------------------------------------------------------

Bytes derive_secure_trn(std::span<const uint8_t> secret_key, std::span<const uint8_t> pmk_id,
                        size_t length_bits) {
  if (length_bits == 0) raise(Errc::zero_length, "secure TRN length");
  Bytes prk = hkdf_extract(pmk_id, secret_key);
  const std::string label(kSecureTrnLabel);
  Bytes stream = hkdf_expand(prk, as_span(label), (length_bits + 7) / 8);
  Bytes bits(length_bits);
  for (size_t i = 0; i < length_bits; ++i) {
    bits[i] = (stream[i / 8] >> (7 - (i % 8))) & 1;
  }
  return bits;
}

std::vector<std::complex<double>> map_pi2_bpsk(std::span<const uint8_t> bits) {
  std::vector<std::complex<double>> symbols(bits.size());
  for (size_t k = 0; k < bits.size(); ++k) {
    double s = bits[k] ? -1.0 : 1.0;
    switch (k % 4) {
      case 0: symbols[k] = {s, 0.0}; break;
      case 1: symbols[k] = {0.0, s}; break;
      case 2: symbols[k] = {-s, 0.0}; break;
      case 3: symbols[k] = {0.0, -s}; break;
    }
  }
  return symbols;
}

// ---------------------------------------------------------------------------
// Protected frames
// ---------------------------------------------------------------------------

ProtectedFrame protect_ftm(const FtmFrame& frame, SecureContext& ctx,
                           const std::optional<std::array<uint8_t, 12>>& nonce) {
  ensure_sodium();
  ProtectedFrame out;
  if (nonce) {
    out.nonce = *nonce;
  } else {
    uint64_t v = ctx.nonce_counter++;
    for (int i = 0; i < 8; ++i) out.nonce[i] = static_cast<uint8_t>(v >> (8 * i));
  }
  if (!ctx.used_nonces.insert(out.nonce).second) {
    raise(Errc::nonce_reuse, "nonce already used under this key");
  }
  Bytes body = encode_ftm_frame(frame);
  out.ciphertext = aead_seal(std::span(ctx.ptksa).first(32), out.nonce, body, {});
  return out;
}

FtmFrame unprotect_ftm(const ProtectedFrame& frame, const SecureContext& ctx) {
  Bytes body;
  if (!aead_open(std::span(ctx.ptksa).first(32), frame.nonce, frame.ciphertext, {}, body)) {
    raise(Errc::integrity_failure, "frame failed authentication");
  }
  return decode_ftm_frame(body).frame;
}

Bytes encode_protected(const ProtectedFrame& frame) {
  Bytes out(frame.nonce.begin(), frame.nonce.end());
  out.insert(out.end(), frame.ciphertext.begin(), frame.ciphertext.end());
  return out;
}

ProtectedFrame decode_protected(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12 + crypto_aead_chacha20poly1305_ietf_ABYTES) {
    raise(Errc::truncated_frame, "protected frame too short");
  }
  ProtectedFrame out;
  std::copy(bytes.begin(), bytes.begin() + 12, out.nonce.begin());
  out.ciphertext.assign(bytes.begin() + 12, bytes.end());
  return out;
}

// ---------------------------------------------------------------------------
// Secure session
// ---------------------------------------------------------------------------

std::vector<SecureSubfieldSignal> transmit_secure_trn(std::span<const ChannelTap> taps,
                                                      std::span<const uint8_t> secret_key,
                                                      std::span<const uint8_t> pmk_id,
                                                      int subfields, int sequence_length,
                                                      double bandwidth_ghz, double snr_db,
                                                      uint64_t seed) {
  Bytes bits = derive_secure_trn(secret_key, pmk_id,
                                 static_cast<size_t>(subfields) * sequence_length);
  ArrayConfig omni{1, 1, 0.5, 60.48, bandwidth_ghz};
  RadioEnd tx{omni, AwvConfig{0, 0.0, 0.0}, Polarization::vertical};
  RadioEnd rx = tx;

  std::vector<SecureSubfieldSignal> out;
  out.reserve(subfields);
  for (int k = 0; k < subfields; ++k) {
    SecureSubfieldSignal sig;
    std::span<const uint8_t> slice(bits.data() + static_cast<size_t>(k) * sequence_length,
                                   static_cast<size_t>(sequence_length));
    sig.symbols = map_pi2_bpsk(slice);
    sig.rx = propagate(sig.symbols, taps, tx, rx, snr_db, derive_seed(seed, 0x7E, k));
    out.push_back(std::move(sig));
  }
  return out;
}

Cir matched_filter_cir(std::span<const std::complex<double>> rx,
                       std::span<const std::complex<double>> symbols,
                       const CirThreshold& threshold) {
  if (rx.size() < symbols.size()) raise(Errc::length_mismatch, "rx shorter than the sequence");
  const size_t n = symbols.size();
  const size_t lags = rx.size() - n + 1;
  std::vector<double> mags(lags);
  std::vector<std::complex<double>> profile(lags);
  for (size_t d = 0; d < lags; ++d) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t k = 0; k < n; ++k) acc += std::conj(symbols[k]) * rx[d + k];
    profile[d] = acc / static_cast<double>(n);
    mags[d] = std::abs(profile[d]);
  }
  double peak = *std::max_element(mags.begin(), mags.end());
  std::vector<double> sorted(mags);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double floor = sorted[sorted.size() / 2];

  Cir cir;
  cir.length_samples = static_cast<int>(lags);
  if (peak <= 0.0) return cir;
  for (size_t d = 0; d < lags; ++d) {
    if (mags[d] >= threshold.relative * peak && mags[d] >= threshold.noise_mult * floor) {
      cir.taps.push_back({static_cast<int>(d), profile[d]});
    }
  }
  return cir;
}

Cir eavesdrop_cir(std::span<const SecureSubfieldSignal> subfields, const GolaySequencePair& pair,
                  const CirThreshold& threshold) {
  if (subfields.size() < 2) raise(Errc::length_mismatch, "need at least two subfields");
  const size_t n = static_cast<size_t>(pair.length());

  std::vector<double> power;
  size_t pairs = 0;
  for (size_t k = 0; k + 1 < subfields.size(); k += 2) {
    const auto& rx_a = subfields[k].rx;
    const auto& rx_b = subfields[k + 1].rx;
    size_t len = std::min(rx_a.size(), rx_b.size());
    if (len < n) continue;
    auto profile = correlate_and_sum(std::span(rx_a).first(len), std::span(rx_b).first(len), pair);
    if (power.empty()) power.assign(profile.size(), 0.0);
    size_t m = std::min(power.size(), profile.size());
    for (size_t d = 0; d < m; ++d) power[d] += std::norm(profile[d]);
    ++pairs;
  }
  if (pairs == 0) raise(Errc::length_mismatch, "subfields shorter than the Golay sequence");

  std::vector<double> amp(power.size());
  for (size_t d = 0; d < power.size(); ++d) amp[d] = std::sqrt(power[d] / pairs);
  double peak = *std::max_element(amp.begin(), amp.end());
  std::vector<double> sorted(amp);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double floor = sorted[sorted.size() / 2];

  Cir cir;
  cir.length_samples = static_cast<int>(amp.size());
  if (peak <= 0.0) return cir;
  for (size_t d = 0; d < amp.size(); ++d) {
    if (amp[d] >= threshold.relative * peak && amp[d] >= threshold.noise_mult * floor) {
      cir.taps.push_back({static_cast<int>(d), {amp[d], 0.0}});
    }
  }
  return cir;
}

SecureSessionResult secure_ftm_session(const SessionScenario& scenario, const IftmrParams& params,
                                       uint64_t seed, const SecureSessionOptions& options) {
  SecureSessionResult result;

  PasnParams pasn_params;
  pasn_params.bandwidth_ghz = params.bandwidth_ghz;
  result.pasn = pasn_handshake(derive_seed(seed, 0x1A), derive_seed(seed, 0x1B), pasn_params);
  if (!result.pasn.established) {
    result.session.params = params;
    fail_session(result.session, FailReason::security_violation);
    return result;
  }

  auto tx_ctx = std::make_shared<SecureContext>();
  tx_ctx->ptksa = result.pasn.ptksa_initiator;
  auto rx_ctx = std::make_shared<SecureContext>();
  rx_ctx->ptksa = result.pasn.ptksa_responder;

  auto frame_counter = std::make_shared<int>(0);
  int tamper_index = options.tamper_frame_index;
  FrameProtection protection;
  protection.protect = [tx_ctx, frame_counter, tamper_index](const FtmFrame& frame) {
    ProtectedFrame pf = protect_ftm(frame, *tx_ctx);
    Bytes wire = encode_protected(pf);
    if ((*frame_counter)++ == tamper_index && !wire.empty()) {
      wire[wire.size() / 2] ^= 0x01;  // in-flight corruption
    }
    return wire;
  };
  protection.unprotect = [rx_ctx](std::span<const uint8_t> bytes) {
    return unprotect_ftm(decode_protected(bytes), *rx_ctx);
  };

  // Secure channel sounding: matched filter per subfield, corrupted subfields
  // discarded, survivors combined.
  auto taps = compute_paths(scenario.geometry, scenario.ista, scenario.rsta, scenario.reflection);
  if (!taps.empty()) {
    std::span<const uint8_t> trn_secret(result.pasn.ptksa_initiator.data() + 32, 16);
    result.on_air = transmit_secure_trn(taps, trn_secret, result.pasn.pmk_id,
                                        options.trn_subfields, options.trn_sequence_length,
                                        params.bandwidth_ghz, options.snr_db,
                                        derive_seed(seed, 0x2C));
    if (options.jam_subfield_index >= 0 &&
        options.jam_subfield_index < static_cast<int>(result.on_air.size())) {
      auto& jammed = result.on_air[static_cast<size_t>(options.jam_subfield_index)].rx;
      SplitMix64 rng(derive_seed(seed, 0x2D));
      double strongest = 0.0;
      for (const auto& tap : taps) strongest = std::max(strongest, std::abs(tap.gain_co));
      for (auto& sample : jammed) sample = rng.next_cgaussian() * (10.0 * strongest);
    }

    std::vector<std::complex<double>> acc;
    size_t kept = 0;
    for (const auto& sub : result.on_air) {
      Cir cir = matched_filter_cir(sub.rx, sub.symbols);
      if (cir.taps.empty()) {
        ++result.discarded_subfields;
        continue;
      }
      if (acc.empty()) acc.assign(static_cast<size_t>(cir.length_samples), {0.0, 0.0});
      std::vector<std::complex<double>> profile(static_cast<size_t>(cir.length_samples),
                                                {0.0, 0.0});
      for (const auto& tap : cir.taps) {
        profile[static_cast<size_t>(tap.delay_sample_index)] = tap.gain;
      }
      for (size_t d = 0; d < acc.size() && d < profile.size(); ++d) acc[d] += profile[d];
      ++kept;
    }
    if (kept > 0) {
      double noise = noise_sigma(taps, options.snr_db);
      double floor = noise > 0.0 ? noise : 1e-6;
      for (size_t d = 0; d < acc.size(); ++d) {
        std::complex<double> g = acc[d] / static_cast<double>(kept);
        if (std::abs(g) > 0.0) {
          PdpTap tap;
          tap.delay_sample_index = static_cast<int>(d);
          tap.i = g.real();
          tap.q = g.imag();
          tap.snr_db = 10.0 * std::log10(std::norm(g) / (floor * floor));
          result.measured_pdp.taps.push_back(tap);
        }
      }
    }
  }

  IftmrParams secure_params = params;
  secure_params.secure = true;
  result.session = run_session(scenario, secure_params, seed, &protection);
  return result;
}

}  // namespace azpos::secure
