// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "azpos/frames.hpp"
#include "azpos/golay.hpp"
#include "azpos/session.hpp"

namespace azpos::secure {

using azpos::Bytes;

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

Bytes sha256(std::span<const uint8_t> data);
Bytes hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data);

// RFC 5869 HKDF over HMAC-SHA-256.
Bytes hkdf_extract(std::span<const uint8_t> salt, std::span<const uint8_t> ikm);
Bytes hkdf_expand(std::span<const uint8_t> prk, std::span<const uint8_t> info, size_t out_len);

// ChaCha20-Poly1305 (IETF) seal/open; the tag rides at the end of the
// ciphertext. Exposed so the construction can be pinned to the RFC 8439
// reference vector.
Bytes aead_seal(std::span<const uint8_t> key32, std::span<const uint8_t> nonce12,
                std::span<const uint8_t> plaintext, std::span<const uint8_t> aad);
bool aead_open(std::span<const uint8_t> key32, std::span<const uint8_t> nonce12,
               std::span<const uint8_t> ciphertext, std::span<const uint8_t> aad,
               Bytes& plaintext);

struct KeyPair {
  std::array<uint8_t, 32> secret{};
  std::array<uint8_t, 32> pub{};
};

// X25519 key pair drawn deterministically from the seed.
KeyPair generate_keypair(uint64_t seed);
std::array<uint8_t, 32> shared_secret(const KeyPair& own, std::span<const uint8_t> peer_pub);

// ---------------------------------------------------------------------------
// PASN: 3-message pre-association handshake
// ---------------------------------------------------------------------------

struct PasnParams {
  uint8_t group_id = 1;
  double bandwidth_ghz = 2.16;
  bool protected_ftm = true;

  friend bool operator==(const PasnParams&, const PasnParams&) = default;
};

enum class PasnAbort { none, bad_mac, param_mismatch };

struct PasnResult {
  bool established = false;
  PasnAbort abort = PasnAbort::none;
  std::string aborted_by;  // "initiator" or "responder"
  std::array<uint8_t, 48> ptksa_initiator{};
  std::array<uint8_t, 48> ptksa_responder{};
  std::array<uint8_t, 16> pmk_id{};
  std::array<uint8_t, 32> pmk{};
};

struct PasnOptions {
  // In-flight message hook (msg index 1..3); tests use it to flip bits.
  std::function<void(int, Bytes&)> tap;
  // Responder picks these instead of accepting the proposal.
  std::optional<PasnParams> responder_params;
  // Initiator confirms these in msg3 instead of the chosen set.
  std::optional<PasnParams> initiator_confirm;
};

// msg1 carries the initiator's ephemeral key and proposed parameters; msg2 the
// responder's ephemeral key with the chosen parameters inside a protected
// body; msg3 the protected confirmation. Both sides then derive the PMK from
// the shared secret and the 48-byte PTKSA from the PMK, the negotiated
// parameters and both public keys. Non-RSNA mode: there is no prior PMK.
PasnResult pasn_handshake(uint64_t initiator_seed, uint64_t responder_seed,
                          const PasnParams& proposed, const PasnOptions& options = {});

// ---------------------------------------------------------------------------
// Secure TRN sequences
// ---------------------------------------------------------------------------

inline constexpr char kSecureTrnLabel[] = "EDMG Secure RTT";

// PRK = HMAC-SHA-256(pmk_id, secret_key); bits = HKDF-Expand(PRK,
// "EDMG Secure RTT", ceil(bits/8)) truncated to length_bits. One byte per bit,
// MSB first.
Bytes derive_secure_trn(std::span<const uint8_t> secret_key, std::span<const uint8_t> pmk_id,
                        size_t length_bits);

// symbol_k = (1 - 2 bit_k) * exp(j k pi/2), exact on the unit circle.
std::vector<std::complex<double>> map_pi2_bpsk(std::span<const uint8_t> bits);

// ---------------------------------------------------------------------------
// Protected FTM frames
// ---------------------------------------------------------------------------

struct SecureContext {
  std::array<uint8_t, 48> ptksa{};
  uint64_t nonce_counter = 0;
  std::set<std::array<uint8_t, 12>> used_nonces;
};

struct ProtectedFrame {
  std::array<uint8_t, 12> nonce{};
  Bytes ciphertext;  // body plus 16-byte tag
};

// Authenticated encryption of the encoded frame. Reusing a nonce under the
// same context is rejected.
ProtectedFrame protect_ftm(const FtmFrame& frame, SecureContext& ctx,
                           const std::optional<std::array<uint8_t, 12>>& nonce = std::nullopt);
FtmFrame unprotect_ftm(const ProtectedFrame& frame, const SecureContext& ctx);

// Wire form: 12-byte nonce prefix, ciphertext, 16-byte tag.
Bytes encode_protected(const ProtectedFrame& frame);
ProtectedFrame decode_protected(std::span<const uint8_t> bytes);

// ---------------------------------------------------------------------------
// Secure FTM session
// ---------------------------------------------------------------------------

struct SecureSubfieldSignal {
  std::vector<std::complex<double>> symbols;  // transmitted secure sequence
  std::vector<std::complex<double>> rx;       // received samples
};

// Emits the secure TRN subfields of one PPDU through the channel.
std::vector<SecureSubfieldSignal> transmit_secure_trn(
    std::span<const ChannelTap> taps, std::span<const uint8_t> secret_key,
    std::span<const uint8_t> pmk_id, int subfields, int sequence_length, double bandwidth_ghz,
    double snr_db, uint64_t seed);

// Matched filter on the known secure sequence, same tap threshold as the
// Golay estimator.
Cir matched_filter_cir(std::span<const std::complex<double>> rx,
                       std::span<const std::complex<double>> symbols,
                       const CirThreshold& threshold = {});

// Eavesdropper model: correlates consecutive subfields with a standard Golay
// pair and integrates the correlation power non-coherently before applying
// the tap threshold. Without the pseudorandom sequence this finds nothing.
Cir eavesdrop_cir(std::span<const SecureSubfieldSignal> subfields, const GolaySequencePair& pair,
                  const CirThreshold& threshold = {});

struct SecureSessionOptions {
  int jam_subfield_index = -1;    // corrupt this TRN subfield in flight
  int tamper_frame_index = -1;    // flip one bit of this protected frame
  int trn_subfields = 8;
  int trn_sequence_length = 128;
  double snr_db = std::numeric_limits<double>::infinity();
};

struct SecureSessionResult {
  PasnResult pasn;
  SessionState session;
  Pdp measured_pdp;  // combined matched-filter estimate over kept subfields
  int discarded_subfields = 0;
  std::vector<SecureSubfieldSignal> on_air;  // what an eavesdropper observes
};

// PASN handshake, then the regular measurement flow with every FTM frame
// protected and the TRN subfields replaced by secure sequences. Corrupted
// subfields are discarded; a frame integrity failure aborts the session.
SecureSessionResult secure_ftm_session(const SessionScenario& scenario,
                                       const IftmrParams& params, uint64_t seed,
                                       const SecureSessionOptions& options = {});

}  // namespace azpos::secure
