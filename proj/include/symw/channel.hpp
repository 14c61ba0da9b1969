#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symw/error.hpp"

namespace symw {

/// CRC-32/ISO-HDLC (the zlib/Ethernet CRC32): reflected polynomial
/// 0xEDB88320, init and final-xor 0xFFFFFFFF. check("123456789") =
/// 0xCBF43926.
std::uint32_t crc32(std::span<const std::uint8_t> data);

/// BPSK-over-AWGN bit error rate: Q(sqrt(2 * 10^(snr_db / 10))), with Q the
/// standard Gaussian tail function. Monotone decreasing in snr_db.
double ber_from_snr(double snr_db);

inline constexpr std::size_t kHeaderBytes = 10;  // u32 stream_id, u16 layer_id, u32 seq_idx
inline constexpr std::size_t kCrcBytes = 4;
inline constexpr std::size_t kFrameOverheadBits = 8 * (kHeaderBytes + kCrcBytes);  // 112

struct ChannelConfig {
  double snr_db = 10.0;
  std::uint32_t packet_bits = 2048;  // total frame length: header + body + CRC
  double p_loss = 0.0;
  std::uint64_t seed = 0;
  bool pin_metadata = false;

  /// Throws InvariantError unless packet_bits is a byte multiple larger than
  /// the 112-bit frame overhead and p_loss is a probability.
  void validate() const;

  std::size_t frame_bytes() const { return packet_bits / 8; }
  std::size_t body_capacity() const { return frame_bytes() - kHeaderBytes - kCrcBytes; }
};

/// One fixed-length frame. The header is big-endian; the CRC covers
/// header + body and is appended big-endian.
struct Packet {
  std::uint32_t stream_id = 0;
  std::uint16_t layer_id = 0;
  std::uint32_t seq_idx = 0;
  std::vector<std::uint8_t> body;  // zero-padded to body_capacity
  std::uint32_t crc = 0;
};

using Frame = std::vector<std::uint8_t>;

/// Slice a payload into ceil(len / capacity) packets with sequence numbers
/// 0..N-1; the last body is zero-padded. Throws InvariantError on an empty
/// payload.
std::vector<Packet> packetize(std::span<const std::uint8_t> payload, std::uint32_t stream_id,
                              std::uint16_t layer_id, const ChannelConfig& cfg);

/// Assemble the wire frame: 10-byte big-endian header, body, 4-byte
/// big-endian CRC32 over header + body.
Frame wire_frame(const Packet& packet);

/// Push packets through the memoryless BPSK-AWGN channel: every bit of every
/// frame flips independently with probability ber_from_snr(cfg.snr_db), and
/// each packet is erased independently with probability cfg.p_loss. Erased
/// packets are absent from the result; surviving frames keep their original
/// order. The corruption stream is keyed by (seed, stream_id, layer_id,
/// seq_idx), so the result is reproducible and independent of processing
/// order. Parallel across packets; the serial variant is the bit-identical
/// reference.
std::vector<Frame> transmit(const std::vector<Packet>& packets, const ChannelConfig& cfg);
std::vector<Frame> transmit_serial(const std::vector<Packet>& packets, const ChannelConfig& cfg);

struct LinkStats {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_failed_crc = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t seq_anomalies = 0;  // duplicate or out-of-range seq_idx
  std::uint64_t bits_sent = 0;
  std::uint64_t delivered_body_bytes = 0;
  std::uint64_t payload_bytes = 0;
  double per = 0.0;                 // (failed + lost) / sent
  double delivered_fraction = 0.0;  // delivered body bytes / payload bytes

  bool clean() const {
    return packets_failed_crc == 0 && packets_lost == 0 && seq_anomalies == 0 &&
           delivered_body_bytes == payload_bytes;
  }

  /// Commutative aggregation across layers/trials; ratios are recomputed
  /// from the summed counters.
  void merge(const LinkStats& other);
};

struct ReassembledPayload {
  std::vector<std::uint8_t> bytes;
  LinkStats stats;
};

/// Single-pass reassembly: packets failing CRC are discarded, accepted bodies
/// are placed by sequence number, and missing segments remain zero-filled.
/// Duplicate or out-of-range sequence numbers keep the first occurrence and
/// are counted as anomalies. No retransmission.
ReassembledPayload reassemble(const std::vector<Frame>& received, std::size_t expected_len,
                              const ChannelConfig& cfg);

/// packetize + transmit + reassemble for one layer payload. When
/// cfg.pin_metadata is set, the first metadata_bytes of the reassembled
/// stream are restored from the original payload (ablation switch for
/// metadata transported out of band).
ReassembledPayload send_payload(std::span<const std::uint8_t> payload, std::uint32_t stream_id,
                                std::uint16_t layer_id, const ChannelConfig& cfg,
                                std::size_t metadata_bytes = 0);

}  // namespace symw
