#include "symw/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

#include "symw/bytes.hpp"
#include "symw/rng.hpp"

namespace symw {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t n = 0; n < 256; ++n) {
    std::uint32_t c = n;
    for (int bit = 0; bit < 8; ++bit) {
      c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
    }
    table[n] = c;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

// Counter layout for the per-packet corruption streams. domain 0 draws one
// word per bit (word lane = bit & 3); domain 1 draws the erasure decision.
enum class Domain : std::uint32_t { BitFlips = 0, Erasure = 1 };

Philox4x32::Counter packet_counter(const Packet& p, Domain domain, std::uint32_t block) {
  return {p.stream_id, p.seq_idx,
          (static_cast<std::uint32_t>(domain) << 16) | p.layer_id, block};
}

Philox4x32::Key seed_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

bool erased(const Packet& p, const ChannelConfig& cfg) {
  if (cfg.p_loss <= 0.0) return false;
  const auto block = Philox4x32::generate(packet_counter(p, Domain::Erasure, 0), seed_key(cfg.seed));
  return uniform_unit(block[0]) < cfg.p_loss;
}

void corrupt_bits(Frame& frame, const Packet& p, const ChannelConfig& cfg, double ber) {
  if (ber <= 0.0) return;
  const auto key = seed_key(cfg.seed);
  const std::size_t nbits = frame.size() * 8;
  for (std::size_t bit = 0; bit < nbits; bit += 4) {
    const auto words =
        Philox4x32::generate(packet_counter(p, Domain::BitFlips, static_cast<std::uint32_t>(bit / 4)), key);
    const std::size_t lanes = std::min<std::size_t>(4, nbits - bit);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      if (uniform_unit(words[lane]) < ber) {
        const std::size_t b = bit + lane;
        frame[b / 8] ^= static_cast<std::uint8_t>(0x80u >> (b % 8));
      }
    }
  }
}

std::vector<Frame> transmit_impl(const std::vector<Packet>& packets, const ChannelConfig& cfg,
                                 bool parallel) {
  cfg.validate();
  const double ber = ber_from_snr(cfg.snr_db);
  const auto n = static_cast<std::int64_t>(packets.size());
  std::vector<Frame> frames(packets.size());
  std::vector<std::uint8_t> keep(packets.size(), 0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Packet& p = packets[static_cast<std::size_t>(i)];
    if (erased(p, cfg)) continue;
    Frame frame = wire_frame(p);
    corrupt_bits(frame, p, cfg, ber);
    frames[static_cast<std::size_t>(i)] = std::move(frame);
    keep[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<Frame> received;
  received.reserve(packets.size());
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (keep[i]) received.push_back(std::move(frames[i]));
  }
  return received;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::uint8_t byte : data) {
    c = kCrcTable[(c ^ byte) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

double ber_from_snr(double snr_db) {
  // Q(x) = erfc(x / sqrt(2)) / 2 with x = sqrt(2 * 10^(snr/10)).
  return 0.5 * std::erfc(std::sqrt(std::pow(10.0, snr_db / 10.0)));
}

void ChannelConfig::validate() const {
  if (packet_bits % 8 != 0 || packet_bits <= kFrameOverheadBits) {
    throw InvariantError("packet_bits must be a byte multiple above " +
                         std::to_string(kFrameOverheadBits) + ", got " + std::to_string(packet_bits));
  }
  if (!(p_loss >= 0.0 && p_loss <= 1.0)) {
    throw InvariantError("p_loss must be in [0, 1]");
  }
  if (!std::isfinite(snr_db)) {
    throw InvariantError("snr_db must be finite");
  }
}

std::vector<Packet> packetize(std::span<const std::uint8_t> payload, std::uint32_t stream_id,
                              std::uint16_t layer_id, const ChannelConfig& cfg) {
  cfg.validate();
  if (payload.empty()) throw InvariantError("packetize: empty payload");
  const std::size_t capacity = cfg.body_capacity();
  const std::size_t n = (payload.size() + capacity - 1) / capacity;
  std::vector<Packet> packets;
  packets.reserve(n);
  for (std::size_t seq = 0; seq < n; ++seq) {
    Packet p;
    p.stream_id = stream_id;
    p.layer_id = layer_id;
    p.seq_idx = static_cast<std::uint32_t>(seq);
    const std::size_t begin = seq * capacity;
    const std::size_t len = std::min(capacity, payload.size() - begin);
    p.body.assign(capacity, 0);
    std::memcpy(p.body.data(), payload.data() + begin, len);
    ByteWriter w;
    w.u32be(p.stream_id);
    w.u16be(p.layer_id);
    w.u32be(p.seq_idx);
    w.raw(p.body);
    p.crc = crc32(w.bytes());
    packets.push_back(std::move(p));
  }
  return packets;
}

Frame wire_frame(const Packet& packet) {
  ByteWriter w;
  w.u32be(packet.stream_id);
  w.u16be(packet.layer_id);
  w.u32be(packet.seq_idx);
  w.raw(packet.body);
  w.u32be(packet.crc);
  return w.take();
}

std::vector<Frame> transmit(const std::vector<Packet>& packets, const ChannelConfig& cfg) {
  return transmit_impl(packets, cfg, true);
}

std::vector<Frame> transmit_serial(const std::vector<Packet>& packets, const ChannelConfig& cfg) {
  return transmit_impl(packets, cfg, false);
}

void LinkStats::merge(const LinkStats& other) {
  packets_sent += other.packets_sent;
  packets_failed_crc += other.packets_failed_crc;
  packets_lost += other.packets_lost;
  seq_anomalies += other.seq_anomalies;
  bits_sent += other.bits_sent;
  delivered_body_bytes += other.delivered_body_bytes;
  payload_bytes += other.payload_bytes;
  per = packets_sent ? static_cast<double>(packets_failed_crc + packets_lost) / packets_sent : 0.0;
  delivered_fraction =
      payload_bytes ? static_cast<double>(delivered_body_bytes) / payload_bytes : 0.0;
}

ReassembledPayload reassemble(const std::vector<Frame>& received, std::size_t expected_len,
                              const ChannelConfig& cfg) {
  cfg.validate();
  if (expected_len == 0) throw InvariantError("reassemble: expected_len must be positive");
  const std::size_t capacity = cfg.body_capacity();
  const std::size_t n = (expected_len + capacity - 1) / capacity;

  ReassembledPayload out;
  out.bytes.assign(expected_len, 0);
  out.stats.packets_sent = n;
  out.stats.bits_sent = static_cast<std::uint64_t>(n) * cfg.packet_bits;
  out.stats.payload_bytes = expected_len;
  out.stats.packets_lost = (received.size() < n) ? n - received.size() : 0;

  std::vector<std::uint8_t> seen(n, 0);
  for (const Frame& frame : received) {
    if (frame.size() != cfg.frame_bytes()) {
      ++out.stats.packets_failed_crc;  // malformed frame counts as corrupt
      continue;
    }
    const std::span<const std::uint8_t> covered(frame.data(), frame.size() - kCrcBytes);
    ByteReader tail(std::span<const std::uint8_t>(frame.data() + covered.size(), kCrcBytes));
    if (crc32(covered) != tail.u32be()) {
      ++out.stats.packets_failed_crc;
      continue;
    }
    ByteReader header(covered);
    header.u32be();  // stream_id
    header.u16be();  // layer_id
    const std::uint32_t seq = header.u32be();
    if (seq >= n || seen[seq]) {
      ++out.stats.seq_anomalies;
      continue;
    }
    seen[seq] = 1;
    const std::size_t begin = static_cast<std::size_t>(seq) * capacity;
    const std::size_t len = std::min(capacity, expected_len - begin);
    std::memcpy(out.bytes.data() + begin, frame.data() + kHeaderBytes, len);
    out.stats.delivered_body_bytes += len;
  }
  out.stats.per = static_cast<double>(out.stats.packets_failed_crc + out.stats.packets_lost) /
                  out.stats.packets_sent;
  out.stats.delivered_fraction =
      static_cast<double>(out.stats.delivered_body_bytes) / out.stats.payload_bytes;
  return out;
}

ReassembledPayload send_payload(std::span<const std::uint8_t> payload, std::uint32_t stream_id,
                                std::uint16_t layer_id, const ChannelConfig& cfg,
                                std::size_t metadata_bytes) {
  const auto packets = packetize(payload, stream_id, layer_id, cfg);
  const auto received = transmit(packets, cfg);
  ReassembledPayload out = reassemble(received, payload.size(), cfg);
  if (cfg.pin_metadata && metadata_bytes > 0) {
    const std::size_t pin = std::min(metadata_bytes, payload.size());
    std::copy_n(payload.begin(), pin, out.bytes.begin());
  }
  return out;
}

}  // namespace symw
