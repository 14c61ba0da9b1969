#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symw/channel.hpp"
#include "symw/symmetry.hpp"
#include "symw/tensor.hpp"

namespace symw {

enum class Codec : std::uint8_t { Dof = 0, Full = 1, Pruned = 2 };

std::string_view to_string(Codec codec);
Codec codec_from_string(std::string_view name);  // FormatError on unknown name

/// eta(S) = 100 * (1 - M(S) / K^2), in percent.
double bandwidth_saving(SymmetryKind kind, int k);

/// Pr{layer clean} = p_succ^N with p_succ = (1 - ber)^packet_bits *
/// (1 - p_loss) and N the packet count for payload_bits of body payload.
double clean_layer_probability(std::uint64_t payload_bits, const ChannelConfig& cfg);

/// One end-to-end transmission of a bundle through the simulated link.
struct TransmissionReport {
  Codec codec = Codec::Dof;
  SymmetryKind symmetry = SymmetryKind::None;
  int bits = 8;
  double snr_db = 0.0;
  std::uint64_t seed = 0;

  std::uint64_t payload_bits = 0;      // accounting bits: B_dof / B_full / k(32+b)
  double payload_reduction = 0.0;      // percent vs the full codec at the same b
  std::uint64_t bits_sent = 0;         // packets * packet_bits
  LinkStats link;
  double frob_error_rx = 0.0;           // vs transmitter-side reference weights
  double frob_error_rx_projected = 0.0; // with receive-side projection
  double clean_prob_analytic = 0.0;     // p_succ^(total packets)
  std::uint32_t decode_failures = 0;    // layers falling back to zeros (corrupt metadata)
  std::uint32_t trials = 1;
};

/// Encode each layer, packetize, transmit, reassemble, decode with and
/// without receive-side projection, and fill every report field.
///
/// The error reference is the transmitter-side projected tensor for the dof
/// and full codecs; the pruned baseline approximates the unconstrained
/// weights, so its reference is the raw tensor and the projected error
/// equals the plain one.
TransmissionReport run_trial(const ModelBundle& bundle, Codec codec, SymmetryKind kind, int bits,
                             const ChannelConfig& cfg);

struct SweepGrid {
  std::vector<Codec> codecs;
  std::vector<SymmetryKind> symmetries;
  std::vector<int> bits_list;
  std::vector<double> snr_db_list;
  std::vector<std::uint64_t> seeds;
  ChannelConfig channel;  // snr_db and seed are overridden per cell
};

inline constexpr std::string_view kCsvHeader =
    "codec,symmetry,bits,snr_db,seed,payload_kbits,reduction_pct,bits_sent_kbits,per,"
    "delivered_frac,frob_rx,frob_rx_proj,clean_prob";

std::string csv_row(const TransmissionReport& report);

/// Run every (codec, symmetry, bits, snr) cell of the grid for every seed and
/// return the CSV table: one row per seed followed by a "mean" and an "se"
/// row per cell (SE = sample std / sqrt(runs)). Cells run in parallel; row
/// order is deterministic.
std::string run_sweep(const ModelBundle& bundle, const SweepGrid& grid);

}  // namespace symw
