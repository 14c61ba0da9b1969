#include "symw/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "symw/dof_codec.hpp"
#include "symw/prune_codec.hpp"

namespace symw {

namespace {

double frob_sq(const WeightTensor& a, const WeightTensor& b) {
  const double d = frobenius_distance(a, b);
  return d * d;
}

double packet_success_probability(const ChannelConfig& cfg) {
  const double ber = ber_from_snr(cfg.snr_db);
  return std::pow(1.0 - ber, static_cast<double>(cfg.packet_bits)) * (1.0 - cfg.p_loss);
}

struct LayerDecode {
  WeightTensor plain;
  WeightTensor projected;
  bool ok = true;
};

LayerDecode decode_received(const std::vector<std::uint8_t>& rx, Codec codec, SymmetryKind kind,
                            int bits, const WeightTensor& expected_shape, const OrbitMap& map) {
  LayerDecode out;
  try {
    if (codec == Codec::Pruned) {
      const CooPayload coo = parse_coo(rx);
      if (coo.total_len != expected_shape.volume()) {
        throw FormatError("COO length does not match the expected layer shape");
      }
      out.plain = WeightTensor::zeros(expected_shape.c_out, expected_shape.c_in, expected_shape.k);
      out.plain.data = reconstruct_coo(coo).values;
      out.projected = out.plain;  // no symmetry structure to restore
      return out;
    }
    const DofPayload payload = parse_payload(rx);
    const SymmetryKind wire_kind = (codec == Codec::Full) ? SymmetryKind::None : kind;
    if (payload.symmetry != wire_kind || payload.bits != bits ||
        payload.c_out != expected_shape.c_out || payload.c_in != expected_shape.c_in ||
        payload.k != expected_shape.k) {
      throw FormatError("payload metadata does not match the expected layer");
    }
    out.plain = decode_dof(payload, false);
    // The receiver knows the layer symmetry out of band, so the full codec is
    // projected with the session kind, not the payload's "none".
    out.projected = (codec == Codec::Full) ? project(out.plain, map) : decode_dof(payload, true);
    return out;
  } catch (const FormatError&) {
    // Metadata destroyed in transit: the layer is unrecoverable and the
    // receiver substitutes zeros for the known shape.
    out.plain = WeightTensor::zeros(expected_shape.c_out, expected_shape.c_in, expected_shape.k);
    out.projected = out.plain;
    out.ok = false;
    return out;
  }
}

}  // namespace

std::string_view to_string(Codec codec) {
  switch (codec) {
    case Codec::Dof: return "dof";
    case Codec::Full: return "full";
    case Codec::Pruned: return "pruned";
  }
  throw InvariantError("invalid Codec");
}

Codec codec_from_string(std::string_view name) {
  if (name == "dof") return Codec::Dof;
  if (name == "full") return Codec::Full;
  if (name == "pruned") return Codec::Pruned;
  throw FormatError("unknown codec: " + std::string(name) + " (expected dof|full|pruned)");
}

double bandwidth_saving(SymmetryKind kind, int k) {
  const double m = dof_count(kind, k);
  return 100.0 * (1.0 - m / (static_cast<double>(k) * k));
}

double clean_layer_probability(std::uint64_t payload_bits, const ChannelConfig& cfg) {
  cfg.validate();
  if (payload_bits == 0) throw InvariantError("clean_layer_probability: payload_bits must be > 0");
  const std::uint64_t payload_bytes = (payload_bits + 7) / 8;
  const std::uint64_t capacity = cfg.body_capacity();
  const std::uint64_t n = (payload_bytes + capacity - 1) / capacity;
  return std::pow(packet_success_probability(cfg), static_cast<double>(n));
}

TransmissionReport run_trial(const ModelBundle& bundle, Codec codec, SymmetryKind kind, int bits,
                             const ChannelConfig& cfg) {
  bundle.validate();
  cfg.validate();
  if (bundle.layers.empty()) throw InvariantError("run_trial: bundle has no layers");

  TransmissionReport report;
  report.codec = codec;
  report.symmetry = kind;
  report.bits = bits;
  report.snr_db = cfg.snr_db;
  report.seed = cfg.seed;

  std::uint64_t full_baseline_bits = 0;
  double err_sq = 0.0;
  double err_proj_sq = 0.0;

  for (const auto& layer : bundle.layers) {
    const WeightTensor& w = layer.weights;
    const OrbitMap map = orbit_map(kind, w.k);
    full_baseline_bits += static_cast<std::uint64_t>(bits) * w.volume();

    WeightTensor reference;
    std::vector<std::uint8_t> stream;
    std::size_t metadata_bytes = 0;
    if (codec == Codec::Pruned) {
      reference = w;
      const auto budget = pruned_equivalent_budget(kind, w.c_out, w.c_in, w.k);
      const CooPayload coo = prune_topk(w.data, budget, bits);
      report.payload_bits += coo.payload_bits();
      stream = serialize_coo(coo);
      metadata_bytes = kCooMetadataBytes;
    } else {
      reference = project(w, map);
      const DofPayload payload =
          (codec == Codec::Full) ? encode_full(reference, bits) : encode_dof(w, kind, bits);
      report.payload_bits += payload.payload_bits();
      stream = serialize_payload(payload);
      metadata_bytes = kDofMetadataBytes;
    }

    const ReassembledPayload rx = send_payload(stream, 0, layer.layer_id, cfg, metadata_bytes);
    report.link.merge(rx.stats);

    const LayerDecode decoded = decode_received(rx.bytes, codec, kind, bits, w, map);
    if (!decoded.ok) ++report.decode_failures;
    err_sq += frob_sq(decoded.plain, reference);
    err_proj_sq += frob_sq(decoded.projected, reference);
  }

  report.payload_reduction =
      100.0 * (1.0 - static_cast<double>(report.payload_bits) / full_baseline_bits);
  report.bits_sent = report.link.bits_sent;
  report.frob_error_rx = std::sqrt(err_sq);
  report.frob_error_rx_projected = std::sqrt(err_proj_sq);
  report.clean_prob_analytic =
      std::pow(packet_success_probability(cfg), static_cast<double>(report.link.packets_sent));
  return report;
}

namespace {

std::array<double, 8> numeric_columns(const TransmissionReport& r) {
  return {static_cast<double>(r.payload_bits) / 1000.0,
          r.payload_reduction,
          static_cast<double>(r.bits_sent) / 1000.0,
          r.link.per,
          r.link.delivered_fraction,
          r.frob_error_rx,
          r.frob_error_rx_projected,
          r.clean_prob_analytic};
}

std::string format_row(std::string_view codec, std::string_view symmetry, int bits, double snr_db,
                       const std::string& seed, const std::array<double, 8>& cols) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%s,%s,%d,%g,%s,%.3f,%.2f,%.3f,%.6g,%.6g,%.6g,%.6g,%.6g",
                std::string(codec).c_str(), std::string(symmetry).c_str(), bits, snr_db,
                seed.c_str(), cols[0], cols[1], cols[2], cols[3], cols[4], cols[5], cols[6],
                cols[7]);
  return buf;
}

}  // namespace

std::string csv_row(const TransmissionReport& report) {
  return format_row(to_string(report.codec), to_string(report.symmetry), report.bits,
                    report.snr_db, std::to_string(report.seed), numeric_columns(report));
}

std::string run_sweep(const ModelBundle& bundle, const SweepGrid& grid) {
  if (grid.codecs.empty() || grid.symmetries.empty() || grid.bits_list.empty() ||
      grid.snr_db_list.empty() || grid.seeds.empty()) {
    throw InvariantError("sweep grid has an empty axis");
  }

  struct Job {
    Codec codec;
    SymmetryKind kind;
    int bits;
    double snr_db;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Codec codec : grid.codecs)
    for (SymmetryKind kind : grid.symmetries)
      for (int bits : grid.bits_list)
        for (double snr : grid.snr_db_list)
          for (std::uint64_t seed : grid.seeds) jobs.push_back({codec, kind, bits, snr, seed});

  std::vector<TransmissionReport> reports(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    ChannelConfig cfg = grid.channel;
    cfg.snr_db = job.snr_db;
    cfg.seed = job.seed;
    reports[static_cast<std::size_t>(i)] = run_trial(bundle, job.codec, job.kind, job.bits, cfg);
  }

  std::string csv(kCsvHeader);
  csv += '\n';
  const std::size_t runs = grid.seeds.size();
  for (std::size_t cell = 0; cell < jobs.size(); cell += runs) {
    std::array<double, 8> mean{};
    for (std::size_t s = 0; s < runs; ++s) {
      const auto& r = reports[cell + s];
      csv += csv_row(r);
      csv += '\n';
      const auto cols = numeric_columns(r);
      for (std::size_t c = 0; c < cols.size(); ++c) mean[c] += cols[c];
    }
    if (runs == 1) continue;  // a single run is its own summary
    for (double& v : mean) v /= static_cast<double>(runs);
    std::array<double, 8> se{};
    for (std::size_t s = 0; s < runs; ++s) {
      const auto cols = numeric_columns(reports[cell + s]);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double d = cols[c] - mean[c];
        se[c] += d * d;
      }
    }
    for (double& v : se) v = std::sqrt(v / static_cast<double>(runs - 1)) /
                             std::sqrt(static_cast<double>(runs));
    const auto& first = reports[cell];
    csv += format_row(to_string(first.codec), to_string(first.symmetry), first.bits, first.snr_db,
                      "mean", mean);
    csv += '\n';
    csv += format_row(to_string(first.codec), to_string(first.symmetry), first.bits, first.snr_db,
                      "se", se);
    csv += '\n';
  }
  return csv;
}

}  // namespace symw
