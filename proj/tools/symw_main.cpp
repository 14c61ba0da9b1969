#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symw/bytes.hpp"
#include "symw/dof_codec.hpp"
#include "symw/metrics.hpp"
#include "symw/prune_codec.hpp"

namespace fs = std::filesystem;
using namespace symw;

namespace {

constexpr std::uint8_t kEnvelopeMagic[4] = {'S', 'Y', 'M', 'P'};
constexpr std::uint16_t kEnvelopeVersion = 1;

const std::string kSymmetryHelp =
    "symmetry family: none, central-even, central-skew, horizontal, vertical, "
    "main-diagonal, anti-diagonal, rot90, radial, toeplitz";

std::string to_base36(std::uint32_t v) {
  static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out;
  do {
    out.insert(out.begin(), digits[v % 36]);
    v /= 36;
  } while (v > 0);
  return out;
}

void cmd_orbits(const std::string& kind_name, int k) {
  const SymmetryKind kind = symmetry_from_string(kind_name);
  const OrbitMap map = orbit_map(kind, k);
  std::printf("symmetry=%s K=%d M=%u eta=%.2f%%\n", std::string(to_string(kind)).c_str(), k, map.m,
              bandwidth_saving(kind, k));
  const std::size_t width = to_base36(map.m == 0 ? 0 : map.m - 1).size();
  for (int i = 0; i < k; ++i) {
    std::string line;
    for (int j = 0; j < k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * k + j;
      const bool center = map.orbit_id[idx] < 0;
      const std::string cell =
          center ? "×" : to_base36(static_cast<std::uint32_t>(map.orbit_id[idx]));
      const std::size_t shown = center ? 1 : cell.size();  // the multiplication sign is one column
      line += std::string(width > shown ? width - shown : 0, ' ') + cell;
      if (j + 1 < k) line += ' ';
    }
    std::printf("%s\n", line.c_str());
  }
}

std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint16_t>> parse_shapes(
    const std::string& text) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint16_t>> shapes;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    unsigned c_out = 0, c_in = 0, k = 0;
    if (std::sscanf(item.c_str(), "%ux%ux%u", &c_out, &c_in, &k) != 3 || c_out == 0 || c_in == 0) {
      throw FormatError("bad shape '" + item + "', expected C_OUTxC_INxK like 16x8x5");
    }
    shapes.emplace_back(c_out, c_in, static_cast<std::uint16_t>(k));
  }
  if (shapes.empty()) throw FormatError("no shapes given");
  return shapes;
}

void cmd_make_bundle(const std::string& out, const std::string& shapes_text, std::uint64_t seed,
                     const std::string& symmetry) {
  ModelBundle bundle;
  std::mt19937_64 rng(seed);
  std::uint16_t layer_id = 0;
  for (const auto& [c_out, c_in, k] : parse_shapes(shapes_text)) {
    WeightTensor w = WeightTensor::zeros(c_out, c_in, k);
    for (float& v : w.data) {
      v = static_cast<float>(2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0);
    }
    if (!symmetry.empty()) {
      w = project(w, orbit_map(symmetry_from_string(symmetry), k));
    }
    bundle.layers.push_back({layer_id++, std::move(w)});
  }
  save_bundle(bundle, out);
  std::printf("wrote %zu layer(s) to %s\n", bundle.layers.size(), out.c_str());
}

struct EncodedLayerRecord {
  std::uint16_t layer_id;
  std::uint32_t c_out, c_in;
  std::uint16_t k;
  std::vector<std::uint8_t> payload;
};

void write_envelope(const std::string& path, Codec codec,
                    const std::vector<EncodedLayerRecord>& layers) {
  ByteWriter w;
  w.raw(kEnvelopeMagic);
  w.u16le(kEnvelopeVersion);
  w.u8(static_cast<std::uint8_t>(codec));
  w.u32le(static_cast<std::uint32_t>(layers.size()));
  for (const auto& rec : layers) {
    w.u16le(rec.layer_id);
    w.u32le(rec.c_out);
    w.u32le(rec.c_in);
    w.u16le(rec.k);
    w.u32le(static_cast<std::uint32_t>(rec.payload.size()));
    w.raw(rec.payload);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const auto& bytes = w.bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::pair<Codec, std::vector<EncodedLayerRecord>> read_envelope(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IoError("read failed: " + path);

  ByteReader r(bytes);
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kEnvelopeMagic)) {
    throw FormatError("not a SYMP payload file (bad magic)");
  }
  if (r.u16le() != kEnvelopeVersion) throw FormatError("unsupported SYMP version");
  const Codec codec = static_cast<Codec>(r.u8());
  if (codec != Codec::Dof && codec != Codec::Full && codec != Codec::Pruned) {
    throw FormatError("unknown codec id in payload file");
  }
  const std::uint32_t count = r.u32le();
  std::vector<EncodedLayerRecord> layers;
  layers.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    EncodedLayerRecord rec;
    rec.layer_id = r.u16le();
    rec.c_out = r.u32le();
    rec.c_in = r.u32le();
    rec.k = r.u16le();
    const std::uint32_t len = r.u32le();
    const auto span = r.raw(len);
    rec.payload.assign(span.begin(), span.end());
    layers.push_back(std::move(rec));
  }
  if (!r.done()) throw FormatError("trailing bytes in payload file");
  return {codec, std::move(layers)};
}

void cmd_encode(const std::string& in, const std::string& out, const std::string& codec_name,
                const std::string& symmetry, int bits) {
  const Codec codec = codec_from_string(codec_name);
  const SymmetryKind kind = symmetry_from_string(symmetry);
  const ModelBundle bundle = load_bundle(in);
  std::vector<EncodedLayerRecord> records;
  std::uint64_t payload_bits = 0;
  for (const auto& layer : bundle.layers) {
    const WeightTensor& w = layer.weights;
    EncodedLayerRecord rec{layer.layer_id, w.c_out, w.c_in, w.k, {}};
    if (codec == Codec::Pruned) {
      const auto budget = pruned_equivalent_budget(kind, w.c_out, w.c_in, w.k);
      const CooPayload coo = prune_topk(w.data, budget, bits);
      payload_bits += coo.payload_bits();
      rec.payload = serialize_coo(coo);
    } else {
      const DofPayload payload = (codec == Codec::Full)
                                     ? encode_full(project(w, orbit_map(kind, w.k)), bits)
                                     : encode_dof(w, kind, bits);
      payload_bits += payload.payload_bits();
      rec.payload = serialize_payload(payload);
    }
    records.push_back(std::move(rec));
  }
  write_envelope(out, codec, records);
  std::printf("encoded %zu layer(s), codec=%s symmetry=%s bits=%d payload=%.3f kbits -> %s\n",
              records.size(), std::string(to_string(codec)).c_str(),
              std::string(to_string(kind)).c_str(), bits, static_cast<double>(payload_bits) / 1000.0,
              out.c_str());
}

void cmd_decode(const std::string& in, const std::string& out, bool apply_projection,
                const std::string& symmetry) {
  const auto [codec, records] = read_envelope(in);
  ModelBundle bundle;
  for (const auto& rec : records) {
    WeightTensor w;
    if (codec == Codec::Pruned) {
      const CooPayload coo = parse_coo(rec.payload);
      w = WeightTensor::zeros(rec.c_out, rec.c_in, rec.k);
      if (coo.total_len != w.volume()) {
        throw FormatError("COO payload does not match the recorded layer shape");
      }
      w.data = reconstruct_coo(coo).values;
    } else {
      const DofPayload payload = parse_payload(rec.payload);
      w = decode_dof(payload, apply_projection);
      if (codec == Codec::Full && apply_projection && !symmetry.empty()) {
        w = project(w, orbit_map(symmetry_from_string(symmetry), w.k));
      }
    }
    bundle.layers.push_back({rec.layer_id, std::move(w)});
  }
  save_bundle(bundle, out);
  std::printf("decoded %zu layer(s) -> %s\n", bundle.layers.size(), out.c_str());
}

void print_report(const TransmissionReport& r) {
  std::printf("codec=%s symmetry=%s bits=%d snr_db=%g seed=%llu\n",
              std::string(to_string(r.codec)).c_str(), std::string(to_string(r.symmetry)).c_str(),
              r.bits, r.snr_db, static_cast<unsigned long long>(r.seed));
  std::printf("payload_kbits=%.3f reduction_pct=%.2f bits_sent_kbits=%.3f\n",
              static_cast<double>(r.payload_bits) / 1000.0, r.payload_reduction,
              static_cast<double>(r.bits_sent) / 1000.0);
  std::printf("packets_sent=%llu failed_crc=%llu lost=%llu per=%.6g delivered_frac=%.6g\n",
              static_cast<unsigned long long>(r.link.packets_sent),
              static_cast<unsigned long long>(r.link.packets_failed_crc),
              static_cast<unsigned long long>(r.link.packets_lost), r.link.per,
              r.link.delivered_fraction);
  std::printf("frob_rx=%.6g frob_rx_projected=%.6g clean_prob=%.6g decode_failures=%u\n",
              r.frob_error_rx, r.frob_error_rx_projected, r.clean_prob_analytic, r.decode_failures);
}

void append_csv_row(const std::string& path, const TransmissionReport& report) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path + " for appending");
  if (fresh) out << kCsvHeader << '\n';
  out << csv_row(report) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void cmd_transmit(const std::string& in, const std::string& codec_name, const std::string& symmetry,
                  int bits, const ChannelConfig& cfg, const std::string& csv_path) {
  const ModelBundle bundle = load_bundle(in);
  const TransmissionReport report =
      run_trial(bundle, codec_from_string(codec_name), symmetry_from_string(symmetry), bits, cfg);
  print_report(report);
  if (!csv_path.empty()) append_csv_row(csv_path, report);
}

// Flat key=value sweep configuration with comma lists; '#' starts a comment.
struct SweepFileConfig {
  std::string bundle_path;
  std::string output_path;
  SweepGrid grid;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) continue;
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

SweepFileConfig parse_sweep_config(const std::string& path, const ChannelConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep config " + path);
  SweepFileConfig cfg;
  cfg.grid.channel = defaults;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "bundle") {
        cfg.bundle_path = value;
      } else if (key == "output") {
        cfg.output_path = value;
      } else if (key == "codecs") {
        for (const auto& name : split_list(value)) cfg.grid.codecs.push_back(codec_from_string(name));
      } else if (key == "symmetries") {
        for (const auto& name : split_list(value)) {
          cfg.grid.symmetries.push_back(symmetry_from_string(name));
        }
      } else if (key == "bits") {
        for (const auto& v : split_list(value)) cfg.grid.bits_list.push_back(std::stoi(v));
      } else if (key == "snr_db") {
        for (const auto& v : split_list(value)) cfg.grid.snr_db_list.push_back(std::stod(v));
      } else if (key == "seeds") {
        for (const auto& v : split_list(value)) cfg.grid.seeds.push_back(std::stoull(v));
      } else if (key == "packet_bits") {
        cfg.grid.channel.packet_bits = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "p_loss") {
        cfg.grid.channel.p_loss = std::stod(value);
      } else if (key == "pin_metadata") {
        cfg.grid.channel.pin_metadata = (value == "true" || value == "1" || value == "yes");
      } else {
        throw FormatError("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
    } catch (const std::out_of_range&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": value out of range for " + key);
    }
  }
  if (cfg.bundle_path.empty() || cfg.output_path.empty() || cfg.grid.codecs.empty() ||
      cfg.grid.symmetries.empty() || cfg.grid.bits_list.empty() || cfg.grid.snr_db_list.empty() ||
      cfg.grid.seeds.empty()) {
    throw FormatError(path + ": required keys: bundle, output, codecs, symmetries, bits, snr_db, seeds");
  }
  return cfg;
}

void cmd_sweep(const std::string& config_path, const ChannelConfig& defaults) {
  const SweepFileConfig cfg = parse_sweep_config(config_path, defaults);
  const ModelBundle bundle = load_bundle(cfg.bundle_path);
  const std::string csv = run_sweep(bundle, cfg.grid);
  std::ofstream out(cfg.output_path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + cfg.output_path + " for writing");
  out << csv;
  if (!out) throw IoError("write failed: " + cfg.output_path);
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  std::printf("wrote %zu row(s) to %s\n", rows - 1, cfg.output_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel-symmetry weight codec and BPSK-AWGN link simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  const auto symmetry_names = CLI::IsMember({"none", "central-even", "central-skew", "horizontal",
                                             "vertical", "main-diagonal", "anti-diagonal", "rot90",
                                             "radial", "toeplitz"});
  const auto codec_names = CLI::IsMember({"dof", "full", "pruned"});

  ChannelConfig channel;
  app.add_option("--seed", channel.seed, "corruption stream seed");
  app.add_option("--packet-bits", channel.packet_bits, "total frame length in bits (default 2048)");
  app.add_option("--p-loss", channel.p_loss, "independent packet erasure probability");
  app.add_flag("--pin-metadata", channel.pin_metadata,
               "deliver the per-layer metadata prefix error-free");

  auto* orbits = app.add_subcommand("orbits", "print the orbit grid for one symmetry");
  std::string orbit_kind;
  int orbit_k = 5;
  orbits->add_option("--kind", orbit_kind, kSymmetryHelp)->required()->check(symmetry_names);
  orbits->add_option("--k", orbit_k, "odd kernel side length");

  auto* make = app.add_subcommand("make-bundle", "generate a random SYMW bundle");
  std::string make_out, make_shapes, make_sym;
  std::uint64_t make_seed = 1;
  make->add_option("--out", make_out, "output .symw path")->required();
  make->add_option("--shapes", make_shapes, "comma list of C_OUTxC_INxK, e.g. 16x8x5,32x16x3")
      ->required();
  make->add_option("--seed", make_seed, "value generator seed");
  make->add_option("--symmetry", make_sym, "project layers onto this symmetry first")
      ->check(symmetry_names);

  auto* encode = app.add_subcommand("encode", "encode a bundle into a payload file");
  std::string enc_in, enc_out, enc_codec = "dof", enc_sym = "none";
  int enc_bits = 8;
  encode->add_option("--in", enc_in, "input .symw bundle")->required();
  encode->add_option("--out", enc_out, "output .symp payload file")->required();
  encode->add_option("--codec", enc_codec, "dof | full | pruned")->check(codec_names);
  encode->add_option("--symmetry", enc_sym, kSymmetryHelp)->check(symmetry_names);
  encode->add_option("--bits", enc_bits, "quantizer bit-width (2..16)");

  auto* decode = app.add_subcommand("decode", "decode a payload file back into a bundle");
  std::string dec_in, dec_out, dec_sym;
  bool dec_project = false;
  decode->add_option("--in", dec_in, "input .symp payload file")->required();
  decode->add_option("--out", dec_out, "output .symw bundle")->required();
  decode->add_flag("--project", dec_project, "apply receive-side symmetry projection");
  decode->add_option("--symmetry", dec_sym, "projection kind for full-codec payloads")
      ->check(symmetry_names);

  auto* transmit = app.add_subcommand("transmit", "one end-to-end transmission of a bundle");
  std::string tx_in, tx_codec = "dof", tx_sym = "none", tx_csv;
  int tx_bits = 8;
  transmit->add_option("--in", tx_in, "input .symw bundle")->required();
  transmit->add_option("--codec", tx_codec, "dof | full | pruned")->check(codec_names);
  transmit->add_option("--symmetry", tx_sym, kSymmetryHelp)->check(symmetry_names);
  transmit->add_option("--bits", tx_bits, "quantizer bit-width (2..16)");
  transmit->add_option("--snr-db", channel.snr_db, "channel SNR in dB");
  transmit->add_option("--csv", tx_csv, "append the report as a CSV row to this file");

  auto* sweep = app.add_subcommand("sweep", "run a grid of transmissions from a config file");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "key = value sweep description")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*orbits) {
      cmd_orbits(orbit_kind, orbit_k);
    } else if (*make) {
      cmd_make_bundle(make_out, make_shapes, make_seed, make_sym);
    } else if (*encode) {
      cmd_encode(enc_in, enc_out, enc_codec, enc_sym, enc_bits);
    } else if (*decode) {
      cmd_decode(dec_in, dec_out, dec_project, dec_sym);
    } else if (*transmit) {
      cmd_transmit(tx_in, tx_codec, tx_sym, tx_bits, channel, tx_csv);
    } else if (*sweep) {
      cmd_sweep(sweep_config, channel);
    }
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
