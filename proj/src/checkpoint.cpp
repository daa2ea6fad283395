#include "nmt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nmt/kvconfig.hpp"

namespace nmt {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[] = "NMTCKPT\n";
constexpr std::size_t kMagicLen = 8;
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  return v;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  return v;
}

void put_tensor(std::ostream& out, const std::string& name, const Mat& m) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

std::string config_block(const Checkpoint& ckpt) {
  std::ostringstream out;
  out << "mode = " << mode_name(ckpt.config.mode) << '\n';
  out << "src_vocab = " << ckpt.config.src_vocab << '\n';
  out << "tgt_vocab = " << ckpt.config.tgt_vocab << '\n';
  out << "emb_dim = " << ckpt.config.emb_dim << '\n';
  out << "hidden_dim = " << ckpt.config.hidden_dim << '\n';
  out << "dropout_rate = " << format_double(ckpt.config.dropout_rate) << '\n';
  out << "max_len = " << ckpt.config.max_len << '\n';
  out << "seed = " << ckpt.config.seed << '\n';
  out << "epoch = " << ckpt.epoch << '\n';
  out << "best_dev_bleu = " << format_double(ckpt.best_dev_bleu) << '\n';
  return out.str();
}

void parse_config_block(const std::string& text, Checkpoint& ckpt) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  for (const auto& [key, value] : parse_kv_lines(lines)) {
    if (key == "mode") {
      const auto m = parse_mode(value);
      if (!m) throw CheckpointError("checkpoint: unknown mode '" + value + "'");
      ckpt.config.mode = *m;
    } else if (key == "src_vocab") {
      ckpt.config.src_vocab = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "tgt_vocab") {
      ckpt.config.tgt_vocab = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "emb_dim") {
      ckpt.config.emb_dim = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "hidden_dim") {
      ckpt.config.hidden_dim = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "dropout_rate") {
      ckpt.config.dropout_rate = kv_double(key, value);
    } else if (key == "max_len") {
      ckpt.config.max_len = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "seed") {
      ckpt.config.seed = kv_uint(key, value);
    } else if (key == "epoch") {
      ckpt.epoch = static_cast<std::int32_t>(kv_int(key, value));
    } else if (key == "best_dev_bleu") {
      ckpt.best_dev_bleu = kv_double(key, value);
    } else {
      throw CheckpointError("checkpoint: unknown config key '" + key + "'");
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path + "' for writing");

  out.write(kMagic, kMagicLen);
  put_u32(out, kVersion);
  const std::string cfg = config_block(ckpt);
  put_u64(out, cfg.size());
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  const std::uint32_t count = static_cast<std::uint32_t>(ckpt.params.size() + ckpt.opt_g2.size() +
                                                         ckpt.opt_dx2.size());
  put_u32(out, count);
  for (std::size_t i = 0; i < ckpt.params.size(); ++i)
    put_tensor(out, "param." + ckpt.params.names()[i], ckpt.params.value(i));
  for (std::size_t i = 0; i < ckpt.opt_g2.size(); ++i)
    put_tensor(out, "opt_g2." + ckpt.opt_g2.names()[i], ckpt.opt_g2.value(i));
  for (std::size_t i = 0; i < ckpt.opt_dx2.size(); ++i)
    put_tensor(out, "opt_dx2." + ckpt.opt_dx2.names()[i], ckpt.opt_dx2.value(i));

  if (!out) throw CheckpointError("failed while writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path, std::optional<Mode> expected_mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path + "' for reading");

  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw CheckpointError("'" + path + "' is not a checkpoint file");
  const std::uint32_t version = get_u32(in, "format version");
  if (version != kVersion)
    throw CheckpointError("checkpoint format version " + std::to_string(version) +
                          " is not supported (expected " + std::to_string(kVersion) + ")");

  Checkpoint ckpt;
  const std::uint64_t cfg_len = get_u64(in, "config block length");
  std::string cfg(cfg_len, '\0');
  if (!in.read(cfg.data(), static_cast<std::streamsize>(cfg_len)))
    throw CheckpointError("checkpoint truncated inside the config block");
  parse_config_block(cfg, ckpt);
  ckpt.config.validate();

  const std::uint32_t count = get_u32(in, "tensor count");
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint32_t name_len = get_u32(in, "tensor name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len))
      throw CheckpointError("checkpoint truncated inside a tensor name");
    const std::uint32_t rows = get_u32(in, "tensor rows");
    const std::uint32_t cols = get_u32(in, "tensor cols");
    Mat m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) {
        double v = 0.0;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
          throw CheckpointError("checkpoint truncated inside tensor '" + name + "'");
        m(r, c) = v;
      }
    if (name.rfind("param.", 0) == 0)
      ckpt.params.add(name.substr(6), std::move(m));
    else if (name.rfind("opt_g2.", 0) == 0)
      ckpt.opt_g2.add(name.substr(7), std::move(m));
    else if (name.rfind("opt_dx2.", 0) == 0)
      ckpt.opt_dx2.add(name.substr(8), std::move(m));
    else
      throw CheckpointError("checkpoint: unknown tensor record '" + name + "'");
  }
  if (in.get() != std::ifstream::traits_type::eof())
    throw CheckpointError("checkpoint has trailing bytes after the last tensor");

  if (expected_mode && ckpt.config.mode != *expected_mode)
    throw CheckpointError("checkpoint was trained in " + mode_name(ckpt.config.mode) +
                          " mode but " + mode_name(*expected_mode) + " mode was requested");
  return ckpt;
}

}  // namespace nmt
