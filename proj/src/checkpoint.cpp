#include "glyphgan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "glyphgan/errors.hpp"

namespace glyphgan {

namespace {

constexpr char kMagic[4] = {'G', 'G', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i64(std::ostream& out, int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
uint32_t read_u32(std::istream& in) {
  uint32_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
int64_t read_i64(std::istream& in) {
  int64_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::string read_str(std::istream& in) {
  std::string s(read_u32(in), '\0');
  in.read(s.data(), static_cast<std::streamsize>(s.size()));
  return s;
}

uint8_t dtype_code(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return 0;
    case torch::kFloat64: return 1;
    case torch::kInt64: return 2;
    case torch::kUInt8: return 3;
    case torch::kInt32: return 4;
    default: throw ConfigError("checkpoint: unsupported tensor dtype");
  }
}

torch::ScalarType dtype_from(uint8_t code) {
  switch (code) {
    case 0: return torch::kFloat32;
    case 1: return torch::kFloat64;
    case 2: return torch::kInt64;
    case 3: return torch::kUInt8;
    case 4: return torch::kInt32;
    default: throw DataError("checkpoint: unknown dtype code");
  }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt,
                     const std::filesystem::path& path) {
  // Write to a sibling temp file and rename, so an interrupted save never
  // clobbers the last good checkpoint.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, static_cast<uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
      write_str(out, k);
      write_str(out, v);
    }
    write_u32(out, static_cast<uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, t] : ckpt.tensors) {
      auto c = t.contiguous().cpu();
      write_str(out, name);
      out.put(static_cast<char>(dtype_code(c.scalar_type())));
      write_u32(out, static_cast<uint32_t>(c.dim()));
      for (int64_t d : c.sizes()) write_i64(out, d);
      const auto bytes = static_cast<std::streamsize>(c.numel() * c.element_size());
      out.write(static_cast<const char*>(c.const_data_ptr()), bytes);
    }
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw DataError("checkpoint write failed (disk full?): " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a checkpoint file: " + path.string());
  if (read_u32(in) != kVersion)
    throw DataError("unsupported checkpoint version: " + path.string());

  Checkpoint ckpt;
  const uint32_t n_meta = read_u32(in);
  for (uint32_t i = 0; i < n_meta; ++i) {
    auto k = read_str(in);
    ckpt.meta[k] = read_str(in);
  }
  const uint32_t n_tensors = read_u32(in);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    auto name = read_str(in);
    auto dtype = dtype_from(static_cast<uint8_t>(in.get()));
    const uint32_t ndim = read_u32(in);
    std::vector<int64_t> dims(ndim);
    for (auto& d : dims) d = read_i64(in);
    auto t = torch::empty(dims, dtype);
    in.read(static_cast<char*>(t.data_ptr()),
            static_cast<std::streamsize>(t.numel() * t.element_size()));
    ckpt.tensors[name] = t;
  }
  if (!in) throw DataError("truncated checkpoint: " + path.string());
  return ckpt;
}

void put_net_config(Checkpoint& ckpt, const NetConfig& cfg) {
  std::ostringstream out;
  out << "styles = " << cfg.styles << "\n"
      << "style_mode = " << to_string(cfg.style_mode) << "\n"
      << "style_embed_width = " << cfg.style_embed_width << "\n"
      << "components_enabled = " << (cfg.components_enabled ? 1 : 0) << "\n"
      << "component_vocab = " << cfg.component_vocab << "\n"
      << "component_embed_width = " << cfg.component_embed_width << "\n"
      << "component_feature_width = " << cfg.component_feature_width << "\n"
      << "dropout_on_output = " << (cfg.dropout_on_output ? 1 : 0) << "\n";
  ckpt.meta["net_config"] = out.str();
}

NetConfig net_config_from(const Checkpoint& ckpt) {
  auto it = ckpt.meta.find("net_config");
  if (it == ckpt.meta.end())
    throw ConfigError("checkpoint has no network configuration block");
  NetConfig cfg;
  std::istringstream in(it->second);
  std::string key, eq, value;
  while (in >> key >> eq >> value) {
    if (eq != "=") throw ConfigError("malformed net_config block");
    if (key == "styles") cfg.styles = std::stoi(value);
    else if (key == "style_mode") cfg.style_mode = style_mode_from_string(value);
    else if (key == "style_embed_width") cfg.style_embed_width = std::stoi(value);
    else if (key == "components_enabled") cfg.components_enabled = value != "0";
    else if (key == "component_vocab") cfg.component_vocab = std::stoi(value);
    else if (key == "component_embed_width")
      cfg.component_embed_width = std::stoi(value);
    else if (key == "component_feature_width")
      cfg.component_feature_width = std::stoi(value);
    else if (key == "dropout_on_output") cfg.dropout_on_output = value != "0";
    else throw ConfigError("unknown net_config key: " + key);
  }
  return cfg;
}

void require_net_config(const Checkpoint& ckpt, const NetConfig& expected) {
  if (!(net_config_from(ckpt) == expected))
    throw ConfigError(
        "checkpoint network configuration does not match the requested one");
}

void pack_module(Checkpoint& ckpt, const std::string& prefix,
                 const torch::nn::Module& module) {
  for (const auto& p : module.named_parameters())
    ckpt.tensors[prefix + "/" + p.key()] = p.value().detach().clone();
  for (const auto& b : module.named_buffers())
    ckpt.tensors[prefix + "/" + b.key()] = b.value().detach().clone();
}

void unpack_module(const Checkpoint& ckpt, const std::string& prefix,
                   torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  auto restore = [&](const std::string& name, torch::Tensor dst) {
    auto it = ckpt.tensors.find(prefix + "/" + name);
    if (it == ckpt.tensors.end())
      throw DataError("checkpoint is missing tensor " + prefix + "/" + name);
    if (!it->second.sizes().equals(dst.sizes()))
      throw ConfigError("checkpoint tensor " + prefix + "/" + name +
                        " has mismatched shape");
    dst.copy_(it->second);
  };
  for (const auto& p : module.named_parameters()) restore(p.key(), p.value());
  for (const auto& b : module.named_buffers()) restore(b.key(), b.value());
}

void pack_optimizer(Checkpoint& ckpt, const std::string& key,
                    const torch::optim::Optimizer& opt) {
  std::ostringstream buf;
  torch::serialize::OutputArchive archive;
  const_cast<torch::optim::Optimizer&>(opt).save(archive);
  archive.save_to(buf);
  const std::string bytes = buf.str();
  auto t = torch::empty({static_cast<int64_t>(bytes.size())}, torch::kUInt8);
  std::memcpy(t.data_ptr(), bytes.data(), bytes.size());
  ckpt.tensors[key] = t;
}

void unpack_optimizer(const Checkpoint& ckpt, const std::string& key,
                      torch::optim::Optimizer& opt) {
  auto it = ckpt.tensors.find(key);
  if (it == ckpt.tensors.end())
    throw DataError("checkpoint is missing optimizer state " + key);
  auto t = it->second.contiguous();
  std::istringstream buf(std::string(
      static_cast<const char*>(t.const_data_ptr()),
      static_cast<std::size_t>(t.numel())));
  torch::serialize::InputArchive archive;
  archive.load_from(buf);
  opt.load(archive);
}

void pack_torch_rng(Checkpoint& ckpt) {
  auto gen = at::detail::getDefaultCPUGenerator();
  ckpt.tensors["rng/torch"] = gen.get_state();
}

void unpack_torch_rng(const Checkpoint& ckpt) {
  auto it = ckpt.tensors.find("rng/torch");
  if (it == ckpt.tensors.end())
    throw DataError("checkpoint is missing RNG state");
  auto gen = at::detail::getDefaultCPUGenerator();
  gen.set_state(it->second);
}

}  // namespace glyphgan
