#ifndef GLYPHGAN_CHECKPOINT_HPP
#define GLYPHGAN_CHECKPOINT_HPP

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <string>

#include "glyphgan/networks.hpp"

namespace glyphgan {

// Versioned container: named tensors plus a string metadata block. All
// generator/discriminator parameters and buffers, optimizer state, RNG
// state, and the network configuration live in one file.
struct Checkpoint {
  std::map<std::string, torch::Tensor> tensors;
  std::map<std::string, std::string> meta;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void put_net_config(Checkpoint& ckpt, const NetConfig& cfg);
// Throws ConfigError when the block is absent or malformed.
NetConfig net_config_from(const Checkpoint& ckpt);

// Mismatched configuration on load is an error, not a silent adaptation.
void require_net_config(const Checkpoint& ckpt, const NetConfig& expected);

// Parameters and buffers, keyed `<prefix>/<name>`.
void pack_module(Checkpoint& ckpt, const std::string& prefix,
                 const torch::nn::Module& module);
void unpack_module(const Checkpoint& ckpt, const std::string& prefix,
                   torch::nn::Module& module);

// Optimizer state embedded via torch's archive format.
void pack_optimizer(Checkpoint& ckpt, const std::string& key,
                    const torch::optim::Optimizer& opt);
void unpack_optimizer(const Checkpoint& ckpt, const std::string& key,
                      torch::optim::Optimizer& opt);

// Default CPU RNG (drives dropout noise).
void pack_torch_rng(Checkpoint& ckpt);
void unpack_torch_rng(const Checkpoint& ckpt);

}  // namespace glyphgan

#endif
