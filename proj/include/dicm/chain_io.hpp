#pragma once

#include <filesystem>

#include "dicm/dataset.hpp"
#include "dicm/sampler.hpp"

namespace dicm {

/// A persisted fit: the chain plus the training data it conditions on.
struct ChainBundle {
  Chain chain;
  Dataset train;
};

/// Writes a chain bundle directory:
///   meta         key/value text: format version, model sizes, sampler
///                configuration, scaling metadata, acceptance diagnostics
///   x.csv, y.csv training data in natural units
///   thetas.csv   one row per sample: theta_w, theta_y
///   w_#####.csv  latent matrix per sample, 17 significant digits
/// Plug-in coregionalization estimates are not stored; they are recomputed
/// on load from the stored state, which reproduces them bit for bit.
void save_chain(const Chain& chain, const Dataset& train,
                const std::filesystem::path& dir);

ChainBundle load_chain(const std::filesystem::path& dir);

}  // namespace dicm
