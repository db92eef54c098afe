#pragma once

#include "gprd/nn/crnet.hpp"
#include "gprd/radargram.hpp"

namespace gprd::nn {

/// Normalizes r to [0, 1], replicate-pads it to multiples of 16, runs an
/// eval-mode forward pass on a private copy of the model and crops back.
/// The result has r's shape and metadata. Safe to call concurrently.
Radargram predict(const CRNet<float>& model, const Radargram& r);

}  // namespace gprd::nn
