#pragma once

#include <string>
#include <vector>

#include "teachlab/tensor.hpp"

namespace teachlab {

// Checkpoint file, bit-exact:
//   magic "TCHK", u32 LE version=1, u32 LE tensor count;
//   per tensor: u32 LE name length, UTF-8 name, u32 LE rank,
//   rank x u32 LE dims, dim-product x float32 LE values.
// No padding, no alignment. Values are stored as float32; loading restores
// them into float64 exactly (widening is lossless), so save->load->save is
// byte-identical.

void save_checkpoint(const std::string& path, const std::vector<Parameter>& params);

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<double> values;
};

std::vector<NamedTensor> load_checkpoint(const std::string& path);

/// Copy loaded values into matching parameters by name. Every checkpoint
/// tensor must match an existing parameter in name and shape, and vice versa.
void apply_checkpoint(const std::vector<NamedTensor>& loaded, std::vector<Parameter>& params);

}  // namespace teachlab
