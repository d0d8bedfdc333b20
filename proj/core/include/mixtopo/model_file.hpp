#pragma once

#include <string>
#include <string_view>

#include "mixtopo/models.hpp"

namespace mixtopo {

// Model definition text. Either a built-in with optional overrides:
//
//     builtin = "aniso-qah"
//     a2 = 3.0            # a1, a2, m may be overridden
//
// or an explicit Fourier table, one row per term:
//
//     name = "my-model"
//     term = d1, sin, 1, 0, 1.0      # component, kind, n_x, n_y, amplitude
//
// Errors are ParseError with the offending line number.
BlochModel parse_model(std::string_view text);
BlochModel load_model_file(const std::string& path);

// `builtin`, `aniso-qah`, or `builtin:aniso-qah` select the default model;
// anything else is treated as a model file path.
BlochModel resolve_model(const std::string& spec);

}  // namespace mixtopo
