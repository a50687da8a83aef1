#pragma once

#include <string>

#include "dpw/surface.hpp"

namespace dpw {

// Text mesh: lines "v x y z r g b" then 1-based triangle faces "f i j k".
// Quads are split along the shorter diagonal; masked grid points are omitted
// together with their incident faces. color_field: "mu" (binary by sign),
// "margin" or "gauss" (grayscale). A sidecar CSV carries per-vertex scalars.
void export_mesh(const Frontal& fr, const std::string& mesh_path,
                 const std::string& sidecar_path, const std::string& color_field,
                 double reg_floor = 1e-3);

// Loop coefficient file: one line per exponent,
//   n a11re a11im a12re a12im a21re a21im a22re a22im
// '#' starts a comment.
LaurentMatrix read_loop_file(const std::string& path);
void write_loop_file(const LaurentMatrix& loop, const std::string& path);

}  // namespace dpw
