#pragma once

#include <vector>

#include "slice.hpp"

namespace minmax {

// The three admissible vector-field classes at the boundary.
enum class VectorFieldClass {
  VanishOnBoundary,               // X^0
  TangentToBoundary,              // X^t (free boundary problems)
  InwardVanishOnGamma,            // X^- with chi|gamma = 0 (constrained)
};

const char* field_class_name(VectorFieldClass c);
VectorFieldClass field_class_for(BC bc);

// Analytic gradient of slice_mass with respect to vertex positions
// (dim * nv entries, multiplicity included).
std::vector<double> mass_gradient(const AmbientDomain& dom, const Slice& s);

// delta V (chi) for a discrete vertex field; asserts the pointwise class
// constraints at boundary vertices and throws ClassViolation otherwise.
double first_variation(const AmbientDomain& dom, const Slice& s, const std::vector<double>& field,
                       VectorFieldClass cls);

// Norm of the class-projected mass gradient. Zero iff discretely stationary
// within the class.
double stationarity_residual(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls);

// Class projection of an arbitrary vertex vector (gradient or step):
//  - VanishOnBoundary: zero at dM vertices;
//  - TangentToBoundary: tangential part at dM vertices;
//  - InwardVanishOnGamma: zero at gamma vertices; at other dM vertices the
//    *descent direction* -g is clipped to the inward halfspace.
// `as_descent` selects the one-sided clip (used when projecting steps).
void project_field(const AmbientDomain& dom, const Slice& s, const VertexClass& vc,
                   VectorFieldClass cls, std::vector<double>& field, bool as_descent);

// Inward unit euclidean normal of dM at a boundary vertex.
Vec2 inward_normal2(const AmbientDomain& dom, const Vec2& p);
Vec3 inward_normal3(const AmbientDomain& dom, const Vec3& p);

}  // namespace minmax
