#pragma once

#include "tcmom/geometry.hpp"

namespace tcmom {

// Closed-form static potential integrals over a flat triangle T for an
// observation point r:
//   scalar = integral over T of 1/R dS'
//   vec    = integral over T of (r' - rho)/R dS'   (rho = projection of r
//            onto the triangle plane; the result lies in that plane)
// Valid for any r, including points on or inside T. Edge terms whose
// in-plane distance and height both vanish are skipped (their limit is 0).
struct StaticPotentials {
  double scalar = 0.0;
  Vec3 vec{};
  Vec3 rho{};     // projection of the observation point
  double height = 0.0;  // signed distance of r from the triangle plane
};

StaticPotentials static_potentials(const Vec3& r, const Vec3& t0,
                                   const Vec3& t1, const Vec3& t2);

}  // namespace tcmom
