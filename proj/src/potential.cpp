#include "tcmom/potential.hpp"

#include <algorithm>
#include <cmath>

namespace tcmom {
namespace {

// Relative threshold below which the observation point is treated as lying on
// an edge line; the log/arctan edge terms vanish in that limit.
constexpr double kOnEdgeRel = 1e-10;

}  // namespace

// Wilton/Rao/Glisson-style closed forms. For each edge (s -> e, winding with
// the plane normal) with outward in-plane normal m = l_hat x n_hat:
//   I1  += t0 * f - |h| * (atan(t0*lp/(R0^2+|h|*Rp)) - atan(t0*lm/(R0^2+|h|*Rm)))
//   Irho += m * 0.5 * (R0^2 * f + lp*Rp - lm*Rm)
// where f = ln((Rp+lp)/(Rm+lm)), t0 is the signed in-plane distance from the
// projected point to the edge line, and R0^2 = t0^2 + h^2.
StaticPotentials static_potentials(const Vec3& r, const Vec3& t0,
                                   const Vec3& t1, const Vec3& t2) {
  StaticPotentials out;

  const Vec3 e01 = t1 - t0;
  const Vec3 e02 = t2 - t0;
  Vec3 n = cross(e01, e02);
  const double two_area = n.norm();
  if (two_area <= 0.0) return out;  // degenerate triangle contributes nothing
  n = n * (1.0 / two_area);

  out.height = dot(r - t0, n);
  out.rho = r - n * out.height;
  const double abs_h = std::abs(out.height);

  const Vec3 verts[3] = {t0, t1, t2};
  const double diam =
      std::max({(t1 - t0).norm(), (t2 - t1).norm(), (t0 - t2).norm()});
  const double on_edge_tol = kOnEdgeRel * diam;

  double scalar = 0.0;
  Vec3 vec{};
  for (int i = 0; i < 3; ++i) {
    const Vec3& s = verts[i];
    const Vec3& e = verts[(i + 1) % 3];
    const Vec3 edge = e - s;
    const double len = edge.norm();
    if (len <= 0.0) continue;
    const Vec3 l_hat = edge * (1.0 / len);
    const Vec3 m_hat = cross(l_hat, n);

    const double lm = dot(s - out.rho, l_hat);
    const double lp = dot(e - out.rho, l_hat);
    const double t0d = dot(s - out.rho, m_hat);  // signed in-plane distance
    const double r0sq = t0d * t0d + out.height * out.height;
    const double rm = std::sqrt(lm * lm + r0sq);
    const double rp = std::sqrt(lp * lp + r0sq);

    // Observation point on the edge line: log and arctan terms vanish.
    if (r0sq <= on_edge_tol * on_edge_tol) {
      vec = vec + m_hat * (0.5 * (lp * rp - lm * rm));
      continue;
    }

    // Pick the log branch that avoids cancellation: (Rp+lp)(Rp-lp) = R0^2.
    const double f = (lp + lm > 0.0) ? std::log((rp + lp) / (rm + lm))
                                     : std::log((rm - lm) / (rp - lp));

    const double beta = std::atan(t0d * lp / (r0sq + abs_h * rp)) -
                        std::atan(t0d * lm / (r0sq + abs_h * rm));

    scalar += t0d * f - abs_h * beta;
    vec = vec + m_hat * (0.5 * (r0sq * f + lp * rp - lm * rm));
  }

  out.scalar = scalar;
  out.vec = vec;
  return out;
}

}  // namespace tcmom
