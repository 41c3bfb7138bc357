#pragma once

#include "tonekit/eigensolver.hpp"
#include "tonekit/geometry.hpp"
#include "tonekit/maps.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tonekit {

// max ||gamma'(x)||_2 / |J(x)|^(1/n) over the samples. Throws
// not_bounded_distortion when the Jacobian changes sign and
// singular_point when it vanishes.
double direct_distortion(const Map& gamma, const std::vector<Point>& samples);

// Deterministic sample points inside a domain: a tensor grid clipped to it.
std::vector<Point> sample_domain(const DomainSpec& domain, int per_axis, double margin = 0.0);

// True when B(c, r * (1 + margin)) lies in gamma(U), tested on sampled
// points of the sphere through gamma^-1.
bool ball_in_image(const Map& gamma_inverse, const DomainSpec& domain, const Point& c, double r, double margin = 0.1);

// Three dyadic radii and a grid of admissible centers in gamma(U), at most
// `max_balls` in total.
BallFamily default_ball_family(const Map& gamma, const DomainSpec& domain, std::size_t max_balls = 25);

// theta = k pi / count in 2D; a hemisphere spiral in 3D.
std::vector<Point> default_directions(int dim, int count = 16);

struct SpectralOptions {
  // Mesh size relative to each ball radius.
  double h = 1.0 / 64.0;
  EigenOptions eigen = {};
};

struct RatioRow {
  std::size_t ball = 0;
  Point center = Point::Zero();
  double radius = 0.0;
  Point direction = Point::Zero();
  double mu_num = 0.0;
  double mu_den = 0.0;
  double ratio = 0.0;
  bool inverse = false; // row of the gamma^-1 pass
};

struct SpectralDistortion {
  double k_spec = 0.0;
  std::size_t family_size = 0;
  std::size_t directions = 0;
  std::vector<RatioRow> rows;
  std::vector<std::string> failures; // per-ball errors, not fatal
};

// K_spec = sqrt(max mu_1(B, a_u) / mu_1(gamma^-1(B), a_u o gamma)) over the
// balls and directions. The balls must lie in gamma(U).
SpectralDistortion spectral_distortion(const Map& gamma, const DomainSpec& domain, const BallFamily& balls,
                                       const std::vector<Point>& directions, const SpectralOptions& options = {});

// Forward pass on `forward` (balls in gamma(U)) and inverse pass on
// `backward` (balls in U); K_spec is the larger of the two.
SpectralDistortion spectral_distortion_two_sided(const Map& gamma, const DomainSpec& domain,
                                                 const BallFamily& forward, const BallFamily& backward,
                                                 const std::vector<Point>& directions,
                                                 const SpectralOptions& options = {});

// sqrt(n/(n-1)) (V(S^n)/V(B^n))^(1/n)
double bracket_constant(int n);

struct DistortionReport {
  double k_dir = 0.0;
  double k_spec = 0.0;
  double c_n = 0.0;
  double tau = 0.02;
  bool spec_below_dir = false; // K_spec <= K_dir (1 + tau)
  bool dir_below_spec = false; // K_dir <= C_n K_spec (1 + tau)
  std::size_t family_size = 0;
  bool pass() const { return spec_below_dir && dir_below_spec; }
};

DistortionReport bracket_check(double k_dir, double k_spec, int dim, std::size_t family_size, double tau = 0.02);

// ball_center, radius, direction, mu_num, mu_den, ratio
void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows, int dim);

} // namespace tonekit
