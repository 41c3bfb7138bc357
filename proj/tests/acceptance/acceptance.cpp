// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "tonekit/cli.hpp"
#include "tonekit/distortion.hpp"
#include "tonekit/integralops.hpp"
#include "tonekit/mobius.hpp"
#include "tonekit/tones.hpp"

#include "oracles.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tonekit;

namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

double tone_x1(const DomainSpec& spec, double h) {
  const Mesh mesh = build_mesh(spec, h);
  return fundamental_tone(mesh, make_multiplier(analytic_field("x", spec.dim()), mesh, "x1"),
                          BoundaryCondition::neumann)
      .mu1;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome criterion1() {
  const auto t0 = Clock::now();
  const double mu = tone_x1(DomainSpec::square(1.0), 1.0 / 64);
  const double t = seconds_since(t0);
  const double err = rel(mu, pi * pi);
  return {err < 0.01 && t < 10.0, fmt("mu1 = %.10f, rel err %.2e, %.2f s", mu, err, t)};
}

Outcome criterion2() {
  const double c2 = oracle::bessel_critical_point(2);
  const double mu = tone_x1(DomainSpec::disk(1.0), 1.0 / 64);
  const double err = rel(mu, c2 * c2);
  return {err < 0.015, fmt("mu1 = %.10f, c_2^2 = %.10f, rel err %.2e", mu, c2 * c2, err)};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const double c2 = bessel_cn(2), c3 = bessel_cn(3);
  bool squares = true;
  for (int n = 2; n <= 10; ++n) {
    const double c = bessel_cn(n);
    squares = squares && c * c >= n - 1;
  }
  const double t = seconds_since(t0);
  // 100x finer step than the library default.
  const double r2 = oracle::bessel_critical_point_rk4(2, 1e-7);
  const double r3 = oracle::bessel_critical_point_rk4(3, 1e-7);
  const double e2 = std::abs(c2 - r2), e3 = std::abs(c3 - r3);
  const bool pass = e2 <= 1e-4 && e3 <= 1e-4 && std::abs(c2 - 1.84118) <= 1e-4 && std::abs(c3 - 2.08158) <= 1e-4 &&
                    squares && t < 5.0;
  return {pass, fmt("c2 = %.8f (|d| %.1e), c3 = %.8f (|d| %.1e), c_n^2 >= n-1 for n=2..10: %s, %.2f s", c2, e2, c3,
                    e3, squares ? "yes" : "no", t)};
}

Outcome criterion4() {
  const double m1 = tone_x1(DomainSpec::disk(1.0), 1.0 / 64);
  const double m2 = tone_x1(DomainSpec::disk(2.0), 1.0 / 64);
  const double ratio = m1 / m2;
  return {rel(ratio, 4.0) < 0.01, fmt("mu1(B_1) / mu1(B_2) = %.10f", ratio)};
}

Outcome criterion5() {
  bool exact = true;
  int cases = 0;
  struct Case {
    DomainSpec spec;
    double h;
    std::string expr;
  };
  const std::vector<Case> suite{{DomainSpec::square(1.0), 1.0 / 32, "x"},
                                {DomainSpec::square(1.0), 1.0 / 32, "y"},
                                {DomainSpec::square(1.0), 1.0 / 32, "-x + 2"},
                                {DomainSpec::disk(1.0), 1.0 / 32, "0.6*x + 0.8*y"},
                                {DomainSpec::disk(1.0), 1.0 / 32, "0.8*x - 0.6*y"},
                                {DomainSpec::ball(1.0), 0.15, "z"}};
  for (const Case& c : suite) {
    const Mesh mesh = build_mesh(c.spec, c.h);
    const Field a = analytic_field(c.expr, c.spec.dim());
    // Only unit vectors whose squared norm is exactly 1 in floating point.
    if (energy_density(*a, Point(0.1, 0.2, 0.3)) != 1.0)
      continue;
    ++cases;
    const SparseSymMatrix std_mass = assemble_weighted_mass(mesh, QuadWeight{});
    const SparseSymMatrix energy_mass = assemble_energy_mass(mesh, *a);
    exact = exact && std_mass.values() == energy_mass.values() && std_mass.cols() == energy_mass.cols() &&
            std_mass.row_ptr() == energy_mass.row_ptr();
    const double mu_a = fundamental_tone(mesh, make_multiplier(a, mesh), BoundaryCondition::neumann).mu1;
    const double mu_u = weighted_spectrum(mesh, QuadWeight{}, BoundaryCondition::neumann, 1).eigenvalues[0];
    exact = exact && mu_a == mu_u;
  }
  return {exact && cases >= 4, fmt("%d unit directions, matrices and tones bit-identical: %s", cases,
                                   exact ? "yes" : "no")};
}

// Translation, rotation, dilation, inversion and two random words of
// three generators; `fits` rejects words whose poles touch the supports.
std::vector<std::pair<std::string, MobiusMap>> map_suite(const std::function<bool(const MobiusMap&)>& fits) {
  std::vector<std::pair<std::string, MobiusMap>> maps;
  maps.emplace_back("translation", MobiusMap::translation(Point(0.3, -0.5, 0.2), 3));
  const Jacobian rot = Eigen::AngleAxisd(0.9, Point(1.0, 2.0, -1.0).normalized()).toRotationMatrix();
  maps.emplace_back("rotation", MobiusMap::rotation(rot, 3));
  maps.emplace_back("dilation", MobiusMap::dilation(1.7, 3));
  maps.emplace_back("inversion", MobiusMap::inversion(3));
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int w = 0; w < 2; ++w) {
    for (;;) {
      MobiusMap m = MobiusMap::identity(3);
      for (int g = 0; g < 3; ++g) {
        switch (static_cast<int>(rng() % 4)) {
        case 0: m = m.then(MobiusMap::translation(Point(u(rng), u(rng), u(rng)), 3)); break;
        case 1: {
          const Point axis(u(rng), u(rng), u(rng));
          m = m.then(MobiusMap::rotation(Eigen::AngleAxisd(pi * u(rng), axis.normalized()).toRotationMatrix(), 3));
          break;
        }
        case 2: m = m.then(MobiusMap::dilation(std::exp(0.7 * u(rng)), 3)); break;
        default: m = m.then(MobiusMap::inversion(3));
        }
      }
      if (fits(m)) {
        maps.emplace_back("word " + std::to_string(w + 1), m);
        break;
      }
    }
  }
  return maps;
}

// The images must stay a moderate distance from every pole.
bool supports_fit(const MobiusMap& m, const std::vector<SupportBall>& balls) {
  try {
    for (const SupportBall& b : balls) {
      const SupportBall grown{b.center, 1.3 * b.radius};
      const SupportBall im = m.image(grown);
      if (!(im.radius < 5.0 * b.radius && im.radius > 0.2 * b.radius))
        return false;
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

std::vector<Field> bump_suite() {
  return {bump_field(Point(0.6, 0.2, 0.1), 0.4, 3, 3),       bump_field(Point(-0.5, 0.4, 0.3), 0.35, 4, 3),
          bump_field(Point(0.1, -0.7, 0.5), 0.45, 3, 3, 2.0), bump_field(Point(0.8, 0.8, -0.4), 0.5, 5, 3),
          bump_field(Point(-0.4, -0.3, -0.6), 0.3, 3, 3)};
}

std::vector<SupportBall> supports(const std::vector<Field>& fs) {
  std::vector<SupportBall> out;
  for (const Field& f : fs)
    out.push_back(*f->support());
  return out;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  const std::vector<Field> bumps = bump_suite();
  const auto balls = supports(bumps);
  double worst = 0.0;
  int checks = 0;
  bool converged = true;
  QuadratureOptions q;
  q.rel_tol = 1e-6;
  for (const auto& [name, m] : map_suite([&](const MobiusMap& g) { return supports_fit(g, balls); })) {
    for (const Field& f : bumps) {
      const InvarianceResult r = energy_invariance_check(m, f, q);
      worst = std::max(worst, r.rel_error);
      converged = converged && r.converged;
      ++checks;
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-3 && converged && t < 120.0 && checks == 30,
          fmt("%d checks, max rel err %.2e, all converged: %s, %.1f s", checks, worst, converged ? "yes" : "no", t)};
}

Outcome criterion7() {
  const Field f = bump_field(Point(0.6, 0.2, 0.1), 0.4, 3, 3);
  const Field g1 = bump_field(Point(-0.5, 0.4, 0.3), 0.35, 3, 3);
  const std::vector<SupportBall> balls{*f->support(), *g1->support()};
  double worst_green = 0.0, worst_hls = 0.0;
  int maps = 0;
  for (const auto& [name, m] : map_suite([&](const MobiusMap& g) { return supports_fit(g, balls); })) {
    // Ten points around the support of f, pushed forward.
    std::vector<Point> pts;
    const SupportBall s = *f->support();
    for (int i = 0; i < 10; ++i) {
      const double t = 2.0 * pi * i / 10.0, z = -0.9 + 0.2 * i;
      const double rho = s.radius * (0.3 + 0.25 * (i % 5));
      pts.push_back(m.apply(s.center + rho * Point(std::sqrt(1 - z * z) * std::cos(t), std::sqrt(1 - z * z) * std::sin(t), z)));
    }
    worst_green = std::max(worst_green, green_covariance_check(m, f, pts).max_rel_error);
    worst_hls = std::max(worst_hls, hls_invariance_check(m, f, g1, 1.0).rel_error);
    ++maps;
  }
  return {worst_green < 1e-2 && worst_hls < 1e-2,
          fmt("%d maps, green covariance max rel err %.2e, HLS (lambda = 1) max rel err %.2e", maps, worst_green,
              worst_hls)};
}

Outcome criterion8() {
  struct Triple {
    MobiusMap gamma;
    std::string a;
    Field b;
  };
  const Jacobian rot = Eigen::AngleAxisd(1.1, Point(0.0, 1.0, 1.0).normalized()).toRotationMatrix();
  const std::vector<Triple> triples{
      {MobiusMap::translation(Point(0.2, 0, 0), 3), "x", annulus_bump(Point(0.3, 0, 0), 0.2, 0.6, 3, 3)},
      {MobiusMap::dilation(1.5, 3), "x*y + z", annulus_bump(Point(0, 0.2, 0), 0.15, 0.5, 3, 3)},
      {MobiusMap::rotation(rot, 3), "x^2 - y*z", annulus_bump(Point(0.1, 0.1, 0.1), 0.2, 0.7, 2, 3)},
      {MobiusMap::inversion(3), "x + 2*y", annulus_bump(Point(1.5, 0, 0), 0.2, 0.6, 3, 3)},
      {MobiusMap::translation(Point(0.2, 0, 0), 3).then(MobiusMap::inversion(3)).then(MobiusMap::dilation(2, 3)),
       "x*y + z", annulus_bump(Point(0.9, 0.6, 0), 0.1, 0.5, 3, 3)},
      {MobiusMap::inversion(3).then(MobiusMap::translation(Point(0, 1, 0), 3)), "sin(x) + z",
       annulus_bump(Point(0, 0, 1.2), 0.2, 0.5, 3, 3)},
      {MobiusMap::dilation(0.7, 3).then(MobiusMap::rotation(rot, 3)), "cos(y)*x",
       annulus_bump(Point(-0.2, 0.3, 0), 0.25, 0.6, 2, 3)},
      {MobiusMap::translation(Point(0, 0, -1.5), 3).then(MobiusMap::inversion(3)), "x*y*z",
       annulus_bump(Point(0.3, 0.3, 0.2), 0.1, 0.4, 3, 3)},
      {MobiusMap::rotation(rot, 3).then(MobiusMap::inversion(3)).then(MobiusMap::translation(Point(1, 1, 0), 3)),
       "y^2 + x", annulus_bump(Point(-1.0, 0.8, 0.4), 0.15, 0.45, 3, 3)},
      {MobiusMap::dilation(2.5, 3).then(MobiusMap::translation(Point(-0.5, 0.5, 0), 3)), "exp(x)*y",
       annulus_bump(Point(0.4, -0.4, 0.4), 0.2, 0.5, 3, 3)}};
  double worst = 0.0;
  int count = 0;
  for (const Triple& t : triples) {
    const InvarianceResult r = energy_measure_flow_check(t.gamma, analytic_field(t.a, 3), t.b);
    worst = std::max(worst, r.rel_error);
    ++count;
  }
  return {worst < 1e-3, fmt("%d triples, max rel err %.2e", count, worst)};
}

const std::vector<std::string> kCorpus{
    "x",           "y",           "x + y",         "2*x - 3*y",       "x^2",
    "x^2 + y^2",   "x^2 - y^2",   "x*y",           "x*y + x",         "(x + 1)*(y - 2)",
    "x^3 - y",     "sin(x)",      "cos(y)",        "sin(x)*cos(y)",   "sin(pi*x)",
    "cos(2*x + y)", "sin(x + y)^2", "x*sin(y)",     "exp(x)*cos(y)",   "sin(3*x)*y^2"};

Outcome criterion9() {
  const auto t0 = Clock::now();
  int total = 0, failed = 0;
  std::set<std::string> failing;
  std::string worst_name;
  double worst_rel = 0.0;
  for (const DomainSpec& spec : {DomainSpec::square(1.0), DomainSpec::disk(1.0)}) {
    const double h = 1.0 / 64;
    const Mesh mesh = build_mesh(spec, h);
    const double mu_domain =
        fundamental_tone(mesh, make_multiplier(analytic_field("x", 2), mesh), BoundaryCondition::neumann).mu1;
    for (const std::string& expr : kCorpus) {
      const Multiplier a = make_multiplier(analytic_field(expr, 2), mesh, expr);
      for (const BoundReport& b : evaluate_bounds(bound_inputs(mesh, a, mu_domain), h, expr)) {
        ++total;
        const double r = b.slack / std::max(std::abs(b.rhs), 1e-300);
        if (!b.pass) {
          ++failed;
          failing.insert(spec.describe() + " " + b.name);
          if (r < worst_rel) {
            worst_rel = r;
            worst_name = spec.describe() + " " + b.name + " [" + expr + "]";
          }
        }
      }
    }
  }
  const double t = seconds_since(t0);
  std::string detail = fmt("%d reports, %d with slack < -1e-9 |rhs|, %.1f s", total, failed, t);
  if (failed) {
    std::string names;
    for (const std::string& f : failing)
      names += (names.empty() ? "" : ", ") + f;
    detail += ", failing: " + names + fmt("; worst %s: slack/|rhs| = %.3e", worst_name.c_str(), worst_rel);
  }
  return {failed == 0 && t < 300.0, detail};
}

Outcome criterion10() {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const std::vector<Point> samples = sample_domain(disk, 41);
  const std::vector<Point> dirs = default_directions(2, 16);
  const AnalyticMap id = AnalyticMap::affine(2, Jacobian::Identity());
  bool pass = true;
  std::string detail;

  SpectralOptions affine_opts;
  affine_opts.h = 1.0 / 32;
  for (double s : {1.0, 2.0, 4.0}) {
    Jacobian a = Jacobian::Identity();
    a(0, 0) = s;
    const AnalyticMap g = AnalyticMap::affine(2, a);
    const double k_dir = direct_distortion(g, samples);
    const SpectralDistortion sd = spectral_distortion_two_sided(g, disk, default_ball_family(g, disk, 3),
                                                                default_ball_family(id, disk, 3), dirs, affine_opts);
    const DistortionReport br = bracket_check(k_dir, sd.k_spec, 2, sd.family_size);
    const bool ok = std::abs(k_dir - std::sqrt(s)) <= 1e-12 && br.pass();
    pass = pass && ok;
    detail += fmt("diag(%g,1): K_dir = %.15f, K_spec = %.6f, K_spec <= K_dir*1.02 %s, K_dir <= C2*K_spec*1.02 %s; ", s,
                  k_dir, sd.k_spec, br.spec_below_dir ? "yes" : "NO", br.dir_below_spec ? "yes" : "NO");
  }

  SpectralOptions mob_opts;
  mob_opts.h = 1.0 / 64;
  const std::vector<std::pair<std::string, MobiusMap>> mobius{
      {"dilate+translate", MobiusMap::dilation(1.5, 2).then(MobiusMap::translation(Point(0.4, -0.2, 0), 2))},
      {"translate+invert", MobiusMap::translation(Point(2.0, 0.0, 0), 2).then(MobiusMap::inversion(2))},
      {"invert word", MobiusMap::translation(Point(0.0, 1.6, 0), 2)
                          .then(MobiusMap::inversion(2))
                          .then(MobiusMap::dilation(3.0, 2))}};
  for (const auto& [name, g] : mobius) {
    const double k_dir = direct_distortion(g, samples);
    const SpectralDistortion sd = spectral_distortion_two_sided(g, disk, default_ball_family(g, disk, 3),
                                                                default_ball_family(id, disk, 3), dirs, mob_opts);
    const bool ok = std::abs(k_dir - 1.0) <= 1e-9 && sd.k_spec >= 0.99 && sd.k_spec <= 1.01;
    pass = pass && ok;
    detail += fmt("%s: |K_dir - 1| = %.1e, K_spec = %.9f; ", name.c_str(), std::abs(k_dir - 1.0), sd.k_spec);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome criterion11() {
  const Mesh coarse = build_mesh(DomainSpec::ball(1.0), 0.1);
  const Mesh fine = build_mesh(DomainSpec::ball(1.0), 0.07);
  const Field x1 = analytic_field("x", 3);
  bool pass = true;
  std::string detail;
  for (const auto& [name, g] : {std::pair<std::string, MobiusMap>{"dilation", MobiusMap::dilation(1.8, 3)},
                                {"translation", MobiusMap::translation(Point(0.5, -0.3, 0.8), 3)}}) {
    const double gc = dirichlet_spectrum_equivalence(coarse, make_multiplier(x1, coarse), g, 5).max_rel_gap;
    const double gf = dirichlet_spectrum_equivalence(fine, make_multiplier(x1, fine), g, 5).max_rel_gap;
    // Similarities map the mesh onto an exactly scaled copy; the gap is
    // roundoff at both levels.
    const bool ok = gc < 0.02 && gf <= std::max(gc, 1e-10);
    pass = pass && ok;
    detail += fmt("%s: gap %.2e at h = 0.1, %.2e at h = 0.07; ", name.c_str(), gc, gf);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome criterion12() {
  const std::vector<std::vector<std::string>> runs{
      {"tonekit", "tone", "--domain", "disk:1", "--multiplier", "x*y + x", "--h", "0.05"},
      {"tonekit", "bounds", "--domain", "square:1", "--multiplier", "x", "--multiplier", "sin(x)*y", "--h", "0.0625"},
      {"tonekit", "distortion", "--map", "mobius:translate 2 0;invert", "--domain", "disk:1", "--h", "0.0625",
       "--max-balls", "3", "--directions", "4", "--two-sided"},
      {"tonekit", "green", "--map", "translate 0.3 0 0;invert", "--field", "bump:0.6,0.2,0.1,0.4", "--points", "4"},
      {"tonekit", "bessel", "--n", "4", "--format", "text"}};
  int identical = 0;
  for (const auto& args : runs) {
    std::ostringstream a, b, ea, eb;
    const int ca = cli::run(args, a, ea);
    const int cb = cli::run(args, b, eb);
    if (ca == cb && ca != 1 && a.str() == b.str() && !a.str().empty())
      ++identical;
  }
  return {identical == static_cast<int>(runs.size()),
          fmt("%d of %zu reports byte-identical across repeated runs", identical, runs.size())};
}

} // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,  criterion4,
                                                       criterion5, criterion6, criterion7,  criterion8,
                                                       criterion9, criterion10, criterion11, criterion12};
  int failures = 0;
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= static_cast<int>(criteria.size()))
      selected[k - 1] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i])
      continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
