#include "tonekit/cli.hpp"

#include "tonekit/distortion.hpp"
#include "tonekit/integralops.hpp"
#include "tonekit/mobius.hpp"
#include "tonekit/report.hpp"
#include "tonekit/tones.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#ifndef TONEKIT_VERSION
#define TONEKIT_VERSION "0.0.0"
#endif

namespace tonekit::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    out.push_back(trim(cur));
  return out;
}

std::vector<double> numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& t : split(s, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size())
      throw Error(ErrorKind::input, what + ": '" + t + "' is not a number");
    out.push_back(v);
  }
  return out;
}

Point point_from(const std::vector<double>& v, std::size_t offset, int dim) {
  Point p = Point::Zero();
  for (int d = 0; d < dim; ++d)
    p[d] = v[offset + d];
  return p;
}

// bump:c..,r[,k] | indicator:c..,r,w | annulus:c..,r0,r1[,k] | expression
Field parse_field(const std::string& text, int dim) {
  const auto colon = text.find(':');
  const std::string head = colon == std::string::npos ? "" : text.substr(0, colon);
  if (head == "annulus") {
    const std::vector<double> v = numbers(text.substr(colon + 1), head);
    const std::size_t need = dim + 2;
    if (v.size() != need && v.size() != need + 1)
      throw Error(ErrorKind::input, "annulus needs " + std::to_string(need) + " numbers and an optional power");
    return annulus_bump(point_from(v, 0, dim), v[dim], v[dim + 1], v.size() > need ? static_cast<int>(v[dim + 2]) : 3,
                        dim);
  }
  if (head == "bump" || head == "indicator") {
    const std::vector<double> v = numbers(text.substr(colon + 1), head);
    const std::size_t need = dim + (head == "bump" ? 1 : 2);
    if (v.size() != need && !(head == "bump" && v.size() == need + 1))
      throw Error(ErrorKind::input, head + " needs " + std::to_string(need) + " numbers");
    const Point c = point_from(v, 0, dim);
    if (head == "bump")
      return bump_field(c, v[dim], v.size() > need ? static_cast<int>(v[dim + 1]) : 3, dim);
    return smooth_indicator(c, v[dim], v[dim + 1], dim);
  }
  return analytic_field(text, dim);
}

std::string mobius_text(std::string text) {
  if (text.rfind("mobius:", 0) == 0)
    text = text.substr(7);
  std::replace(text.begin(), text.end(), ';', '\n');
  return text;
}

MobiusMap parse_mobius(const std::string& text, int dim) { return MobiusMap::parse(mobius_text(text), dim); }

// affine:A row-major[,b] | mobius:word | expr:f1;f2[;f3] with an optional
// inverse given the same way.
MapPtr parse_map(const std::string& text, const std::string& inverse, int dim) {
  if (text.rfind("affine:", 0) == 0) {
    const std::vector<double> v = numbers(text.substr(7), "affine");
    const std::size_t nn = dim * dim;
    if (v.size() != nn && v.size() != nn + dim)
      throw Error(ErrorKind::input, "affine needs " + std::to_string(nn) + " matrix entries and an optional offset");
    Jacobian a = Jacobian::Identity();
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        a(i, j) = v[i * dim + j];
    const Point b = v.size() > nn ? point_from(v, nn, dim) : Point::Zero();
    return std::make_shared<AnalyticMap>(AnalyticMap::affine(dim, a, b));
  }
  if (text.rfind("expr:", 0) == 0) {
    std::optional<std::vector<std::string>> inv;
    if (!inverse.empty())
      inv = split(inverse.rfind("expr:", 0) == 0 ? inverse.substr(5) : inverse, ';');
    return std::make_shared<AnalyticMap>(AnalyticMap::parse(dim, split(text.substr(5), ';'), inv));
  }
  return std::make_shared<MobiusMap>(parse_mobius(text, dim));
}

struct Common {
  std::string config;
  std::string output = "-";
  std::string format = "json";
  std::uint64_t seed = 20240917;
  double tol = 1e-8;
};

struct Outcome {
  json results = json::array();
  std::optional<double> h;
  bool failed = false;
};

json bound_json(const BoundReport& r) {
  return json{{"name", r.name},     {"lhs", r.lhs},       {"rhs", r.rhs},
              {"slack", r.slack},   {"pass", r.pass},     {"mesh_h", r.mesh_h},
              {"multiplier", r.multiplier}, {"units", "dimensionless"}, {"provenance", "p1-fem"}};
}

json value_json(const std::string& name, double v, const std::string& provenance) {
  return json{{"name", name}, {"value", v}, {"units", "dimensionless"}, {"provenance", provenance}};
}

std::string render_text(const json& doc) {
  std::vector<std::vector<std::string>> rows{{"name", "value", "lhs", "rhs", "slack", "pass"}};
  auto num = [](const json& r, const char* key) {
    return r.contains(key) && r[key].is_number() ? format_double(r[key].get<double>()) : std::string("-");
  };
  for (const json& r : doc["results"]) {
    std::string name = r.value("name", "");
    if (r.contains("multiplier") && r["multiplier"].is_string())
      name += "[" + r["multiplier"].get<std::string>() + "]";
    rows.push_back({name, num(r, "value"), num(r, "lhs"), num(r, "rhs"), num(r, "slack"),
                    r.contains("pass") ? (r["pass"].get<bool>() ? "yes" : "NO") : "-"});
  }
  std::string out = "tonekit " + doc["meta"]["version"].get<std::string>() + "\n";
  return out + text_table(rows);
}

EigenOptions eigen_options(const Common& c) {
  EigenOptions o;
  o.tol = c.tol;
  o.seed = c.seed;
  return o;
}

// Points in a ball, reproducible from the seed alone.
std::vector<Point> seeded_points(std::uint64_t seed, const Point& c, double r, int dim, std::size_t count,
                                 const std::function<bool(const Point&)>& ok) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<Point> out;
  for (int guard = 0; out.size() < count && guard < 100000; ++guard) {
    Point p = Point::Zero();
    for (int d = 0; d < dim; ++d)
      p[d] = unit();
    if (norm2(p, dim) > 1.0)
      continue;
    p = c + r * p;
    if (ok(p))
      out.push_back(p);
  }
  return out;
}

} // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", no, static_cast<int>(line.find_first_not_of(" \t") + 1));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("missing key before '='", no, 1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out.emplace_back(key, value);
  }
  return out;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fundamental tones, conformal invariance checks and distortion estimates"};
  app.name("tonekit");
  app.set_help_flag("--help", "Show help");
  app.set_version_flag("--version", TONEKIT_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* s) {
    s->set_help_flag("--help", "Show help");
    s->add_option("--config", common.config, "File of `key = value` lines; flags override it");
    s->add_option("--output", common.output, "Report path, - for stdout");
    s->add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    s->add_option("--seed", common.seed, "Seed for the eigensolver start and sampled points");
    s->add_option("--tol", common.tol, "Eigensolver residual tolerance");
  };

  std::string domain, multiplier = "x", bc = "neumann", map, inverse, field, field2, kind = "energy", csv;
  std::vector<std::string> multipliers;
  double h = 1.0 / 64.0, lambda = 1.0, tau = 0.02;
  int k = 1, dim = 3, n = 2, points = 10, directions = 16, max_level = 4;
  std::size_t max_balls = 25;
  bool two_sided = false;

  std::map<std::string, std::function<Outcome()>> actions;

  CLI::App* tone = app.add_subcommand("tone", "Fundamental tone of a multiplier on a domain");
  add_common(tone);
  tone->add_option("--domain", domain, "e.g. square:1, disk:1, ball:1")->required();
  tone->add_option("--multiplier", multiplier, "Expression in x, y, z");
  tone->add_option("--h", h, "Target edge length");
  tone->add_option("--bc", bc, "neumann or dirichlet");
  tone->add_option("--k", k, "Number of eigenvalues");
  actions["tone"] = [&] {
    const DomainSpec spec = parse_domain(domain);
    const Mesh mesh = build_mesh(spec, h);
    const Multiplier a = make_multiplier(analytic_field(multiplier, spec.dim()), mesh, multiplier);
    const BoundaryCondition b = parse_bc(bc);
    Outcome o;
    o.h = h;
    const Field f = a.field;
    const QuadWeight w = [&](std::size_t e, const ElementQuadrature& q, int i) {
      return norm2(f->gradient_on(mesh, e, q, i), mesh.dim());
    };
    const EigResult r = weighted_spectrum(mesh, w, b, k, eigen_options(common));
    for (int i = 0; i < k; ++i) {
      json j = value_json(i == 0 ? "mu1" : "mu" + std::to_string(i + 1), r.eigenvalues[i], "p1-fem shift-invert");
      j["residual"] = r.residuals[i];
      j["bc"] = to_string(b);
      j["multiplier"] = multiplier;
      j["dofs"] = r.eigenvectors.rows();
      j["iterations"] = r.iterations;
      j["nodes"] = mesh.num_nodes();
      o.results.push_back(j);
    }
    return o;
  };

  CLI::App* bounds = app.add_subcommand("bounds", "Inequality suite for one or more multipliers");
  add_common(bounds);
  bounds->add_option("--domain", domain)->required();
  bounds->add_option("--multiplier", multipliers, "Repeatable")->required();
  bounds->add_option("--h", h);
  actions["bounds"] = [&] {
    const DomainSpec spec = parse_domain(domain);
    Mesh mesh = build_mesh(spec, h);
    const EigenOptions eo = eigen_options(common);
    const Multiplier lin = make_multiplier(analytic_field("x", spec.dim()), mesh, "x");
    const double mu_u = fundamental_tone(mesh, lin, BoundaryCondition::neumann, eo).mu1;
    Outcome o;
    o.h = h;
    for (const std::string& m : multipliers) {
      const Multiplier a = make_multiplier(analytic_field(m, spec.dim()), mesh, m);
      for (const BoundReport& r : evaluate_bounds(bound_inputs(mesh, a, mu_u, eo), h, m)) {
        o.results.push_back(bound_json(r));
        o.failed = o.failed || !r.pass;
      }
    }
    return o;
  };

  CLI::App* inv = app.add_subcommand("invariance", "Conformal invariance checks");
  add_common(inv);
  inv->add_option("--kind", kind, "energy, flow or hls")->check(CLI::IsMember({"energy", "flow", "hls"}));
  inv->add_option("--map", map, "Mobius word, generators separated by ';'")->required();
  inv->add_option("--field", field, "bump:c..,r[,k], indicator:c..,r,w, annulus:c..,r0,r1[,k] or an expression")->required();
  inv->add_option("--field2", field2, "Second field (b for flow, g for hls)");
  inv->add_option("--lambda", lambda, "HLS exponent, 0 < lambda < n");
  inv->add_option("--dim", dim);
  inv->add_option("--max-level", max_level, "Quadrature refinement limit");
  actions["invariance"] = [&] {
    const MobiusMap g = parse_mobius(map, dim);
    const Field f = parse_field(field, dim);
    InvarianceResult r;
    if (kind == "energy") {
      QuadratureOptions q;
      q.max_level = max_level;
      r = energy_invariance_check(g, f, q);
    } else {
      if (field2.empty())
        throw Error(ErrorKind::input, kind + " needs --field2");
      const Field f2 = parse_field(field2, dim);
      if (kind == "flow") {
        QuadratureOptions q;
        q.max_level = max_level;
        r = energy_measure_flow_check(g, f, f2, q);
      } else {
        HlsOptions ho;
        ho.max_level = std::min(max_level, 3);
        r = hls_invariance_check(g, f, f2, lambda, ho);
      }
    }
    Outcome o;
    json j = value_json(kind + "_rel_error", r.rel_error, "adaptive tensor gauss");
    j["reference"] = r.reference;
    j["transformed"] = r.transformed;
    j["level"] = r.level;
    j["converged"] = r.converged;
    o.results.push_back(j);
    return o;
  };

  CLI::App* green = app.add_subcommand("green", "Covariance of the Green operator under a Mobius map");
  add_common(green);
  green->add_option("--map", map)->required();
  green->add_option("--field", field)->required();
  green->add_option("--points", points, "Sample points");
  green->add_option("--dim", dim);
  actions["green"] = [&] {
    const MobiusMap g = parse_mobius(map, dim);
    const Field f = parse_field(field, dim);
    const auto sup = f->support();
    if (!sup)
      throw Error(ErrorKind::input, "green needs a compactly supported field");
    const SupportBall img = g.image(*sup);
    const MobiusMap gi = g.inverse_map();
    const auto pts = seeded_points(common.seed, img.center, 2.0 * img.radius, dim, points, [&](const Point& p) {
      try {
        return gi.apply(p).allFinite();
      } catch (const Error&) {
        return false;
      }
    });
    const CovarianceResult r = green_covariance_check(g, f, pts, RieszOptions{});
    Outcome o;
    json j = value_json("green_covariance_rel_error", r.max_rel_error, "near/far split riesz quadrature");
    j["converged"] = r.converged;
    j["points"] = pts.size();
    o.results.push_back(j);
    return o;
  };

  CLI::App* dist = app.add_subcommand("distortion", "Direct and spectral distortion of a map");
  add_common(dist);
  dist->add_option("--map", map, "affine:A[,b], mobius:word or expr:f1;f2")->required();
  dist->add_option("--inverse", inverse, "Inverse components for expr maps");
  dist->add_option("--domain", domain, "The domain U")->required();
  dist->add_option("--h", h, "Mesh size relative to each ball radius");
  dist->add_option("--directions", directions);
  dist->add_option("--max-balls", max_balls);
  dist->add_option("--tau", tau);
  dist->add_flag("--two-sided", two_sided, "Also run the inverse map on balls in U");
  dist->add_option("--csv", csv, "Write the ratio table here");
  actions["distortion"] = [&] {
    const DomainSpec spec = parse_domain(domain);
    const int nd = spec.dim();
    const MapPtr g = parse_map(map, inverse, nd);
    const double k_dir = direct_distortion(*g, sample_domain(spec, nd == 2 ? 15 : 6));
    SpectralOptions so;
    so.h = h;
    so.eigen = eigen_options(common);
    const BallFamily fwd = default_ball_family(*g, spec, max_balls);
    const auto dirs = default_directions(nd, directions);
    SpectralDistortion sd;
    if (two_sided) {
      const AnalyticMap id = AnalyticMap::affine(nd, Jacobian::Identity());
      sd = spectral_distortion_two_sided(*g, spec, fwd, default_ball_family(id, spec, max_balls), dirs, so);
    } else {
      sd = spectral_distortion(*g, spec, fwd, dirs, so);
    }
    const DistortionReport br = bracket_check(k_dir, sd.k_spec, nd, sd.family_size, tau);
    if (!csv.empty()) {
      std::ofstream f(csv, std::ios::binary);
      if (!f)
        throw Error(ErrorKind::io, "cannot write '" + csv + "'");
      write_ratio_csv(f, sd.rows, nd);
    }
    Outcome o;
    o.h = h;
    o.results.push_back(value_json("k_dir", k_dir, "jacobian samples"));
    json ks = value_json("k_spec", sd.k_spec, "tone ratios");
    ks["family_size"] = sd.family_size;
    ks["directions"] = sd.directions;
    ks["failures"] = sd.failures;
    ks["note"] = "lower estimate from a finite ball and direction family";
    o.results.push_back(ks);
    o.results.push_back(value_json("c_n", br.c_n, "closed form"));
    json up{{"name", "k_spec_below_k_dir"}, {"lhs", br.k_spec}, {"rhs", br.k_dir * (1 + tau)},
            {"slack", br.k_dir * (1 + tau) - br.k_spec}, {"pass", br.spec_below_dir}, {"units", "dimensionless"}};
    json lo{{"name", "k_dir_below_bracket"}, {"lhs", br.k_dir}, {"rhs", br.c_n * br.k_spec * (1 + tau)},
            {"slack", br.c_n * br.k_spec * (1 + tau) - br.k_dir}, {"pass", br.dir_below_spec},
            {"units", "dimensionless"}};
    o.results.push_back(up);
    o.results.push_back(lo);
    o.failed = !br.pass();
    return o;
  };

  CLI::App* bes = app.add_subcommand("bessel", "The constant c_n and the effective conformal volume");
  add_common(bes);
  bes->add_option("--n", n, "Dimension >= 2")->required();
  actions["bessel"] = [&] {
    Outcome o;
    o.results.push_back(value_json("c_n", bessel_cn(n), "rk4 shooting"));
    o.results.push_back(value_json("effective_conformal_volume", effective_conformal_volume(n), "closed form"));
    o.results.push_back(value_json("bracket_constant", bracket_constant(n), "closed form"));
    return o;
  };

  CLI::App* spec_eq = app.add_subcommand("spectrum-equiv", "Dirichlet spectra on B and its Mobius preimage");
  add_common(spec_eq);
  spec_eq->add_option("--domain", domain)->required();
  spec_eq->add_option("--map", map)->required();
  spec_eq->add_option("--multiplier", multiplier);
  spec_eq->add_option("--h", h);
  spec_eq->add_option("--k", k);
  actions["spectrum-equiv"] = [&] {
    const DomainSpec spec = parse_domain(domain);
    const Mesh mesh = build_mesh(spec, h);
    const Multiplier a = make_multiplier(analytic_field(multiplier, spec.dim()), mesh, multiplier);
    const SpectrumComparison c =
        dirichlet_spectrum_equivalence(mesh, a, parse_mobius(map, spec.dim()), k, eigen_options(common));
    Outcome o;
    o.h = h;
    json j = value_json("max_rel_gap", c.max_rel_gap, "p1-fem shift-invert");
    j["reference"] = c.reference;
    j["pulled"] = c.pulled;
    o.results.push_back(j);
    return o;
  };

  // Config values go in front of the user's flags so the latter win.
  std::vector<std::string> args = args_in;
  try {
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size())
        path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0)
        path = args[i].substr(9);
      else
        continue;
      CLI::App* sub = nullptr;
      for (std::size_t j = 1; j < args.size() && !sub; ++j)
        if (!args[j].empty() && args[j][0] != '-')
          sub = app.get_subcommand_no_throw(args[j]);
      if (!sub)
        break;
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config(path)) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config")
          throw Error(ErrorKind::input, "config key '" + key + "' is not an option of " + sub->get_name());
        if (opt->get_expected_min() == 0) {
          if (value == "true" || value == "1")
            injected.push_back("--" + key);
        } else {
          injected.push_back("--" + key);
          injected.push_back(value);
        }
      }
      auto at = std::find(args.begin() + 1, args.end(), sub->get_name());
      args.insert(at + 1, injected.begin(), injected.end());
      break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  // Later occurrences of a single-valued option replace earlier ones.
  for (CLI::App* sub : app.get_subcommands({}))
    for (CLI::Option* opt : sub->get_options())
      if (opt->get_expected_max() == 1 && !(sub == bounds && opt->get_name() == "--multiplier"))
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bounds->get_option("--multiplier")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << TONEKIT_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (h <= 0.0)
      throw Error(ErrorKind::input, "h must be positive");
    if (k < 1)
      throw Error(ErrorKind::input, "k must be at least 1");
    const Outcome o = actions.at(sub->get_name())();

    json config = json::object();
    config["command"] = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
      const std::string name = opt->get_name();
      if (name == "--help" || name == "--config" || name == "--output" || name == "--format" || name == "--csv" ||
          opt->count() == 0)
        continue;
      const auto res = opt->results();
      if (opt->get_expected_min() == 0)
        config[name.substr(2)] = true;
      else if (opt->get_expected_max() == 1)
        config[name.substr(2)] = res.back();
      else
        config[name.substr(2)] = res;
    }
    json doc;
    doc["meta"] = {{"version", TONEKIT_VERSION},
                   {"seed", common.seed},
                   {"h", o.h ? json(*o.h) : json(nullptr)},
                   {"config", config}};
    doc["results"] = o.results;
    const std::string text = common.format == "json" ? to_json_text(doc) + "\n" : render_text(doc);
    if (common.output == "-") {
      out << text;
    } else {
      std::ofstream f(common.output, std::ios::binary);
      if (!f)
        throw Error(ErrorKind::io, "cannot write '" + common.output + "'");
      f << text;
    }
    return o.failed ? 2 : 0;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace tonekit::cli
