// Experiment runner: every subsystem behind one batch CLI with reproducible
// flat-text configs and plot-ready CSV/JSON outputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dbarlab/certify.hpp"
#include "dbarlab/io.hpp"
#include "dbarlab/oracles.hpp"
#include "dbarlab/selfcheck.hpp"
#include "dbarlab/stability.hpp"
#include "dbarlab/version.hpp"

using namespace dbarlab;

namespace {

struct CommonOpts {
  std::string domain = "ball";
  int q = 1;
  int k = 4;
  int N = 2;
  double sigma = -1.0;  // <0: default 100/diameter
  int quad_level = 0;   // 0: auto from N
  std::string cert_path;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::string side = "both";
  std::vector<double> deltas;
  std::vector<double> radii;
  int samples = 2000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--domain", o.domain,
                  "ball[:r] | ellipsoid[:m] | polydisc[:r1,r2] | @descriptor");
  cmd->add_option("--q", o.q, "form degree (1..2)");
  cmd->add_option("--k", o.k, "number of variational values");
  cmd->add_option("--N", o.N, "polynomial degree bound of the trial space");
  cmd->add_option("--sigma", o.sigma, "penalty weight (default 100/diameter)");
  cmd->add_option("--quad-level", o.quad_level, "quadrature level (0 = auto)");
  cmd->add_option("--cert", o.cert_path, "certificate file");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--out", o.out, "output file path");
  cmd->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--deltas", o.deltas, "offset ladder")->delimiter(',');
  cmd->add_option("--radii", o.radii, "radius ladder")->delimiter(',');
  cmd->add_option("--side", o.side, "inner | outer | both")
      ->check(CLI::IsMember({"inner", "outer", "both"}));
  cmd->add_option("--samples", o.samples, "Monte-Carlo sample count");
}

double resolve_sigma(const CommonOpts& o, const DomainPtr& d) {
  return o.sigma >= 0.0 ? o.sigma : default_sigma(*d);
}

std::map<std::string, std::string> config_map(const CommonOpts& o,
                                              const std::string& sub) {
  std::map<std::string, std::string> m;
  m["subcommand"] = sub;
  m["domain"] = o.domain;
  m["q"] = std::to_string(o.q);
  m["k"] = std::to_string(o.k);
  m["N"] = std::to_string(o.N);
  m["sigma"] = fmt(o.sigma);
  m["quad_level"] = std::to_string(o.quad_level);
  m["seed"] = std::to_string(o.seed);
  if (!o.cert_path.empty()) m["cert"] = o.cert_path;
  if (!o.deltas.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < o.deltas.size(); ++i)
      s << (i ? "," : "") << fmt(o.deltas[i]);
    m["deltas"] = s.str();
  }
  if (!o.radii.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < o.radii.size(); ++i)
      s << (i ? "," : "") << fmt(o.radii[i]);
    m["radii"] = s.str();
  }
  m["side"] = o.side;
  return m;
}

void write_json_out(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output path " + path);
  out << j.dump(2) << "\n";
}

json config_to_json(const std::map<std::string, std::string>& cfg) {
  json j;
  j["version"] = kVersion;
  for (const auto& [k, v] : cfg) j[k] = v;
  return j;
}

int run_spectrum(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  if (o.q < 1 || o.q > kDim) {
    std::fprintf(stderr, "error: q must be in 1..%d\n", kDim);
    return 2;
  }
  double sigma = resolve_sigma(o, d);
  BasisDescriptor basis = build_basis(kDim, o.q, o.N);
  if (o.k < 1 || std::size_t(o.k) > basis.size()) {
    std::fprintf(stderr, "error: k must be in 1..%zu for this basis\n",
                 basis.size());
    return 2;
  }
  GalerkinSystem sys = assemble_auto(d, basis, sigma, o.quad_level);
  Spectrum spec = variational_eigenvalues(sys, o.k);
  for (int i = 0; i < o.k; ++i)
    std::printf("lambda_%d = %s\n", i + 1, fmt(spec.eigenvalues[i]).c_str());
  auto cfg = config_map(o, "spectrum");
  cfg["sigma_resolved"] = fmt(sigma);
  if (!o.out.empty()) {
    if (o.format == "json") {
      json j;
      j["config"] = config_to_json(cfg);
      j["spectrum"] = spectrum_to_json(spec);
      write_json_out(o.out, j);
    } else {
      std::ofstream out(o.out, std::ios::binary);
      write_spectrum_csv(out, spec, cfg);
    }
  }
  return 0;
}

int report_output(const StabilityReport& rep, const CommonOpts& o,
                  const std::string& sub) {
  for (const auto& row : rep.rows) {
    std::ostringstream line;
    line << "delta=" << fmt(row.delta) << " side=" << row.tag;
    for (std::size_t i = 0; i < row.lambda.size(); ++i)
      line << " lambda_" << (i + 1) << "=" << fmt(row.lambda[i]);
    std::printf("%s\n", line.str().c_str());
  }
  for (const auto& [name, ok] : rep.verdicts)
    std::printf("verdict %s: %s\n", name.c_str(), ok ? "pass" : "FAIL");
  auto cfg = config_map(o, sub);
  if (!o.out.empty()) {
    if (o.format == "json") {
      json j;
      j["config"] = config_to_json(cfg);
      j["report"] = stability_to_json(rep);
      write_json_out(o.out, j);
    } else {
      std::ofstream out(o.out, std::ios::binary);
      write_stability_csv(out, rep, cfg);
      write_stability_curves(o.out, rep, cfg);
    }
  }
  return rep.all_pass() ? 0 : 1;
}

int run_sweep(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  if (o.q < 1 || o.q > kDim) {
    std::fprintf(stderr, "error: q must be in 1..%d\n", kDim);
    return 2;
  }
  if (o.radii.empty() == o.deltas.empty()) {
    std::fprintf(stderr,
                 "error: pass exactly one of --radii (dilation sweep) or "
                 "--deltas (offset sweep)\n");
    return 2;
  }
  double sigma = resolve_sigma(o, d);
  if (!o.radii.empty()) {
    StabilityReport rep =
        dilate_sweep(d, o.q, o.k, o.radii, o.N, sigma, o.quad_level);
    return report_output(rep, o, "sweep");
  }
  OffsetSide side = o.side == "inner"   ? OffsetSide::Inner
                    : o.side == "outer" ? OffsetSide::Outer
                                        : OffsetSide::Both;
  Certificate cert;
  const Certificate* cp = nullptr;
  if (!o.cert_path.empty()) {
    std::ifstream in(o.cert_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open certificate %s\n",
                   o.cert_path.c_str());
      return 2;
    }
    cert = parse_certificate(in);
    check_certificate(d, cert, o.q, o.samples, o.seed);
    cp = &cert;
  }
  StabilityReport rep = offset_sweep(d, o.q, o.k, o.deltas, side, o.N, sigma,
                                     cp, o.quad_level);
  return report_output(rep, o, "sweep");
}

int run_certify(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  Certificate cert;
  if (o.cert_path.empty()) {
    cert = builtin_certificate(d, o.q);
  } else {
    std::ifstream in(o.cert_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open certificate %s\n",
                   o.cert_path.c_str());
      return 2;
    }
    cert = parse_certificate(in);
  }
  CertificateVerdict v = check_certificate(d, cert, o.q, o.samples, o.seed);
  std::printf("certificate %s on %s: %s (worst margin %s)\n",
              cert.label.c_str(), d->id().c_str(), v.pass ? "pass" : "FAIL",
              fmt(v.worst_margin).c_str());
  json j;
  j["config"] = config_to_json(config_map(o, "certify"));
  j["certificate"] = cert.label;
  j["pass"] = v.pass;
  j["worst_margin"] = v.worst_margin;
  if (!v.pass) {
    j["reason"] = v.reason;
    j["witness"] = {v.witness_point[0].real(), v.witness_point[0].imag(),
                    v.witness_point[1].real(), v.witness_point[1].imag()};
    json wf = json::array();
    for (const cplx& c : v.witness_form) wf.push_back({c.real(), c.imag()});
    j["witness_form"] = wf;
  }
  if (v.pass) {
    double bound = catlin_lower_bound(cert);
    std::printf("catlin lower bound: lambda_1 >= %s\n", fmt(bound).c_str());
    j["catlin_lower_bound"] = bound;
    BasisDescriptor basis = build_basis(kDim, o.q, o.N);
    double sigma = resolve_sigma(o, d);
    GalerkinSystem sys = assemble_auto(d, basis, sigma, o.quad_level);
    Spectrum spec = variational_eigenvalues(sys, std::min(o.k, int(basis.size())));
    auto margins = check_catlin_on_spectrum(sys, spec, cert, o.k);
    json jm = json::array();
    bool all = true;
    for (std::size_t i = 0; i < margins.size(); ++i) {
      const auto& m = margins[i];
      std::printf("eigenform %zu: lambda=%s margin/Q=%s %s\n", i + 1,
                  fmt(m.lambda).c_str(), fmt(m.margin / m.q_value).c_str(),
                  m.pass ? "pass" : "FAIL");
      json e;
      e["lambda"] = m.lambda;
      e["q_value"] = m.q_value;
      e["hessian_int"] = m.hessian_int;
      e["margin"] = m.margin;
      e["pass"] = m.pass;
      jm.push_back(e);
      all = all && m.pass;
    }
    j["margins"] = jm;
    if (!o.out.empty()) write_json_out(o.out, j);
    return all && spec.eigenvalues[0] >= bound * 0.98 ? 0 : 1;
  }
  if (!o.out.empty()) write_json_out(o.out, j);
  return 1;
}

int run_hardy(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  int level = o.quad_level > 0 ? o.quad_level : 6;
  bool unit_ball = d->kind() == DomainKind::Ball && d->radius() == 1.0 &&
                   std::abs(d->center()[0]) + std::abs(d->center()[1]) == 0.0;
  Poly gpoly;
  if (unit_ball) {
    gpoly = Poly(1.0) - Poly::norm_sq();
  } else {
    gpoly = d->rho() * cplx(-1.0);
  }
  ScalarField g1(gpoly);
  ScalarField g2(gpoly * gpoly);
  PolyForm f = PolyForm::component(1, 1, gpoly);

  json rows = json::array();
  bool all = true;
  auto emit = [&](const std::string& name, const HardyReport& r, bool scalar) {
    std::printf(
        "%s: lhs=%s rhs_q=%s mass=%s minA16=%s minA_scalar=%s excluded=%s %s\n",
        name.c_str(), fmt(r.lhs).c_str(), fmt(r.rhs_q).c_str(),
        fmt(r.rhs_mass).c_str(), fmt(r.min_A_form).c_str(),
        fmt(r.min_A_scalar).c_str(), fmt(r.excluded_mass).c_str(),
        (scalar ? r.pass_scalar : r.pass16) ? "pass" : "FAIL");
    json j;
    j["test"] = name;
    j["lhs"] = r.lhs;
    j["rhs_q"] = r.rhs_q;
    j["rhs_mass"] = r.rhs_mass;
    j["grad_sq"] = r.grad_sq;
    j["min_A_16"] = r.min_A_form;
    j["min_A_scalar"] = r.min_A_scalar;
    j["excluded_mass"] = r.excluded_mass;
    j["level_agreement"] = r.level_agreement;
    j["pass"] = scalar ? r.pass_scalar : r.pass16;
    rows.push_back(j);
    all = all && (scalar ? r.pass_scalar : r.pass16);
  };
  emit("scalar g", check_hardy_scalar(d, g1, level), true);
  emit("scalar g^2", check_hardy_scalar(d, g2, level), true);
  emit("form g dzbar1", check_hardy_form(d, f, level), false);
  if (!o.out.empty()) {
    json j;
    j["config"] = config_to_json(config_map(o, "hardy"));
    j["reports"] = rows;
    write_json_out(o.out, j);
  }
  return all ? 0 : 1;
}

int run_resolvent(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  std::vector<double> radii = o.radii;
  if (radii.empty()) radii = {0.9, 0.95, 0.99};
  double sigma = resolve_sigma(o, d);
  PolyForm f = PolyForm::component(o.q, o.q == 1 ? 1 : 3, Poly(1.0));
  ResolventReport rep =
      resolvent_convergence(d, radii, f, o.q, o.N, sigma, o.quad_level);
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    std::printf("r=%s distance=%s\n", fmt(rep.radii[i]).c_str(),
                fmt(rep.distances[i]).c_str());
  std::printf("verdict strictly_decreasing: %s\n",
              rep.strictly_decreasing ? "pass" : "FAIL");
  if (!o.out.empty()) {
    json j;
    j["config"] = config_to_json(config_map(o, "resolvent"));
    j["radii"] = rep.radii;
    j["distances"] = rep.distances;
    j["strictly_decreasing"] = rep.strictly_decreasing;
    write_json_out(o.out, j);
  }
  return rep.strictly_decreasing ? 0 : 1;
}

// sigma-extrapolation lambda(sigma) = lambda_inf - c/sigma, least squares
double sigma_extrapolate(const std::vector<double>& sigmas,
                         const std::vector<double>& lambdas) {
  double s11 = double(sigmas.size()), s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    double x = 1.0 / sigmas[i];
    s12 += -x;
    s22 += x * x;
    b1 += lambdas[i];
    b2 += -x * lambdas[i];
  }
  double det = s11 * s22 - s12 * s12;
  return (b1 * s22 - s12 * b2) / det;
}

int run_oracle(const CommonOpts& o) {
  DomainPtr d = domain_from_string(o.domain);
  if (o.q != kDim) {
    std::fprintf(stderr, "error: the Dirichlet oracle is the q = n = 2 route\n");
    return 2;
  }
  double reference = 0.0;
  double discrete = 0.0;
  std::string route;
  if (d->kind() == DomainKind::Ball) {
    reference = dirichlet_ball_mu1(4, d->radius()) / 4.0;
    double sigma0 = o.sigma > 0.0 ? o.sigma : 1000.0;
    BasisDescriptor basis = build_basis(kDim, 2, o.N);
    int lvl = o.quad_level > 0 ? o.quad_level : auto_level(o.N);
    QuadratureRule qi = interior_quadrature(d, lvl);
    QuadratureRule qb = boundary_quadrature(d, lvl + 1);
    std::vector<double> sigmas{sigma0, 2.0 * sigma0, 4.0 * sigma0}, lams;
    GalerkinSystem sys = assemble(d, basis, qi, &qb, sigma0);
    for (double s : sigmas) {
      GalerkinSystem scaled = sys;
      scaled.sigma = s;
      Spectrum sp = variational_eigenvalues(scaled, 1);
      lams.push_back(sp.eigenvalues[0]);
    }
    discrete = sigma_extrapolate(sigmas, lams);
    route = "penalty sigma-extrapolated over {s, 2s, 4s}";
    std::printf("lambda_1(sigma) = %s, %s, %s\n", fmt(lams[0]).c_str(),
                fmt(lams[1]).c_str(), fmt(lams[2]).c_str());
  } else if (d->kind() == DomainKind::Polydisc) {
    reference = dirichlet_polydisc_mu1(d->polydisc_r1(), d->polydisc_r2()) / 4.0;
    BasisDescriptor basis = build_dirichlet_basis(d, o.N);
    GalerkinSystem sys = assemble_auto(d, basis, 0.0, o.quad_level);
    Spectrum sp = variational_eigenvalues(sys, 1);
    discrete = sp.eigenvalues[0];
    route = "zero-trace trial space";
  } else {
    std::fprintf(stderr,
                 "error: oracle supports ball and polydisc domains only\n");
    return 2;
  }
  double rel = std::abs(discrete - reference) / reference;
  std::printf("discrete lambda_1 = %s (%s)\n", fmt(discrete).c_str(),
              route.c_str());
  std::printf("dirichlet oracle  = %s (radial shooting, mu_1/4)\n",
              fmt(reference).c_str());
  std::printf("relative difference = %s\n", fmt(rel).c_str());
  if (!o.out.empty()) {
    json j;
    j["config"] = config_to_json(config_map(o, "oracle"));
    j["discrete"] = discrete;
    j["oracle"] = reference;
    j["relative_difference"] = rel;
    j["route"] = route;
    write_json_out(o.out, j);
  }
  return rel <= 0.10 ? 0 : 1;
}

int run_selftest_cmd(const CommonOpts& o) {
  auto results = run_selftest();
  print_check_table(results);
  if (!o.out.empty()) {
    json rows = json::array();
    for (const auto& r : results) {
      json j;
      j["name"] = r.name;
      j["pass"] = r.pass;
      j["detail"] = r.detail;
      rows.push_back(j);
    }
    json j;
    j["config"] = config_to_json(config_map(o, "selftest"));
    j["checks"] = rows;
    write_json_out(o.out, j);
  }
  return all_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dbarlab: penalty-Galerkin spectral laboratory for (0,q)-forms "
               "on domains in C^2"};
  app.require_subcommand(1);

  CommonOpts o;
  for (const char* name : {"spectrum", "sweep", "certify", "hardy", "resolvent",
                           "oracle", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, o);
  }

  // `--config file` expands to flags right after the subcommand, so explicit
  // flags override config values (take-last policy)
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    std::ifstream in(args[i + 1]);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config %s\n",
                   args[i + 1].c_str());
      return 2;
    }
    auto kv = parse_kv(in);
    std::vector<std::string> expanded;
    for (const auto& [k, v] : kv) {
      expanded.push_back("--" + k);
      expanded.push_back(v);
    }
    args.erase(args.begin() + i, args.begin() + i + 2);
    args.insert(args.begin() + std::min<std::size_t>(1, args.size()),
                expanded.begin(), expanded.end());
    break;
  }
  std::vector<const char*> cargv;
  cargv.push_back(argv[0]);
  for (const auto& a : args) cargv.push_back(a.c_str());

  try {
    app.parse(int(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("spectrum")) return run_spectrum(o);
    if (app.got_subcommand("sweep")) return run_sweep(o);
    if (app.got_subcommand("certify")) return run_certify(o);
    if (app.got_subcommand("hardy")) return run_hardy(o);
    if (app.got_subcommand("resolvent")) return run_resolvent(o);
    if (app.got_subcommand("oracle")) return run_oracle(o);
    if (app.got_subcommand("selftest")) return run_selftest_cmd(o);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
