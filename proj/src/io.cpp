#include "dbarlab/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <vector>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dbarlab/version.hpp"

namespace dbarlab {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::multimap<std::string, std::string> parse_kv(std::istream& in) {
  std::multimap<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv.emplace(key, val);
  }
  return kv;
}

namespace {

std::string get_one(const std::multimap<std::string, std::string>& kv,
                    const std::string& key, const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

}  // namespace

Poly parse_poly_terms(const std::multimap<std::string, std::string>& kv,
                      const std::string& key) {
  Poly p;
  auto [lo, hi] = kv.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    std::istringstream ss(it->second);
    double re, im;
    int a1, a2, b1, b2;
    if (!(ss >> re >> im >> a1 >> a2 >> b1 >> b2))
      throw std::invalid_argument("bad poly term line: " + it->second);
    p.add_term(Mono{std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(b1),
                    std::uint8_t(b2)},
               cplx(re, im));
  }
  return p;
}

DomainSpec parse_domain_descriptor(std::istream& in) {
  auto kv = parse_kv(in);
  DomainSpec spec;
  spec.kind = get_one(kv, "kind", "ball");
  spec.radius = std::stod(get_one(kv, "radius", "1.0"));
  spec.m = std::stoi(get_one(kv, "m", "2"));
  spec.r1 = std::stod(get_one(kv, "r1", "1.0"));
  spec.r2 = std::stod(get_one(kv, "r2", "1.0"));
  spec.bounding_radius = std::stod(get_one(kv, "bounding_radius", "0.0"));
  std::string c = get_one(kv, "center", "0 0 0 0");
  std::istringstream cs(c);
  double x1, y1, x2, y2;
  if (!(cs >> x1 >> y1 >> x2 >> y2))
    throw std::invalid_argument("bad center line: " + c);
  spec.center = Pt{cplx(x1, y1), cplx(x2, y2)};
  if (kv.count("term")) spec.rho = parse_poly_terms(kv, "term");
  return spec;
}

DomainPtr domain_from_string(const std::string& s) {
  if (!s.empty() && s[0] == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw std::invalid_argument("cannot open descriptor " + s.substr(1));
    return make_domain(parse_domain_descriptor(in));
  }
  std::string kind = s, arg;
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    kind = s.substr(0, colon);
    arg = s.substr(colon + 1);
  }
  DomainSpec spec;
  if (kind == "ball") {
    spec.kind = "ball";
    if (!arg.empty()) spec.radius = std::stod(arg);
  } else if (kind == "ellipsoid" || kind == "complex_ellipsoid") {
    spec.kind = "complex_ellipsoid";
    if (!arg.empty()) spec.m = std::stoi(arg);
  } else if (kind == "polydisc") {
    spec.kind = "polydisc";
    if (!arg.empty()) {
      auto comma = arg.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("polydisc wants r1,r2");
      spec.r1 = std::stod(arg.substr(0, comma));
      spec.r2 = std::stod(arg.substr(comma + 1));
    }
  } else {
    throw std::invalid_argument("unknown domain '" + s + "'");
  }
  return make_domain(spec);
}

Certificate parse_certificate(std::istream& in) {
  auto kv = parse_kv(in);
  Certificate c;
  c.label = get_one(kv, "label", "certificate");
  c.hessian_bound = std::stod(get_one(kv, "M", "0.0"));
  if (kv.count("alpha")) c.alpha = std::stod(get_one(kv, "alpha", "0"));
  c.collar = std::stod(get_one(kv, "collar", "0.0"));
  if (!kv.count("term"))
    throw std::invalid_argument("certificate needs `term` lines for b");
  c.b = ScalarField(parse_poly_terms(kv, "term"));
  return c;
}

void write_certificate(std::ostream& out, const Certificate& c) {
  out << "label = " << c.label << "\n";
  out << "M = " << fmt(c.hessian_bound) << "\n";
  if (c.alpha) out << "alpha = " << fmt(*c.alpha) << "\n";
  if (c.collar > 0.0) out << "collar = " << fmt(c.collar) << "\n";
  for (const auto& [k, coef] : c.b.poly().terms()) {
    Mono m = Mono::from_key(k);
    out << "term = " << fmt(coef.real()) << " " << fmt(coef.imag()) << " "
        << int(m.a1) << " " << int(m.a2) << " " << int(m.b1) << " "
        << int(m.b2) << "\n";
  }
}

json polyform_to_json(const PolyForm& f) {
  json j;
  j["n"] = kDim;
  j["q"] = f.q();
  json comps = json::array();
  for (const auto& [J, p] : f.components()) {
    json comp;
    json idx = json::array();
    for (int v : mask_indices(J)) idx.push_back(v + 1);
    comp["J"] = idx;
    json terms = json::array();
    for (const auto& [k, c] : p.terms()) {
      Mono m = Mono::from_key(k);
      json t;
      t["a"] = {int(m.a1), int(m.a2)};
      t["b"] = {int(m.b1), int(m.b2)};
      t["re"] = c.real();
      t["im"] = c.imag();
      terms.push_back(t);
    }
    comp["terms"] = terms;
    comps.push_back(comp);
  }
  j["components"] = comps;
  return j;
}

PolyForm polyform_from_json(const json& j) {
  PolyForm f(j.at("q").get<int>());
  for (const auto& comp : j.at("components")) {
    IndexMask J = 0;
    for (const auto& v : comp.at("J")) J |= IndexMask(1u << (v.get<int>() - 1));
    Poly p;
    for (const auto& t : comp.at("terms")) {
      p.add_term(Mono{std::uint8_t(t.at("a")[0].get<int>()),
                      std::uint8_t(t.at("a")[1].get<int>()),
                      std::uint8_t(t.at("b")[0].get<int>()),
                      std::uint8_t(t.at("b")[1].get<int>())},
                 cplx(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    f.set(J, std::move(p));
  }
  return f;
}

void write_matrix_csv(std::ostream& out, const CMatrix& m) {
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) out << ",";
      out << fmt(m.at(i, j).real()) << "," << fmt(m.at(i, j).imag());
    }
    out << "\n";
  }
}

namespace {
void put_i32(std::ostream& out, std::int32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (std::uint32_t(v) >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 4);
}
std::int32_t get_i32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return std::int32_t(v);
}
}  // namespace

void write_matrix_binary(std::ostream& out, const CMatrix& m, int n, int q,
                         int N) {
  put_i32(out, n);
  put_i32(out, q);
  put_i32(out, N);
  put_i32(out, m.rows);
  put_i32(out, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      double re = m.at(i, j).real(), im = m.at(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
}

CMatrix read_matrix_binary(std::istream& in, int& n, int& q, int& N) {
  n = get_i32(in);
  q = get_i32(in);
  N = get_i32(in);
  int rows = get_i32(in), cols = get_i32(in);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re, im;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      m.at(i, j) = cplx(re, im);
    }
  if (!in) throw std::runtime_error("truncated matrix file");
  return m;
}

void write_quadrature_csv(std::ostream& out, const QuadratureRule& rule) {
  out << "re1,im1,re2,im2,weight\n";
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Pt& z = rule.nodes[i];
    out << fmt(z[0].real()) << "," << fmt(z[0].imag()) << ","
        << fmt(z[1].real()) << "," << fmt(z[1].imag()) << ","
        << fmt(rule.weights[i]) << "\n";
  }
}

void write_config_header(std::ostream& out,
                         const std::map<std::string, std::string>& config) {
  out << "# version = " << kVersion << "\n";
  for (const auto& [k, v] : config) out << "# " << k << " = " << v << "\n";
}

json spectrum_to_json(const Spectrum& s) {
  json j;
  j["version"] = kVersion;
  j["kind"] = "discrete variational values";
  j["domain"] = s.domain_id;
  j["sigma"] = s.sigma;
  j["N"] = s.N;
  j["level_int"] = s.level_int;
  j["level_bdy"] = s.level_bdy;
  j["truncated"] = s.truncated;
  j["values"] = s.eigenvalues;
  j["residuals"] = s.residuals;
  return j;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s,
                        const std::map<std::string, std::string>& config) {
  write_config_header(out, config);
  out << "k,lambda\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    out << (i + 1) << "," << fmt(s.eigenvalues[i]) << "\n";
}

json stability_to_json(const StabilityReport& rep) {
  json j;
  j["version"] = kVersion;
  j["domain"] = rep.domain_id;
  j["q"] = rep.q;
  j["k"] = rep.k;
  j["N"] = rep.N;
  j["sigma"] = rep.sigma;
  j["base_lambda"] = rep.base_lambda;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["delta"] = r.delta;
    row["tag"] = r.tag;
    row["param"] = r.param;
    row["lambda"] = r.lambda;
    rows.push_back(row);
  }
  j["rows"] = rows;
  json slopes = json::array();
  for (const auto& s : rep.slopes) {
    json f;
    f["slope"] = s.slope;
    f["band"] = s.band;
    f["npoints"] = s.npoints;
    slopes.push_back(f);
  }
  j["slopes"] = slopes;
  json metrics;
  for (const auto& [k, v] : rep.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  json verdicts;
  for (const auto& [k, v] : rep.verdicts) verdicts[k] = v;
  j["verdicts"] = verdicts;
  return j;
}

void write_stability_csv(std::ostream& out, const StabilityReport& rep,
                         const std::map<std::string, std::string>& config) {
  write_config_header(out, config);
  out << "delta,k,lambda,side\n";
  for (const auto& r : rep.rows)
    for (std::size_t i = 0; i < r.lambda.size(); ++i)
      out << fmt(r.delta) << "," << (i + 1) << "," << fmt(r.lambda[i]) << ","
          << r.tag << "\n";
}

void write_stability_curves(const std::string& base, const StabilityReport& rep,
                            const std::map<std::string, std::string>& config) {
  std::vector<std::string> sides;
  for (const auto& r : rep.rows)
    if (std::find(sides.begin(), sides.end(), r.tag) == sides.end())
      sides.push_back(r.tag);
  for (const std::string& side : sides)
    for (int i = 0; i < rep.k; ++i) {
      std::ostringstream name;
      name << base << ".curve_k" << (i + 1) << "_" << side << ".csv";
      std::ofstream out(name.str(), std::ios::binary);
      write_config_header(out, config);
      out << "delta,lambda\n";
      for (const auto& r : rep.rows)
        if (r.tag == side && int(r.lambda.size()) > i)
          out << fmt(r.delta) << "," << fmt(r.lambda[i]) << "\n";
    }
}

}  // namespace dbarlab
