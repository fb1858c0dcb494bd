#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"

#include "dbarlab/certify_types.hpp"
#include "dbarlab/eigensolver.hpp"
#include "dbarlab/quadrature.hpp"
#include "dbarlab/stability.hpp"

namespace dbarlab {

using json = nlohmann::ordered_json;

// fixed "%.17g" formatting: output files are byte-stable across runs
std::string fmt(double v);

// --- flat key-value text ------------------------------------------------------
// Lines `key = value`; '#' comments; repeated keys allowed (term lists).
std::multimap<std::string, std::string> parse_kv(std::istream& in);

DomainSpec parse_domain_descriptor(std::istream& in);
// Short form: "ball", "ball:0.9", "ellipsoid:2", "polydisc:1,0.8", or
// "@file" pointing at a descriptor file.
DomainPtr domain_from_string(const std::string& s);

Certificate parse_certificate(std::istream& in);
void write_certificate(std::ostream& out, const Certificate& c);
Poly parse_poly_terms(const std::multimap<std::string, std::string>& kv,
                      const std::string& key);

// --- serialization ------------------------------------------------------------
json polyform_to_json(const PolyForm& f);
PolyForm polyform_from_json(const json& j);

void write_matrix_csv(std::ostream& out, const CMatrix& m);
// row-major little-endian doubles, header int32 {n, q, N, rows, cols}
void write_matrix_binary(std::ostream& out, const CMatrix& m, int n, int q,
                         int N);
CMatrix read_matrix_binary(std::istream& in, int& n, int& q, int& N);

void write_quadrature_csv(std::ostream& out, const QuadratureRule& rule);

json spectrum_to_json(const Spectrum& s);
void write_spectrum_csv(std::ostream& out, const Spectrum& s,
                        const std::map<std::string, std::string>& config);

json stability_to_json(const StabilityReport& rep);
// long format: delta, k, lambda, side
void write_stability_csv(std::ostream& out, const StabilityReport& rep,
                         const std::map<std::string, std::string>& config);
// plot-ready two-column (delta, lambda) files, one per (k, side) curve,
// written as <base>.curve_k<i>_<side>.csv
void write_stability_curves(const std::string& base, const StabilityReport& rep,
                            const std::map<std::string, std::string>& config);

// `# key = value` header lines embedding the resolved config + version
void write_config_header(std::ostream& out,
                         const std::map<std::string, std::string>& config);

}  // namespace dbarlab
