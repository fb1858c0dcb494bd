// Serial vs OpenMP timing for the quadrature moment tables and the Galerkin
// assembly, with a bitwise identity check between the two paths.

#include <chrono>
#include <cstdio>

#include "dbarlab/galerkin.hpp"
#include "dbarlab/parallel.hpp"

using namespace dbarlab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int N = argc > 1 ? std::atoi(argv[1]) : 5;
  int level = auto_level(N);
  auto ball = make_ball();
  auto ell = make_ellipsoid(2);
  BasisDescriptor basis = build_basis(kDim, 1, N);
  std::printf("basis: q=1 N=%d (%zu elements), quadrature level %d, threads %d\n",
              N, basis.size(), level, thread_count());

  for (const DomainPtr& d : {ball, ell}) {
    QuadratureRule qi = interior_quadrature(d, level);
    QuadratureRule qb = boundary_quadrature(d, level + 1);
    std::printf("domain %-16s  %zu interior nodes, %zu boundary nodes\n",
                d->id().c_str(), qi.size(), qb.size());

    auto t0 = std::chrono::steady_clock::now();
    MomentTable ms = interior_moments_serial(qi, 2 * N);
    double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    MomentTable mp = interior_moments(qi, 2 * N);
    double tp = seconds_since(t0);
    bool same_entry =
        ms.at(N, 0, N, 0) == mp.at(N, 0, N, 0) && ms.at(1, 1, 1, 1) == mp.at(1, 1, 1, 1);
    std::printf("  moments (deg %2d): serial %7.3fs  omp %7.3fs  speedup %5.2fx  %s\n",
                2 * N, ts, tp, ts / tp, same_entry ? "bitwise-equal" : "MISMATCH");

    t0 = std::chrono::steady_clock::now();
    GalerkinSystem gs = assemble_serial(d, basis, qi, &qb, 1.0);
    ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    GalerkinSystem gp = assemble(d, basis, qi, &qb, 1.0);
    tp = seconds_since(t0);
    bool same = gs.M.a == gp.M.a && gs.E.a == gp.E.a && gs.B.a == gp.B.a;
    std::printf("  assembly        : serial %7.3fs  omp %7.3fs  speedup %5.2fx  %s\n",
                ts, tp, ts / tp, same ? "bitwise-equal" : "MISMATCH");
    if (!same || !same_entry) return 1;
  }
  return 0;
}
