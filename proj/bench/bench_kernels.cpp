// Serial reference vs OpenMP kernels. Prints one row per kernel.

#include "anderson/ensemble.hpp"
#include "anderson/noise.hpp"
#include "anderson/operator.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

using namespace anderson;

namespace {

double best_of(int runs, const std::function<void()>& f)
{
    double best = 1e300;
    for (int i = 0; i < runs; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same)
{
    std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv)
{
    const int runs = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads %d, best of %d\n", omp_get_max_threads(), runs);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    const Grid g(500.0, 1e-3);
    BrownianPath p1;
    BrownianPath p2;
    const double ts = best_of(runs, [&] { p1 = sample_brownian_serial(g, 1, 0); });
    const double tp = best_of(runs, [&] { p2 = sample_brownian(g, 1, 0); });
    row("brownian path L=500", ts, tp, p1.values == p2.values);

    const auto op = assemble(white_noise(p1), BoundaryCondition::Dirichlet);
    std::vector<double> shifts(256);
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        shifts[i] = -4.0 + 0.03 * static_cast<double>(i);
    }
    std::vector<std::size_t> c1(shifts.size());
    std::vector<std::size_t> c2(shifts.size());
    const double ss = best_of(runs, [&] { sturm_count_multi_serial(op, shifts, c1); });
    const double sp = best_of(runs, [&] { sturm_count_multi(op, shifts, c2); });
    row("sturm 256 shifts L=500", ss, sp, c1 == c2);

    EnsembleConfig ec;
    ec.L = 100.0;
    ec.k = 2;
    ec.reps = 8;
    ec.bc = BoundarySelection::Both;
    EnsembleResult e1;
    EnsembleResult e2;
    const double es = best_of(1, [&] { e1 = run_ensemble_serial(ec); });
    const double ep = best_of(1, [&] { e2 = run_ensemble(ec); });
    bool same = e1.dirichlet.size() == e2.dirichlet.size();
    for (std::size_t i = 0; same && i < e1.dirichlet.size(); ++i) {
        same = e1.dirichlet[i].lambdas == e2.dirichlet[i].lambdas &&
               e1.neumann[i].lambdas == e2.neumann[i].lambdas;
    }
    row("ensemble 8 x L=100 D+N", es, ep, same);
    return 0;
}
