// Simulate S_G(X) on the complete graph and watch it approach the
// (chi^2_1 - 1)/sqrt(2) limit: prints the KS distance to the analytic CDF for
// a range of graph sizes, followed by a coarse text histogram at the largest
// size. Usage: complete_graph_limit [reps] [seed]

#include <cstdio>
#include <cstdlib>
#include <cmath>

#include "qflimit/diagnostics.hpp"
#include "qflimit/ensembles.hpp"

using namespace qflimit;

int main(int argc, char** argv) {
    const std::uint64_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50000;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
    const AnalyticLaw law = AnalyticLaw::centered_chi(1.0 / std::sqrt(2.0));
    const auto f = SourceDistribution::standard_normal();

    std::printf("# complete graph K_n, F = standard normal, %llu reps/row\n",
                static_cast<unsigned long long>(reps));
    std::printf("%8s %12s %14s\n", "n", "KS", "0.38*n^-0.25");
    EmpiricalSample last;
    for (const int n : {25, 50, 100, 200, 400}) {
        const Graph g = generate(EnsembleSpec::complete(n));
        last = monte_carlo(g, f, reps, seed);
        std::printf("%8d %12.4f %14.4f\n", n, ks_distance(last, law),
                    0.38 * std::pow(n, -0.25));
    }

    std::printf("\n# empirical density at n = 400 (support starts at -1/sqrt(2))\n");
    const int bins = 36;
    const double lo = -1.0, hi = 3.5;
    std::vector<int> count(bins, 0);
    for (const double v : last.values) {
        if (v < lo || v >= hi) continue;
        ++count[static_cast<int>((v - lo) / (hi - lo) * bins)];
    }
    int peak = 1;
    for (const int c : count) peak = std::max(peak, c);
    for (int b = 0; b < bins; ++b) {
        const double x = lo + (b + 0.5) * (hi - lo) / bins;
        std::printf("%7.2f |%.*s\n", x, (count[b] * 60) / peak,
                    "************************************************************");
    }
    return 0;
}
