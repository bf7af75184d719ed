// Walks through the main entry points on small inputs.
#include <cstdio>

#include "fibstat/fibstat.hpp"

using namespace fibstat;

int main() {
    const FibCache cache = build_fib_cache(4096);
    const IdentityReport ids = identity_audit(cache);
    std::printf("identities checked up to f_%zu, sum 1/f_k = %.15f\n", ids.horizon, ids.reciprocal_partial_sum);

    const TransformResult t = fib_difference_transform(witness_sample(Witness::FibSquares, 12), cache);
    std::printf("F(fib-squares):");
    for (std::size_t n = 1; n <= t.size(); ++n) {
        std::printf(" %g", t.at(n));
    }
    std::printf("\n");

    const double eps[] = {0.5, 0.1};
    const SeqPrefix x = witness(Witness::CharSquares, 100000);
    const StatVerdict v = stat_limit(x, eps, x.horizon);
    std::printf("char-squares: %s, limit %g\n", std::string(to_string(v.classification)).c_str(), v.limit.value_or(0));

    const OperatorFamily fejer = fejer_family();
    for (std::size_t k : {4, 16, 64}) {
        const GridFunction f = target_function("sin2");
        std::printf("||F_%zu(sin^2) - sin^2|| = %.6f, theta = %.6f\n", k, sup_norm_2pi(fejer(k, f) - f),
                    theta_sequence(fejer, k).terms.back());
    }
    return 0;
}
