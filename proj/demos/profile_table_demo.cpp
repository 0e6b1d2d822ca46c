// Prints the exact expected profile of small recursive trees next to the
// Gaussian approximation, and a mobile-tree row for contrast.

#include <cstdio>

#include "logtree/asympt.hpp"
#include "logtree/exact.hpp"
#include "logtree/series.hpp"

int main() {
    using namespace logtree;
    const long n = 2000;
    const auto row = exact::expected_profile_stirling<double>(n, 24);
    const auto c = asympt::model_constants(TreeModel::recursive());
    std::printf("recursive n=%ld:\n%4s %14s %14s\n", n, "k", "mu_{n,k}", "gaussian");
    for (int k = 0; k <= 16; ++k)
        std::printf("%4d %14.3f %14.3f\n", k, row[k],
                    asympt::gaussian_profile(n, k, c));

    auto mob = series::profile_rows_increasing<double>(TreeModel::mobile(), {n}, 8);
    std::printf("\nmobile n=%ld (bushy, not width-regular):\n", n);
    for (size_t k = 0; k < mob.rows[0].size(); ++k)
        std::printf("%4zu %14.3f\n", k, mob.rows[0][k]);
    return 0;
}
