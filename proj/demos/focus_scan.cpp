// Focal amplitude, scattering ratio and extinction for a few input waists,
// using both the closed form and the mode expansion.
#include <cstdio>

#include "tightfocus/tightfocus.hpp"

using namespace tightfocus;

int main() {
    std::printf("%8s %8s %12s %12s %10s %10s\n", "w_L[mm]", "u", "|F| closed", "|F| modes", "R_sc", "eps_fiber");
    for (double w_mm : {0.5, 1.1, 4.0, 10.0}) {
        FocusGeometry g;
        g.w_l = w_mm * 1e-3;
        const double closed = std::abs(focal_field_infinite(g).ratio);
        const double modes = std::abs(reconstruct(decompose(g, 256), {0.0, 0.0, 0.0}).f_plus);
        const double r = scattering_ratio(g).r_sc;
        std::printf("%8.2f %8.4f %12.5g %12.5g %10.5f %10.5f\n", w_mm, g.u(), closed, modes, r,
                    extinction_fiber(r).epsilon);
    }
    const auto best = find_optimal_focusing(0.5, 5.0);
    std::printf("optimum: u* = %.4f, R_sc* = %.4f\n", best.u_star, best.r_star);
}
