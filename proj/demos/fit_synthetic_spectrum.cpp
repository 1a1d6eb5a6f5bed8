// Generates a noisy transmission dip, writes it as CSV and fits it back.
#include <iostream>

#include "tightfocus/spectra.hpp"
#include "tightfocus/spectra_io.hpp"

using namespace tightfocus;

int main() {
    const auto rec = synthesize_spectrum(0.3, 7.7, 0.896, linspace(-25.0, 25.0, 101), 0.002, 7);
    write_spectrum_csv(rec, std::cout);
    const auto fit = fit_lorentzian(rec);
    std::cout << fit_to_json(fit).dump(2) << '\n';
    const auto lw = natural_linewidth_check(fit, 6.0);
    std::cout << "fwhm / natural linewidth = " << lw.ratio << (lw.consistent ? " (two-level)" : " (broadened)") << '\n';
}
