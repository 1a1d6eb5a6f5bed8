#include <gtest/gtest.h>

#include <random>

#include "tightfocus/spectra.hpp"
#include "tightfocus/spectra_io.hpp"

using namespace tightfocus;

TEST(Model, Examples) {
    EXPECT_DOUBLE_EQ(model_transmission(0.4, 7.5, 0.9, 0.4), 0.9);
    EXPECT_DOUBLE_EQ(model_transmission(0.4, 7.5, 0.9, 0.4 + 3.75), 0.95);
    EXPECT_DOUBLE_EQ(model_transmission(0.4, 7.5, 0.9, 0.4 - 3.75), 0.95);
    EXPECT_NEAR(model_transmission(0.4, 7.5, 0.9, 1e9), 1.0, 1e-15);
    EXPECT_THROW(model_transmission(0.0, 0.0, 0.9, 1.0), std::invalid_argument);
}

TEST(Fit, NoiselessRoundTrip) {
    const auto rec = synthesize_spectrum(0.0, 7.5, 0.902, linspace(-25, 25, 41));
    const auto fit = fit_lorentzian(rec);
    EXPECT_FALSE(fit.degenerate);
    EXPECT_NEAR(fit.center, 0.0, 1e-6);
    EXPECT_NEAR(fit.fwhm, 7.5, 1e-6);
    EXPECT_NEAR(fit.t_min, 0.902, 1e-6);
    EXPECT_NEAR(fit.epsilon_max(), 0.098, 1e-6);
    EXPECT_LT(fit.residual_rms, 1e-9);
}

TEST(Fit, IdempotentOverRandomParameters) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dc(-3, 3), dw(3, 15), dt(0.05, 0.98);
    for (int i = 0; i < 100; ++i) {
        const double c = dc(rng), w = dw(rng), t = dt(rng);
        const auto fit = fit_lorentzian(synthesize_spectrum(c, w, t, linspace(-25, 25, 41)));
        EXPECT_NEAR(fit.center, c, 1e-6) << i;
        EXPECT_NEAR(fit.fwhm, w, 1e-6) << i;
        EXPECT_NEAR(fit.t_min, t, 1e-6) << i;
        EXPECT_GE(fit.epsilon_max(), 0.0);
        EXPECT_LE(fit.epsilon_max(), 1.0);
    }
}

TEST(Fit, EqualWeightsMatchUnweighted) {
    auto noisy = synthesize_spectrum(0.7, 7.2, 0.93, linspace(-20, 20, 61), 0.003, 8);
    auto plain = noisy;
    for (auto& p : plain.points) p.sigma.reset();
    for (auto& p : noisy.points) p.sigma = 0.01;
    const auto a = fit_lorentzian(noisy);
    const auto b = fit_lorentzian(plain);
    EXPECT_NEAR(a.center, b.center, 1e-10);
    EXPECT_NEAR(a.fwhm, b.fwhm, 1e-10);
    EXPECT_NEAR(a.t_min, b.t_min, 1e-10);
}

// Deepest measured row: ε = 10.4 ± 0.1 %, W = 7.7 ± 0.2 MHz, recovered from a
// synthetic scan with σ = 0.002 noise, 201 points over ±25 MHz.
TEST(Fit, NoisyTableRow) {
    const auto rec = synthesize_spectrum(0.0, 7.7, 0.896, linspace(-25, 25, 201), 0.002, 1);
    const auto fit = fit_lorentzian(rec);
    EXPECT_FALSE(fit.degenerate);
    EXPECT_NEAR(100 * fit.epsilon_max(), 10.4, 0.1);
    EXPECT_NEAR(fit.fwhm, 7.7, 0.2);
    // the fit's own uncertainties fit inside the quoted ones
    EXPECT_LT(100 * fit.t_min_sigma(), 0.1);
    EXPECT_LT(fit.fwhm_sigma(), 0.2);
    EXPECT_NEAR(fit.t_min, 0.896, 3 * fit.t_min_sigma());
    EXPECT_NEAR(fit.fwhm, 7.7, 3 * fit.fwhm_sigma());
}

TEST(Fit, UnweightedCovarianceTracksNoise) {
    auto rec = synthesize_spectrum(0.0, 7.7, 0.896, linspace(-25, 25, 201), 0.002, 3);
    auto plain = rec;
    for (auto& p : plain.points) p.sigma.reset();
    const auto w = fit_lorentzian(rec);
    const auto u = fit_lorentzian(plain);
    EXPECT_NEAR(u.t_min_sigma() / w.t_min_sigma(), 1.0, 0.15);
    EXPECT_NEAR(u.residual_rms, 0.002, 0.0003);
}

TEST(Fit, FlatSpectrumIsDegenerate) {
    SpectrumRecord rec;
    for (double d : linspace(-25, 25, 41)) rec.points.push_back({d, 1.0, std::nullopt});
    const auto fit = fit_lorentzian(rec);
    EXPECT_TRUE(fit.degenerate);
    EXPECT_EQ(fit.fwhm, 50.0);
    EXPECT_TRUE(std::isnan(fit.covariance[0][0]));
    const auto noisy = synthesize_spectrum(0.0, 7.0, 1.0, linspace(-25, 25, 41), 0.002, 4);
    EXPECT_TRUE(fit_lorentzian(noisy).degenerate);
}

TEST(Fit, Errors) {
    EXPECT_THROW(fit_lorentzian(synthesize_spectrum(0, 7, 0.9, linspace(-1, 1, 4))), std::invalid_argument);
    SpectrumRecord bad = synthesize_spectrum(0, 7, 0.9, linspace(-10, 10, 11));
    std::swap(bad.points[2], bad.points[3]);
    EXPECT_THROW(fit_lorentzian(bad), std::invalid_argument);
    bad = synthesize_spectrum(0, 7, 0.9, linspace(-10, 10, 11));
    bad.points[4].transmission = 1.5;
    EXPECT_THROW(fit_lorentzian(bad), std::invalid_argument);
    FitOptions one;
    one.max_iterations = 1;
    EXPECT_THROW(fit_lorentzian(synthesize_spectrum(0.5, 7, 0.9, linspace(-25, 25, 41), 0.004, 2), one), FitError);
}

TEST(Linewidth, Check) {
    LorentzianFit f;
    f.fwhm = 7.7;
    auto r = natural_linewidth_check(f, 6.0);
    EXPECT_NEAR(r.ratio, 1.2833, 1e-4);
    EXPECT_TRUE(r.consistent);
    f.fwhm = 6.0;
    EXPECT_DOUBLE_EQ(natural_linewidth_check(f, 6.0).ratio, 1.0);
    f.fwhm = 12.0;
    EXPECT_FALSE(natural_linewidth_check(f, 6.0).consistent);
    EXPECT_TRUE(natural_linewidth_check(f, 6.0, 2.5).consistent);
    EXPECT_THROW(natural_linewidth_check(f, 0.0), std::invalid_argument);
}

TEST(SpectrumCsv, RoundTrip) {
    const auto rec = synthesize_spectrum(0.3, 7.1, 0.97, linspace(-20, 20, 21), 0.002, 6);
    std::ostringstream out;
    write_spectrum_csv(rec, out);
    const auto back = read_spectrum_csv(out.str());
    ASSERT_EQ(back.points.size(), rec.points.size());
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        EXPECT_NEAR(back.points[i].detuning_mhz, rec.points[i].detuning_mhz, 1e-9);
        EXPECT_NEAR(back.points[i].transmission, rec.points[i].transmission, 1e-9);
        EXPECT_NEAR(*back.points[i].sigma, 0.002, 1e-12);
    }
    std::ostringstream again;
    write_spectrum_csv(back, again);
    EXPECT_EQ(out.str(), again.str());
}

TEST(SpectrumCsv, CommentsAndWhitespace) {
    const std::string text =
        "\xEF\xBB\xBF# scan 12\n"
        "detuning_mhz, transmission\r\n"
        "-2, 0.99\n"
        "\n"
        "# mid\n"
        "+0.5,0.91\r\n"
        "3e0 ,1.0\n";
    const auto rec = read_spectrum_csv(text);
    ASSERT_EQ(rec.points.size(), 3u);
    EXPECT_EQ(rec.points[1].detuning_mhz, 0.5);
    EXPECT_FALSE(rec.has_sigma());
}

TEST(SpectrumCsv, Errors) {
    EXPECT_THROW(read_spectrum_csv("freq,t\n1,1\n"), std::invalid_argument);
    EXPECT_THROW(read_spectrum_csv("# nothing\n"), std::invalid_argument);
    EXPECT_THROW(read_spectrum_csv("detuning_mhz,transmission\n1,abc\n"), std::invalid_argument);
    EXPECT_THROW(read_spectrum_csv("detuning_mhz,transmission\n1,0.9,0.1\n"), std::invalid_argument);
    EXPECT_THROW(read_spectrum_csv("detuning_mhz,transmission\n2,0.9\n1,0.9\n"), std::invalid_argument);
    try {
        read_spectrum_csv("detuning_mhz,transmission\n1,0.9\n2,x\n");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(SpectrumJson, Keys) {
    const auto fit = fit_lorentzian(synthesize_spectrum(0.0, 7.5, 0.902, linspace(-25, 25, 41)));
    const auto j = fit_to_json(fit);
    for (const char* k : {"center_mhz", "fwhm_mhz", "t_min", "epsilon_max", "residual_rms"}) EXPECT_TRUE(j.contains(k));
    EXPECT_NEAR(j["fwhm_mhz"].get<double>(), 7.5, 1e-6);
    EXPECT_NEAR(j["epsilon_max"].get<double>(), 0.098, 1e-6);
    SpectrumRecord flat;
    for (double d : linspace(-25, 25, 41)) flat.points.push_back({d, 1.0, std::nullopt});
    const auto jd = fit_to_json(fit_lorentzian(flat));
    EXPECT_TRUE(jd["degenerate"].get<bool>());
    EXPECT_TRUE(jd["covariance"][0][0].is_null());
}
