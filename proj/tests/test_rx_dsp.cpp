#include <doctest.h>

#include <cmath>

#include "otfsim/qam.hpp"
#include "otfsim/rx_dsp.hpp"

using namespace otfsim;

namespace {

FrameParams desk(int M, int N, int E = 4, int cp = 3) {
    return make_params(M, N, 15e3, 4e9, E, 0.45, cp);
}

DDFrame random_dd(int M, int N, Rng& rng) {
    DDFrame x(M, N);
    for (cplx& z : x.data()) z = rng.cnormal(1.0);
    return x;
}

ChannelRealization make_paths(const FrameParams& p, double f_d,
                              std::initializer_list<std::tuple<double, int, int, cplx>> specs) {
    ChannelRealization ch;
    ch.f_d = f_d;
    ch.P = static_cast<int>(specs.size());
    for (const auto& [theta, l, k, beta] : specs) {
        PathSpec path;
        path.theta = theta;
        path.l = l;
        path.k = k;
        path.tau = l / p.sample_rate();
        path.nu = f_d * std::cos(theta);
        path.beta = beta;
        ch.paths.push_back(path);
        ch.l_max = std::max(ch.l_max, l);
        ch.k_max = std::max(ch.k_max, std::abs(k));
    }
    return ch;
}

}  // namespace

TEST_CASE("pilot+guard counts follow the closed forms over the support range") {
    Rng rng(31);
    FrameParams p = desk(128, 160);
    for (int rep = 0; rep < 40; ++rep) {
        const int lm = 1 + static_cast<int>(rng.next_u64() % 32);
        const int km = 1 + static_cast<int>(rng.next_u64() % 32);
        const auto full = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, lm, km, 1.0);
        CHECK(full.overhead_count() == (2 * lm + 1) * (4 * km + 1));
        const auto prop = make_pattern_with_amplitude(PatternVariant::kProposed, p, lm, km, 1.0);
        CHECK(prop.overhead_count() == (lm + 1) * (2 * km + 1));
        const auto naive = make_pattern_with_amplitude(PatternVariant::kNaive, p, lm, km, 1.0);
        CHECK(naive.overhead_count() == 1);
        CHECK(full.overhead_count() + full.data_count() == p.grid_size());
    }
}

TEST_CASE("reference overhead table at full scale") {
    FrameParams p = desk(512, 128);
    const int counts_full[] = {205, 697, 2665};
    const int counts_prop[] = {63, 189, 693};
    const int kms[] = {1, 4, 16};
    for (int i = 0; i < 3; ++i) {
        CHECK(make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 20, kms[i], 1.0)
                  .overhead_count() == counts_full[i]);
        CHECK(make_pattern_with_amplitude(PatternVariant::kProposed, p, 20, kms[i], 1.0)
                  .overhead_count() == counts_prop[i]);
        CHECK(make_pattern_with_amplitude(PatternVariant::kNaive, p, 20, kms[i], 1.0)
                  .overhead_count() == 1);
    }
}

TEST_CASE("Doppler index estimation rounds half up") {
    FrameParams p = make_params(512, 128, 15e3, 4e9, 4, 0.45, 3);
    const double nt = p.N * p.T();
    CHECK(estimate_doppler(0.0, p, 1853.1) == 0);
    CHECK(estimate_doppler(1.0, p, 15.81 / nt) == 16);   // floor(16.31)
    CHECK(estimate_doppler(-1.0, p, 3.4 / nt) == -3);    // floor(-2.9)
    CHECK(estimate_doppler(1.0, p, 2.5 / nt) == 3);      // half rounds up
    CHECK(estimate_doppler(-1.0, p, 2.5 / nt) == -2);
    CHECK_THROWS_AS(estimate_doppler(1.2, p, 100.0), std::domain_error);
}

TEST_CASE("delay estimation finds a noiseless path and breaks ties low") {
    FrameParams p = desk(64, 32, 64);
    Rng rng(32);
    const double f_d = max_doppler_hz(120.0, p);
    auto ch = make_paths(p, f_d, {{1.0, 3, 0, cplx(0.9, 0.1)}});
    ch.paths[0].k = estimate_doppler(ch.paths[0].u(), p, f_d);
    ch.paths[0].nu = f_d * ch.paths[0].u();

    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 3,
                                                   std::max(1, ch.k_max), 10.0);
    std::vector<cplx> data(pat.data_indices.size());
    for (cplx& z : data) z = rng.cnormal(1.0);
    DDFrame x = assemble_frame(data, pat, p);
    auto rx = propagate_ideal_all(x, ch, p);
    DDFrame branch = combine(std::span<const DDFrame>(rx), ch.paths[0].u(), p);
    CHECK(estimate_delay(branch, ch.paths[0].k, pat) == 3);

    // l = 0 path
    auto ch0 = make_paths(p, 0.0, {{kPi / 2, 0, 0, cplx(1.0, 0.0)}});
    DDFrame b0 = propagate_ideal(x, ch0, p, 0);
    CHECK(estimate_delay(b0, 0, pat) == 0);

    // adversarial tie: two equal-magnitude cells in the scan row
    DDFrame tie(16, 16);
    PilotPattern small = make_pattern_with_amplitude(PatternVariant::kFullGuard, desk(16, 16), 3, 1, 1.0);
    tie(small.l0 + 1, small.k0) = cplx(0.5, 0.0);
    tie(small.l0 + 2, small.k0) = cplx(0.0, -0.5);
    CHECK(estimate_delay(tie, 0, small) == 1);
}

TEST_CASE("gain estimation is exact for a noiseless ideal branch") {
    FrameParams p = desk(64, 32, 32);
    Rng rng(33);
    const double f_d = max_doppler_hz(500.0, p);
    const cplx beta = std::polar(0.7, kPi / 3.0);
    auto ch = make_paths(p, f_d, {{0.9, 2, 0, beta}});
    ch.paths[0].k = estimate_doppler(ch.paths[0].u(), p, f_d);
    ch.paths[0].nu = f_d * ch.paths[0].u();

    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 3,
                                                   std::max(1, std::abs(ch.paths[0].k)), 10.0);
    std::vector<cplx> data(pat.data_indices.size());
    for (cplx& z : data) z = rng.cnormal(1.0);
    DDFrame x = assemble_frame(data, pat, p);
    auto rx = propagate_ideal_all(x, ch, p);
    DDFrame branch = combine(std::span<const DDFrame>(rx), ch.paths[0].u(), p);

    const int k_hat = estimate_doppler(ch.paths[0].u(), p, f_d);
    const int l_hat = estimate_delay(branch, k_hat, pat);
    CHECK(l_hat == 2);
    CHECK(k_hat == ch.paths[0].k);
    CHECK(std::abs(estimate_gain(branch, l_hat, k_hat, pat, p) - beta) < 1e-12);
}

TEST_CASE("gain estimation error is noise-limited at the pilot SNR") {
    FrameParams p = desk(64, 32, 16);
    Rng rng(34);
    const double sigma2 = 1.0;     // 0 dB data SNR
    const double snr_p_db = 40.0;  // |d0| = 100
    PilotPattern pat = make_pattern(PatternVariant::kFullGuard, p, 2, 1, snr_p_db, sigma2);

    const cplx beta(0.6, -0.45);
    auto ch = make_paths(p, 0.0, {{kPi / 2, 1, 0, beta}});
    double acc = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<cplx> data(pat.data_indices.size());
        for (cplx& z : data) z = rng.cnormal(1.0);
        DDFrame x = assemble_frame(data, pat, p);
        auto rx = propagate_ideal_all(x, ch, p);
        for (DDFrame& f : rx) add_noise(f, sigma2, rng);
        DDFrame branch = combine(std::span<const DDFrame>(rx), 0.0, p);
        const cplx bh = estimate_gain(branch, 1, 0, pat, p);
        acc += std::norm(bh - beta);
    }
    const double rms = std::sqrt(acc / reps);
    const double predicted = std::sqrt(sigma2 / p.E) / std::abs(pat.d0);
    CHECK(rms < std::pow(10.0, -snr_p_db / 20.0));  // pilot-SNR scale
    CHECK(rms == doctest::Approx(predicted).epsilon(0.2));
}

TEST_CASE("compensation shifts cyclically and inverts itself") {
    Rng rng(35);
    DDFrame y = random_dd(16, 8, rng);

    DDFrame same = compensate(y, 0, 0);
    for (size_t i = 0; i < y.size(); ++i) CHECK(same.data()[i] == y.data()[i]);

    DDFrame fwd = compensate(y, 3, -2);
    for (int l = 0; l < 16; ++l)
        for (int k = 0; k < 8; ++k) CHECK(fwd(l, k) == y.at_mod(l + 3, k - 2));

    DDFrame back = compensate(fwd, -3, 2);
    for (size_t i = 0; i < y.size(); ++i) CHECK(back.data()[i] == y.data()[i]);
}

TEST_CASE("compensating an ideal branch leaves a flat-faded copy of the frame") {
    FrameParams p = desk(32, 16);
    Rng rng(36);
    DDFrame x = random_dd(32, 16, rng);
    const cplx beta(0.3, 0.8);
    auto ch = make_paths(p, 0.0, {{kPi / 2, 4, -3, beta}});
    ch.paths[0].k = -3;
    DDFrame y = propagate_ideal(x, ch, p, 0);
    DDFrame comp = compensate(y, 4, -3);
    const cplx scale = beta * std::polar(1.0, -2.0 * kPi * 4.0 * -3.0 / (32.0 * 16.0));
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(comp.data()[i] - scale * x.data()[i]) < 1e-13);
}

TEST_CASE("single-branch MRC with the exact gain restores the frame") {
    FrameParams p = desk(32, 16);
    Rng rng(37);
    DDFrame x = random_dd(32, 16, rng);
    const cplx beta(0.9, -0.4);
    auto ch = make_paths(p, 0.0, {{kPi / 2, 2, 3, beta}});
    ch.paths[0].k = 3;
    DDFrame y = propagate_ideal(x, ch, p, 0);

    BranchEstimate est{0.0, 3, 2, beta};
    std::vector<DDFrame> comp;
    comp.push_back(compensate(y, 2, 3));
    std::vector<BranchEstimate> ests{est};
    DDFrame x_hat = mrc_combine(comp, ests, p);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x_hat.data()[i] - x.data()[i]) < 1e-12);
}

TEST_CASE("duplicated branches do not change the MRC output") {
    FrameParams p = desk(16, 8);
    Rng rng(38);
    DDFrame y = random_dd(16, 8, rng);
    BranchEstimate est{0.0, 1, 2, cplx(0.5, 0.5)};

    std::vector<DDFrame> one{compensate(y, 2, 1)};
    std::vector<BranchEstimate> e1{est};
    DDFrame a = mrc_combine(one, e1, p);

    std::vector<DDFrame> four(4, one[0]);
    std::vector<BranchEstimate> e4(4, est);
    DDFrame b = mrc_combine(four, e4, p);
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-13);
}

TEST_CASE("MRC over four noiseless flat-faded branches restores the frame") {
    // branches taken per path (the large-array limit: each one is a scaled,
    // shifted copy of the frame)
    FrameParams p = desk(64, 32, 256);
    Rng rng(39);
    const double f_d = max_doppler_hz(500.0, p);
    auto ch = make_paths(p, f_d,
                         {{std::acos(-0.8), 0, 0, cplx(0.7, 0.1)},
                          {std::acos(-0.1), 1, 0, cplx(-0.4, 0.5)},
                          {std::acos(0.35), 2, 0, cplx(0.2, -0.6)},
                          {std::acos(0.9), 3, 0, cplx(0.1, 0.3)}});
    for (PathSpec& path : ch.paths) {
        path.k = estimate_doppler(path.u(), p, f_d);
        path.nu = f_d * path.u();
        ch.k_max = std::max(ch.k_max, std::abs(path.k));
    }
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 3,
                                                   std::max(1, ch.k_max), 10.0);
    std::vector<cplx> data(pat.data_indices.size());
    for (cplx& z : data) z = rng.cnormal(1.0);
    DDFrame x = assemble_frame(data, pat, p);

    std::vector<DDFrame> comp;
    std::vector<BranchEstimate> ests;
    for (int b = 0; b < 4; ++b) {
        ChannelRealization one;
        one.P = 1;
        one.f_d = f_d;
        one.paths.push_back(ch.paths[b]);
        DDFrame branch = propagate_ideal(x, one, p, 0);
        BranchEstimate est;
        est.u = ch.paths[b].u();
        est.k_hat = estimate_doppler(est.u, p, f_d);
        est.l_hat = estimate_delay(branch, est.k_hat, pat);
        est.beta_hat = estimate_gain(branch, est.l_hat, est.k_hat, pat, p);
        CHECK(est.l_hat == ch.paths[b].l);
        CHECK(est.k_hat == ch.paths[b].k);
        comp.push_back(compensate(branch, est.l_hat, est.k_hat));
        ests.push_back(est);
    }
    DDFrame x_hat = mrc_combine(comp, ests, p);
    double err = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        err = std::max(err, std::abs(x_hat.data()[i] - x.data()[i]));
    CHECK(err < 1e-9);
}

TEST_CASE("MRC rejects degenerate inputs") {
    FrameParams p = desk(8, 8);
    std::vector<DDFrame> none;
    std::vector<BranchEstimate> e;
    CHECK_THROWS_AS(mrc_combine(none, e, p), std::invalid_argument);

    std::vector<DDFrame> one{DDFrame(8, 8)};
    std::vector<BranchEstimate> zero{{0.0, 0, 0, cplx(0.0, 0.0)}};
    CHECK_THROWS_AS(mrc_combine(one, zero, p), std::domain_error);
}

TEST_CASE("matrix equalizer: identity channel, exact inversion, MMSE->ZF limit") {
    FrameParams p = desk(8, 8);
    Rng rng(40);
    DDFrame y = random_dd(8, 8, rng);

    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(64, 64);
    DDFrame same = matrix_equalize(y, eye, 0.0, EqualizerMode::kZf);
    for (size_t i = 0; i < y.size(); ++i) CHECK(std::abs(same.data()[i] - y.data()[i]) < 1e-12);

    ChannelSamplingOptions opts;
    opts.resample_degenerate = false;
    auto ch = sample_channel(DelayProfile::preset("P4"), 500.0, p, rng, opts);
    Eigen::MatrixXcd h = build_dd_channel_matrix(ch, p);
    DDFrame x = random_dd(8, 8, rng);
    DDFrame rx = propagate_ideal(x, ch, p, 0);

    DDFrame zf = matrix_equalize(rx, h, 0.0, EqualizerMode::kZf);
    double err = 0.0;
    for (size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(zf.data()[i] - x.data()[i]));
    CHECK(err < 1e-9);

    DDFrame mmse = matrix_equalize(rx, h, 1e-12, EqualizerMode::kMmse);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(mmse.data()[i] - zf.data()[i]) < 1e-6);

    Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(64, 64);
    CHECK_THROWS_AS(matrix_equalize(y, singular, 0.0, EqualizerMode::kZf), std::runtime_error);
}

TEST_CASE("noiseless estimator exactness across random distinct-shift channels") {
    FrameParams p = desk(64, 32, 256);
    Rng rng(41);
    const double f_d = max_doppler_hz(500.0, p);
    ChannelSamplingOptions opts;
    opts.min_delta_u = 0.1;
    opts.require_distinct_shifts = true;

    for (int rep = 0; rep < 10; ++rep) {
        auto ch = sample_channel(DelayProfile::preset("P4"), 500.0, p, rng, opts);
        PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, ch.l_max,
                                                       ch.k_max, 10.0);
        std::vector<cplx> data(pat.data_indices.size());
        for (cplx& z : data) z = rng.cnormal(1.0);
        DDFrame x = assemble_frame(data, pat, p);
        auto rec = branch_receiver(propagate_ideal_all(x, ch, p), genie_angles(ch), pat, p, f_d);
        for (int b = 0; b < ch.path_count(); ++b) {
            CHECK(rec.estimates[b].l_hat == ch.paths[b].l);
            CHECK(rec.estimates[b].k_hat == ch.paths[b].k);
            CHECK(std::abs(rec.estimates[b].beta_hat - ch.paths[b].beta) < 1e-12);
        }
    }
}
