#include "otfsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

const DelayProfile& DelayProfile::preset(std::string_view name) {
    static const DelayProfile p4{
        "P4", {0.0, 370.0, 1090.0, 2510.0}, {0.0, -0.6, -7.0, -16.9}};
    static const DelayProfile p6{
        "P6",
        {0.0, 150.0, 370.0, 1090.0, 1730.0, 2510.0},
        {0.0, -1.4, -3.6, -7.0, -12.0, -16.9}};
    if (name == "P4") return p4;
    if (name == "P6") return p6;
    throw std::invalid_argument("unknown delay profile '" + std::string(name) + "'");
}

double max_doppler_hz(double v_kmh, const FrameParams& params) {
    return (v_kmh / 3.6) / params.lambda();
}

ChannelRealization sample_channel(const DelayProfile& profile, double v_kmh,
                                  const FrameParams& params, Rng& rng,
                                  const ChannelSamplingOptions& opts) {
    params.validate();
    const int P = profile.taps();
    if (P == 0) throw std::invalid_argument("sample_channel: empty delay profile");
    if (profile.power_db.size() != profile.delay_ns.size())
        throw std::invalid_argument("sample_channel: profile delay/power counts differ");
    if (!opts.paths_per_tap.empty() && static_cast<int>(opts.paths_per_tap.size()) != P)
        throw std::invalid_argument("sample_channel: paths_per_tap size does not match profile");

    const double f_d = max_doppler_hz(v_kmh, params);
    const double nt = params.N * params.T();

    ChannelRealization ch;
    ch.P = P;
    ch.f_d = f_d;
    ch.k_max = static_cast<int>(std::ceil(nt * f_d));

    // per-path mean powers: tap power split across its Q_p paths, then
    // normalized so the total is exactly 1
    std::vector<double> var;
    std::vector<int> tap_of;
    double total = 0.0;
    for (int p = 0; p < P; ++p) {
        const int qp = opts.paths_per_tap.empty() ? 1 : opts.paths_per_tap[p];
        if (qp < 1) throw std::invalid_argument("sample_channel: paths_per_tap entries must be >= 1");
        const double w = std::pow(10.0, profile.power_db[p] / 10.0) / qp;
        for (int q = 0; q < qp; ++q) {
            var.push_back(w);
            tap_of.push_back(p);
            total += w;
        }
    }
    for (double& w : var) w /= total;

    double tau_max = 0.0;
    for (double d : profile.delay_ns) tau_max = std::max(tau_max, d * 1e-9);
    ch.l_max = static_cast<int>(std::ceil(params.sample_rate() * tau_max));

    const double min_du =
        opts.min_delta_u >= 0.0 ? opts.min_delta_u : 2.0 * params.lambda() / (params.E * params.eta);

    const int B = static_cast<int>(var.size());
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        ch.paths.clear();
        for (int b = 0; b < B; ++b) {
            PathSpec path;
            path.tap = tap_of[b];
            path.tau = profile.delay_ns[tap_of[b]] * 1e-9;
            path.theta = 2.0 * kPi * rng.uniform();
            path.nu = f_d * std::cos(path.theta);
            path.mean_power = var[b];
            path.beta = rng.cnormal(var[b]);
            path.l = round_half_up(params.sample_rate() * path.tau);
            path.k = round_half_up(nt * path.nu);
            ch.paths.push_back(path);
        }

        bool ok = true;
        for (int a = 0; a < B && ok; ++a) {
            for (int b = a + 1; b < B && ok; ++b) {
                if (opts.resample_degenerate &&
                    std::abs(ch.paths[a].u() - ch.paths[b].u()) < min_du)
                    ok = false;
                if (opts.require_distinct_shifts && ch.paths[a].l == ch.paths[b].l &&
                    ch.paths[a].k == ch.paths[b].k)
                    ok = false;
            }
        }
        if (ok) return ch;
    }
    if (opts.require_distinct_shifts)
        throw std::runtime_error("sample_channel: could not draw distinct path shifts");
    return ch;  // degenerate angles kept after exhausting resampling
}

DDFrame propagate_ideal(const DDFrame& x, const ChannelRealization& ch,
                        const FrameParams& params, int antenna) {
    if (x.rows() != params.M || x.cols() != params.N)
        throw std::invalid_argument("propagate_ideal: frame/params dimensions differ");
    const int M = params.M, N = params.N;

    DDFrame y(M, N);
    for (const PathSpec& path : ch.paths) {
        const int lp = mod_index(path.l, M);
        const int kp = mod_index(path.k, N);
        const double rot = -2.0 * kPi * path.l * path.k / (static_cast<double>(M) * N);
        const cplx c = path.beta * std::polar(1.0, params.element_phase(antenna) * path.u() + rot);
        for (int k = 0; k < N; ++k) {
            const cplx* src = x.data().data() + static_cast<size_t>(mod_index(k - kp, N)) * M;
            cplx* dst = y.data().data() + static_cast<size_t>(k) * M;
            for (int l = 0; l < lp; ++l) dst[l] += c * src[l - lp + M];
            for (int l = lp; l < M; ++l) dst[l] += c * src[l - lp];
        }
    }
    return y;
}

std::vector<DDFrame> propagate_ideal_all(const DDFrame& x, const ChannelRealization& ch,
                                         const FrameParams& params) {
    std::vector<DDFrame> out;
    out.reserve(params.E);
    for (int i = 0; i < params.E; ++i) out.push_back(propagate_ideal(x, ch, params, i));
    return out;
}

std::vector<TimeSignal> propagate_time(const TimeSignal& s, const ChannelRealization& ch,
                                       const FrameParams& params) {
    const int M = params.M, N = params.N;
    const int body_len = M * N;
    if (s.body_len() != body_len)
        throw std::invalid_argument("propagate_time: body length does not match M*N");
    for (const PathSpec& path : ch.paths)
        if (path.l > s.cp_len)
            throw std::invalid_argument("propagate_time: cp_len is shorter than a path delay");

    std::span<const cplx> body = s.body();

    // Per-path delayed + Doppler-rotated body, shared across antennas.
    std::vector<std::vector<cplx>> routed(ch.paths.size());
    for (size_t p = 0; p < ch.paths.size(); ++p) {
        const PathSpec& path = ch.paths[p];
        routed[p].resize(body_len);
        const double omega = 2.0 * kPi * path.nu / params.sample_rate();  // rad per sample
        for (int n = 0; n < N; ++n) {
            for (int i = 0; i < M; ++i) {
                const int t = n * M + i;
                const cplx src = body[static_cast<size_t>(n) * M + mod_index(i - path.l, M)];
                routed[p][t] = src * std::polar(1.0, omega * (t - path.l));
            }
        }
    }

    std::vector<TimeSignal> out(params.E);
    for (int i = 0; i < params.E; ++i) {
        out[i].cp_len = 0;
        out[i].samples.assign(body_len, cplx(0.0, 0.0));
        for (size_t p = 0; p < ch.paths.size(); ++p) {
            const cplx g =
                ch.paths[p].beta * std::polar(1.0, params.element_phase(i) * ch.paths[p].u());
            const cplx* src = routed[p].data();
            cplx* dst = out[i].samples.data();
            for (int t = 0; t < body_len; ++t) dst[t] += g * src[t];
        }
    }
    return out;
}

void add_noise(TimeSignal& sig, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("add_noise: sigma2 must be >= 0");
    if (sigma2 == 0.0) return;
    for (cplx& z : sig.samples) z += rng.cnormal(sigma2);
}

void add_noise(DDFrame& frame, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("add_noise: sigma2 must be >= 0");
    if (sigma2 == 0.0) return;
    for (cplx& z : frame.data()) z += rng.cnormal(sigma2);
}

Eigen::MatrixXcd build_dd_channel_matrix(const ChannelRealization& ch,
                                         const FrameParams& params, int max_grid) {
    const int M = params.M, N = params.N;
    const long size = static_cast<long>(M) * N;
    if (size > max_grid)
        throw std::invalid_argument("build_dd_channel_matrix: M*N exceeds the dense-matrix cap");

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
    for (const PathSpec& path : ch.paths) {
        const cplx c =
            path.beta * std::polar(1.0, -2.0 * kPi * path.l * path.k / (static_cast<double>(M) * N));
        for (int k = 0; k < N; ++k) {
            const int ks = mod_index(k - path.k, N);
            for (int l = 0; l < M; ++l) {
                const int ls = mod_index(l - path.l, M);
                h(static_cast<long>(k) * M + l, static_cast<long>(ks) * M + ls) += c;
            }
        }
    }
    return h;
}

}  // namespace otfsim
