// Python bindings for the OTFS large-array receiver simulator. Grids cross
// the boundary as numpy complex128 arrays of shape (M, N) indexed [l, k]
// (delay-Doppler) or [m, n] (frequency-time).

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otfsim/beamforming.hpp"
#include "otfsim/qam.hpp"
#include "otfsim/rx_dsp.hpp"
#include "otfsim/sim.hpp"
#include "otfsim/transforms.hpp"

namespace py = pybind11;
using namespace otfsim;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

template <typename Grid>
Grid grid_from_numpy(const ComplexArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D complex array");
    Grid g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) g(static_cast<int>(i), static_cast<int>(j)) = r(i, j);
    return g;
}

template <typename Grid>
py::array_t<std::complex<double>> grid_to_numpy(const Grid& g) {
    py::array_t<std::complex<double>> a({g.rows(), g.cols()});
    auto w = a.mutable_unchecked<2>();
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) w(i, j) = g(i, j);
    return a;
}

std::vector<DDFrame> frames_from_list(const std::vector<ComplexArray>& arrays) {
    std::vector<DDFrame> frames;
    frames.reserve(arrays.size());
    for (const auto& a : arrays) frames.push_back(grid_from_numpy<DDFrame>(a));
    return frames;
}

py::array_t<std::complex<double>> vector_to_numpy(const std::vector<cplx>& v) {
    py::array_t<std::complex<double>> a(static_cast<py::ssize_t>(v.size()));
    auto w = a.mutable_unchecked<1>();
    for (size_t i = 0; i < v.size(); ++i) w(static_cast<py::ssize_t>(i)) = v[i];
    return a;
}

std::vector<std::uint8_t> bits_from_numpy(const py::array_t<std::uint8_t>& a) {
    std::vector<std::uint8_t> bits(a.size());
    auto r = a.unchecked<1>();
    for (py::ssize_t i = 0; i < a.size(); ++i) bits[static_cast<size_t>(i)] = r(i);
    return bits;
}

py::dict record_to_dict(const ResultRecord& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["metric"] = r.metric;
    d["snr_db"] = r.snr_db;
    d["snr_p_db"] = r.snr_p_db;
    d["velocity_kmh"] = r.velocity_kmh;
    d["antennas"] = r.antennas;
    d["pattern"] = r.pattern;
    d["value"] = r.value;
    d["ci_half_width"] = r.ci_half_width;
    d["trials"] = r.trials;
    d["seed"] = r.seed;
    return d;
}

py::list records_to_list(const std::vector<ResultRecord>& records) {
    py::list out;
    for (const auto& r : records) out.append(record_to_dict(r));
    return out;
}

ExperimentConfig config_from_dict(const py::dict& d) {
    ExperimentConfig cfg;
    for (auto item : d) {
        const std::string key = py::cast<std::string>(item.first);
        const std::string value = py::cast<std::string>(py::str(item.second));
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(otfsim, m) {
    m.doc() = "Link-level OTFS simulator with a large-scale receive array: "
              "delay-Doppler transforms, multipath channels, beamforming, "
              "pilot-aided estimation, and Monte-Carlo experiment drivers.";

    py::class_<FrameParams>(m, "FrameParams")
        .def_readonly("M", &FrameParams::M)
        .def_readonly("N", &FrameParams::N)
        .def_readonly("delta_f", &FrameParams::delta_f)
        .def_readonly("f_c", &FrameParams::f_c)
        .def_readonly("E", &FrameParams::E)
        .def_readonly("eta", &FrameParams::eta)
        .def_readonly("cp_len", &FrameParams::cp_len)
        .def_property_readonly("T", &FrameParams::T)
        .def_property_readonly("wavelength", &FrameParams::lambda)
        .def_property_readonly("sample_rate", &FrameParams::sample_rate)
        .def("__repr__", [](const FrameParams& p) {
            return "FrameParams(M=" + std::to_string(p.M) + ", N=" + std::to_string(p.N) +
                   ", E=" + std::to_string(p.E) + ")";
        });

    m.def("make_params", &make_params, py::arg("M"), py::arg("N"), py::arg("delta_f"),
          py::arg("f_c"), py::arg("E"), py::arg("eta_over_lambda"), py::arg("cp_len"),
          "Frame geometry with the antenna spacing given as a fraction of the "
          "carrier wavelength.");

    // QAM
    m.def("qam_modulate",
          [](const py::array_t<std::uint8_t>& bits, int order) {
              return vector_to_numpy(qam_modulate(bits_from_numpy(bits), order));
          },
          py::arg("bits"), py::arg("order"));
    m.def("qam_demodulate",
          [](const ComplexArray& symbols, int order) {
              std::vector<cplx> v(symbols.size());
              auto r = symbols.unchecked();
              for (py::ssize_t i = 0; i < symbols.size(); ++i) v[i] = r[i];
              auto bits = qam_demodulate(v, order);
              py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(bits.size()));
              auto w = out.mutable_unchecked<1>();
              for (size_t i = 0; i < bits.size(); ++i) w(static_cast<py::ssize_t>(i)) = bits[i];
              return out;
          },
          py::arg("symbols"), py::arg("order"));

    // pilot patterns
    py::class_<PilotPattern>(m, "PilotPattern")
        .def_property_readonly("variant", [](const PilotPattern& p) { return std::string(to_string(p.variant)); })
        .def_readonly("M", &PilotPattern::M)
        .def_readonly("N", &PilotPattern::N)
        .def_readonly("l0", &PilotPattern::l0)
        .def_readonly("k0", &PilotPattern::k0)
        .def_readonly("l_max", &PilotPattern::l_max)
        .def_readonly("k_max", &PilotPattern::k_max)
        .def_readonly("d0", &PilotPattern::d0)
        .def_readonly("pilot_index", &PilotPattern::pilot_index)
        .def_readonly("guard_indices", &PilotPattern::guard_indices)
        .def_readonly("data_indices", &PilotPattern::data_indices)
        .def_property_readonly("overhead_count", &PilotPattern::overhead_count)
        .def_property_readonly("overhead_percent", &PilotPattern::overhead_percent)
        .def_property_readonly("data_count", &PilotPattern::data_count);

    m.def("make_pattern",
          [](const std::string& variant, const FrameParams& params, int l_max, int k_max,
             double snr_p_db, double sigma2) {
              return make_pattern(pattern_from_string(variant), params, l_max, k_max, snr_p_db,
                                  sigma2);
          },
          py::arg("variant"), py::arg("params"), py::arg("l_max"), py::arg("k_max"),
          py::arg("snr_p_db"), py::arg("sigma2"));
    m.def("make_pattern_with_amplitude",
          [](const std::string& variant, const FrameParams& params, int l_max, int k_max,
             double d0) {
              return make_pattern_with_amplitude(pattern_from_string(variant), params, l_max,
                                                 k_max, d0);
          },
          py::arg("variant"), py::arg("params"), py::arg("l_max"), py::arg("k_max"),
          py::arg("d0"));
    m.def("pattern_grid_csv", &pattern_grid_csv, py::arg("pattern"));

    m.def("assemble_frame",
          [](const ComplexArray& data, const PilotPattern& pattern, const FrameParams& params) {
              std::vector<cplx> v(data.size());
              auto r = data.unchecked();
              for (py::ssize_t i = 0; i < data.size(); ++i) v[i] = r[i];
              return grid_to_numpy(assemble_frame(v, pattern, params));
          },
          py::arg("data"), py::arg("pattern"), py::arg("params"));
    m.def("extract_data",
          [](const ComplexArray& frame, const PilotPattern& pattern) {
              return vector_to_numpy(extract_data(grid_from_numpy<DDFrame>(frame), pattern));
          },
          py::arg("frame"), py::arg("pattern"));

    // transforms
    py::class_<TimeSignal>(m, "TimeSignal")
        .def(py::init([](const ComplexArray& samples, int cp_len) {
                 TimeSignal t;
                 t.cp_len = cp_len;
                 t.samples.resize(samples.size());
                 auto r = samples.unchecked();
                 for (py::ssize_t i = 0; i < samples.size(); ++i) t.samples[i] = r[i];
                 return t;
             }),
             py::arg("samples"), py::arg("cp_len") = 0)
        .def_property_readonly("samples",
                               [](const TimeSignal& t) { return vector_to_numpy(t.samples); })
        .def_readonly("cp_len", &TimeSignal::cp_len)
        .def_property_readonly("body_len", &TimeSignal::body_len);

    m.def("isfft", [](const ComplexArray& x) { return grid_to_numpy(isfft(grid_from_numpy<DDFrame>(x))); },
          py::arg("dd_frame"));
    m.def("sfft", [](const ComplexArray& s) { return grid_to_numpy(sfft(grid_from_numpy<FTFrame>(s))); },
          py::arg("ft_frame"));
    m.def("heisenberg",
          [](const ComplexArray& s, const FrameParams& p) {
              return heisenberg(grid_from_numpy<FTFrame>(s), p);
          },
          py::arg("ft_frame"), py::arg("params"));
    m.def("wigner",
          [](const TimeSignal& r, const FrameParams& p) { return grid_to_numpy(wigner(r, p)); },
          py::arg("signal"), py::arg("params"));
    m.def("add_cp", &add_cp, py::arg("body"), py::arg("cp_len"));
    m.def("remove_cp", &remove_cp, py::arg("signal"));

    // channel
    py::class_<DelayProfile>(m, "DelayProfile")
        .def(py::init([](std::string name, std::vector<double> delay_ns,
                         std::vector<double> power_db) {
                 return DelayProfile{std::move(name), std::move(delay_ns), std::move(power_db)};
             }),
             py::arg("name"), py::arg("delay_ns"), py::arg("power_db"))
        .def_static("preset", [](const std::string& name) { return DelayProfile::preset(name); })
        .def_readonly("name", &DelayProfile::name)
        .def_readonly("delay_ns", &DelayProfile::delay_ns)
        .def_readonly("power_db", &DelayProfile::power_db);

    py::class_<PathSpec>(m, "PathSpec")
        .def(py::init<>())
        .def_readwrite("tap", &PathSpec::tap)
        .def_readwrite("tau", &PathSpec::tau)
        .def_readwrite("nu", &PathSpec::nu)
        .def_readwrite("theta", &PathSpec::theta)
        .def_readwrite("beta", &PathSpec::beta)
        .def_readwrite("mean_power", &PathSpec::mean_power)
        .def_readwrite("l", &PathSpec::l)
        .def_readwrite("k", &PathSpec::k)
        .def_property_readonly("u", &PathSpec::u);

    py::class_<ChannelRealization>(m, "ChannelRealization")
        .def(py::init<>())
        .def_readwrite("paths", &ChannelRealization::paths)
        .def_readwrite("P", &ChannelRealization::P)
        .def_readwrite("f_d", &ChannelRealization::f_d)
        .def_readwrite("l_max", &ChannelRealization::l_max)
        .def_readwrite("k_max", &ChannelRealization::k_max)
        .def_property_readonly("B", &ChannelRealization::path_count);

    m.def("sample_channel",
          [](const DelayProfile& profile, double v_kmh, const FrameParams& params,
             std::uint64_t seed, std::vector<int> paths_per_tap, bool resample_degenerate,
             double min_delta_u, bool require_distinct_shifts) {
              Rng rng(seed);
              ChannelSamplingOptions opts;
              opts.paths_per_tap = std::move(paths_per_tap);
              opts.resample_degenerate = resample_degenerate;
              opts.min_delta_u = min_delta_u;
              opts.require_distinct_shifts = require_distinct_shifts;
              return sample_channel(profile, v_kmh, params, rng, opts);
          },
          py::arg("profile"), py::arg("v_kmh"), py::arg("params"), py::arg("seed"),
          py::arg("paths_per_tap") = std::vector<int>{},
          py::arg("resample_degenerate") = true, py::arg("min_delta_u") = -1.0,
          py::arg("require_distinct_shifts") = false);
    m.def("max_doppler_hz", &max_doppler_hz, py::arg("v_kmh"), py::arg("params"));

    m.def("propagate_ideal",
          [](const ComplexArray& x, const ChannelRealization& ch, const FrameParams& p,
             int antenna) {
              return grid_to_numpy(propagate_ideal(grid_from_numpy<DDFrame>(x), ch, p, antenna));
          },
          py::arg("frame"), py::arg("channel"), py::arg("params"), py::arg("antenna") = 0);
    m.def("propagate_ideal_all",
          [](const ComplexArray& x, const ChannelRealization& ch, const FrameParams& p) {
              py::list out;
              for (const DDFrame& f : propagate_ideal_all(grid_from_numpy<DDFrame>(x), ch, p))
                  out.append(grid_to_numpy(f));
              return out;
          },
          py::arg("frame"), py::arg("channel"), py::arg("params"));
    m.def("propagate_time", &propagate_time, py::arg("signal"), py::arg("channel"),
          py::arg("params"));
    m.def("add_noise",
          [](const ComplexArray& frame, double sigma2, std::uint64_t seed) {
              DDFrame f = grid_from_numpy<DDFrame>(frame);
              Rng rng(seed);
              add_noise(f, sigma2, rng);
              return grid_to_numpy(f);
          },
          py::arg("frame"), py::arg("sigma2"), py::arg("seed"),
          "Returns a copy of the frame with CN(0, sigma2) noise added.");
    m.def("build_dd_channel_matrix",
          [](const ChannelRealization& ch, const FrameParams& p, int max_grid) {
              const Eigen::MatrixXcd h = build_dd_channel_matrix(ch, p, max_grid);
              py::array_t<std::complex<double>> a({h.rows(), h.cols()});
              auto w = a.mutable_unchecked<2>();
              for (long i = 0; i < h.rows(); ++i)
                  for (long j = 0; j < h.cols(); ++j) w(i, j) = h(i, j);
              return a;
          },
          py::arg("channel"), py::arg("params"), py::arg("max_grid") = 4096);

    // beamforming
    m.def("steering_vector",
          [](double u, const FrameParams& p) { return vector_to_numpy(steering_vector(u, p)); },
          py::arg("u"), py::arg("params"));
    m.def("combine",
          [](const std::vector<ComplexArray>& per_antenna, double u, const FrameParams& p) {
              return grid_to_numpy(combine(frames_from_list(per_antenna), u, p));
          },
          py::arg("per_antenna"), py::arg("u"), py::arg("params"));
    m.def("array_gain", &array_gain, py::arg("u_src"), py::arg("u_beam"), py::arg("params"));
    m.def("array_gain_direct", &array_gain_direct, py::arg("u_src"), py::arg("u_beam"),
          py::arg("params"));
    m.def("mainlobe_width_u", &mainlobe_width_u, py::arg("params"));
    m.def("scan_angles",
          [](const std::vector<ComplexArray>& per_antenna, int grid_size, double threshold_ratio,
             double merge_width_factor, const PilotPattern& pattern, const FrameParams& p,
             double f_d) {
              ScanPolicy policy{grid_size, threshold_ratio, merge_width_factor};
              const int n = grid_size > 0 ? grid_size : 4 * p.E;
              return scan_angles(frames_from_list(per_antenna), AngleGrid::uniform(n), policy,
                                 pattern, p, f_d);
          },
          py::arg("per_antenna"), py::arg("grid_size"), py::arg("threshold_ratio"),
          py::arg("merge_width_factor"), py::arg("pattern"), py::arg("params"), py::arg("f_d"));
    m.def("genie_angles", &genie_angles, py::arg("channel"));

    // receiver
    py::class_<BranchEstimate>(m, "BranchEstimate")
        .def_readonly("u", &BranchEstimate::u)
        .def_readonly("k_hat", &BranchEstimate::k_hat)
        .def_readonly("l_hat", &BranchEstimate::l_hat)
        .def_readonly("beta_hat", &BranchEstimate::beta_hat);

    m.def("estimate_doppler", &estimate_doppler, py::arg("u"), py::arg("params"), py::arg("f_d"));
    m.def("estimate_delay",
          [](const ComplexArray& branch, int k_hat, const PilotPattern& pattern) {
              return estimate_delay(grid_from_numpy<DDFrame>(branch), k_hat, pattern);
          },
          py::arg("branch"), py::arg("k_hat"), py::arg("pattern"));
    m.def("estimate_gain",
          [](const ComplexArray& branch, int l_hat, int k_hat, const PilotPattern& pattern,
             const FrameParams& p) {
              return estimate_gain(grid_from_numpy<DDFrame>(branch), l_hat, k_hat, pattern, p);
          },
          py::arg("branch"), py::arg("l_hat"), py::arg("k_hat"), py::arg("pattern"),
          py::arg("params"));
    m.def("compensate",
          [](const ComplexArray& branch, int l_hat, int k_hat) {
              return grid_to_numpy(compensate(grid_from_numpy<DDFrame>(branch), l_hat, k_hat));
          },
          py::arg("branch"), py::arg("l_hat"), py::arg("k_hat"));
    m.def("mrc_combine",
          [](const std::vector<ComplexArray>& branches, const std::vector<BranchEstimate>& ests,
             const FrameParams& p) {
              return grid_to_numpy(mrc_combine(frames_from_list(branches), ests, p));
          },
          py::arg("branches"), py::arg("estimates"), py::arg("params"));
    m.def("matrix_equalize",
          [](const ComplexArray& y, const ComplexArray& h, double sigma2, const std::string& mode) {
              if (h.ndim() != 2 || h.shape(0) != h.shape(1))
                  throw std::invalid_argument("matrix_equalize: H must be square");
              Eigen::MatrixXcd hm(h.shape(0), h.shape(1));
              auto r = h.unchecked<2>();
              for (py::ssize_t i = 0; i < h.shape(0); ++i)
                  for (py::ssize_t j = 0; j < h.shape(1); ++j) hm(i, j) = r(i, j);
              const EqualizerMode em = mode == "zf" ? EqualizerMode::kZf : EqualizerMode::kMmse;
              return grid_to_numpy(matrix_equalize(grid_from_numpy<DDFrame>(y), hm, sigma2, em));
          },
          py::arg("frame"), py::arg("matrix"), py::arg("sigma2"), py::arg("mode") = "mmse");
    m.def("branch_receiver",
          [](const std::vector<ComplexArray>& per_antenna, const std::vector<double>& branch_u,
             const PilotPattern& pattern, const FrameParams& p, double f_d) {
              ReceiverOutput out = branch_receiver(frames_from_list(per_antenna), branch_u,
                                                   pattern, p, f_d);
              return py::make_tuple(grid_to_numpy(out.x_hat), out.estimates);
          },
          py::arg("per_antenna"), py::arg("branch_u"), py::arg("pattern"), py::arg("params"),
          py::arg("f_d"));

    // experiment drivers
    m.def("run_ber", [](const py::dict& d) { return records_to_list(run_ber(config_from_dict(d))); },
          py::arg("config"));
    m.def("run_mse", [](const py::dict& d) { return records_to_list(run_mse(config_from_dict(d))); },
          py::arg("config"));
    m.def("run_overhead",
          [](const py::dict& d) { return records_to_list(run_overhead(config_from_dict(d))); },
          py::arg("config"));
    m.def("run_arraygain",
          [](const py::dict& d) { return records_to_list(run_arraygain(config_from_dict(d))); },
          py::arg("config"));
    m.def("run_scaling",
          [](const py::dict& d) { return records_to_list(run_scaling(config_from_dict(d))); },
          py::arg("config"));
    m.def("records_to_csv",
          [](const py::list& records) {
              std::vector<ResultRecord> rs;
              for (auto item : records) {
                  py::dict d = py::cast<py::dict>(item);
                  ResultRecord r;
                  r.experiment = py::cast<std::string>(d["experiment"]);
                  r.metric = py::cast<std::string>(d["metric"]);
                  r.snr_db = py::cast<double>(d["snr_db"]);
                  r.snr_p_db = py::cast<double>(d["snr_p_db"]);
                  r.velocity_kmh = py::cast<double>(d["velocity_kmh"]);
                  r.antennas = py::cast<int>(d["antennas"]);
                  r.pattern = py::cast<std::string>(d["pattern"]);
                  r.value = py::cast<double>(d["value"]);
                  r.ci_half_width = py::cast<double>(d["ci_half_width"]);
                  r.trials = py::cast<long>(d["trials"]);
                  r.seed = py::cast<std::uint64_t>(d["seed"]);
                  rs.push_back(std::move(r));
              }
              return records_to_csv(rs);
          },
          py::arg("records"));
    m.def("derive_seed",
          [](std::uint64_t master, const std::string& stream, std::uint64_t index) {
              return derive_seed(master, stream, index);
          },
          py::arg("master"), py::arg("stream"), py::arg("index"));
}
